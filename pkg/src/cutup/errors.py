"""Exception hierarchy shared by the toolkit; each class maps to a CLI exit code."""

from __future__ import annotations


class CutupError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def record(self) -> dict:
        """Machine-readable error record emitted by the CLI on failure."""
        return {"error": type(self).__name__, "message": str(self), "exit_code": self.exit_code}


class ParseError(CutupError):
    """Malformed input syntax (bad JSON, bad JSONL line)."""

    exit_code = 3

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, offset {offset})"
        super().__init__(message)
        self.line = line
        self.offset = offset


class ValidationError(CutupError):
    """Well-formed input violating a schema invariant."""

    exit_code = 4


class ConfigError(CutupError):
    """Invalid or inconsistent configuration."""

    exit_code = 5


class CoverageError(CutupError):
    """Prediction/manifest clip-id sets do not line up."""

    exit_code = 6

    def __init__(self, message: str, clip_ids: list[str] | None = None):
        if clip_ids:
            shown = ", ".join(clip_ids[:10])
            more = f" (+{len(clip_ids) - 10} more)" if len(clip_ids) > 10 else ""
            message = f"{message}: {shown}{more}"
        super().__init__(message)
        self.clip_ids = clip_ids or []


class GeometryError(CutupError):
    """Impossible spatial or temporal geometry (crop wider than frame, clip outside video)."""

    exit_code = 7


class UnsampleableVideoError(CutupError):
    """Video too short to yield a single clip under the configured sampler."""

    exit_code = 7

    def __init__(self, video_ids: list[str], clip_len_s=None):
        self.video_ids = list(video_ids)
        ids = ", ".join(self.video_ids)
        length = f"{clip_len_s}s" if clip_len_s is not None else "the configured length"
        super().__init__(f"video(s) shorter than clip length {length}: {ids}")
