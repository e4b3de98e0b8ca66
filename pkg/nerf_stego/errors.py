"""Error types raised across nerf-stego and their CLI exit codes."""

from typing import Optional


class StegoError(Exception):
    """Base class for every failure the toolkit reports to the user."""

    exit_code = 1


class UsageError(StegoError):
    """Invalid call or command line (unknown flag, backward on a non-scalar...)."""

    exit_code = 2


class DimensionError(StegoError):
    """Tensor shapes or image dimensions do not agree."""


class NumericError(StegoError):
    """NaN/Inf encountered where finite values are required."""


class FormatError(StegoError):
    """A file, container or JSON document is malformed."""


class ConfigError(StegoError):
    """Invalid configuration value or unknown configuration key."""


class CapacityError(StegoError):
    """Message does not fit into the bit planes."""

    def __init__(self, message: str, max_bytes: int):
        super().__init__(message)
        self.max_bytes = max_bytes


class CorruptionError(StegoError):
    """Extracted bit planes do not frame a valid message (usually a wrong key)."""


class RsParameterError(StegoError):
    """Reed-Solomon parameters outside 0 < k < n <= 255."""


class RsDecodeError(StegoError):
    """A Reed-Solomon block had more errors than the code can correct."""


class EmbedError(StegoError):
    """The extractor did not reach perfect accuracy within the epoch budget."""

    def __init__(self, message: str, epochs: Optional[int] = None):
        super().__init__(message)
        self.epochs = epochs


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to a process exit code.

    Args:
        exc: Raised exception

    Returns:
        2 for usage errors, 1 for any other failure
    """
    if isinstance(exc, StegoError):
        return exc.exit_code
    return 1


__all__ = [
    "StegoError",
    "UsageError",
    "DimensionError",
    "NumericError",
    "FormatError",
    "ConfigError",
    "CapacityError",
    "CorruptionError",
    "RsParameterError",
    "RsDecodeError",
    "EmbedError",
    "exit_code_for",
]
