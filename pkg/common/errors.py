"""
Error types
Every error knows its kind string and the CLI exit code it maps to
"""

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_UNSUPPORTED_SIZE = 3


class MdtkError(Exception):
    kind = "error"
    exit_code = EXIT_VALIDATION


class InvalidModelError(MdtkError):
    kind = "invalid-model"


class DomainError(MdtkError, ValueError):
    kind = "domain"


class RangeError(MdtkError, ValueError):
    kind = "range"


class MissingDeltaError(MdtkError):
    kind = "missing-delta"


class UnsupportedMethodError(MdtkError):
    kind = "unsupported-method"


class UnsupportedSizeError(MdtkError):
    kind = "unsupported-size"
    exit_code = EXIT_UNSUPPORTED_SIZE


class DegenerateKernelError(InvalidModelError):
    kind = "degenerate-kernel"


class ConfigError(MdtkError):
    kind = "config"
