from .protocol import MomentMethod, TailKind, Side, Provenance, RunManifest, Record, format_real
from .errors import (MdtkError, InvalidModelError, DomainError, RangeError, MissingDeltaError,
                     UnsupportedMethodError, UnsupportedSizeError, DegenerateKernelError, ConfigError)

__version__ = "1.0.0"
