"""
Shared record formats
Vocabularies, JSON helpers and the run manifest written next to every output file
"""

import json
import math
import time
from dataclasses import dataclass, asdict, field, is_dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np


class MomentMethod(str, Enum):
    EXACT = "exact-enumeration"
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte-carlo"


class TailKind(str, Enum):
    NORMAL = "normal"
    SKEW = "skew"
    POISSON = "poisson"


class Side(str, Enum):
    RIGHT = "right"
    LEFT = "left"


class Provenance(str, Enum):
    ASSERTED = "asserted"           # supplied bound, not enumerated
    COMPUTED = "computed"           # enumerated supremum
    ESTIMATED = "estimated"         # Monte Carlo, carries a standard error
    USER_SUPPLIED = "user-supplied, not derived"


def format_real(value: float) -> str:
    """17 significant digits, lossless for float64"""
    return format(float(value), ".17g")


def to_plain(obj: Any) -> Any:
    """Convert dataclasses, enums and numpy values into JSON-ready python values"""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_plain(asdict(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        # json has no inf/nan literals worth relying on
        return value if math.isfinite(value) else str(value)
    return obj


def dumps(obj: Any, indent: Optional[int] = None) -> str:
    return json.dumps(to_plain(obj), ensure_ascii=False, indent=indent)


class Record:
    """Mixin for result dataclasses"""

    def to_dict(self) -> dict:
        return to_plain(self)

    def to_json(self, indent: Optional[int] = None) -> str:
        return dumps(self, indent=indent)


@dataclass
class RunManifest(Record):
    subcommand: str
    flags: dict
    seed: Optional[int] = None
    rng_id: str = ""
    code_version: str = ""
    wall_time: float = 0.0
    output_paths: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    created_at: float = None

    def __post_init__(self):
        if self.created_at is None:
            self.created_at = time.time()

    def note(self, text: str):
        self.notes.append(text)

    @classmethod
    def from_json(cls, data: str) -> "RunManifest":
        return cls(**json.loads(data))

    def sidecar_path(self, output_path: str) -> str:
        return f"{output_path}.manifest.json"

    def write_sidecar(self, output_path: str) -> str:
        path = self.sidecar_path(output_path)
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json(indent=2))
        return path


def error_payload(kind: str, message: str, details: dict = None) -> str:
    """Error message in the same shape the CLI writes to stderr"""
    return dumps({"error": kind, "message": message, "details": details or {}})
