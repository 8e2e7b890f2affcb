"""
Experiment defaults
Built-in values, merged with config/defaults.json and environment overrides
"""

import copy
import json
import logging
import os
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CONFIG_FILE = ROOT / "config" / "defaults.json"

ENV_LANES = "MDTK_DEFAULT_LANES"
ENV_CONFIG = "MDTK_CONFIG"

logger = logging.getLogger("mdtk.config")

# Built-in defaults; the JSON file may override any leaf
DEFAULTS = {
    "experiment": {
        "reps": 1_000_000,
        "seed": 20240601,
        "lanes": 1,
        "block_size": 16384,
        "x_grid": [2.0, 2.5, 3.0, 3.5, 4.0],
    },
    "table1": {
        "n": 1500,
        "k": 2,
        "p": 0.25,
        "reps": 1_000_000,
        "x_grid": [2.0, 2.5, 3.0, 3.5, 4.0],
    },
    "moments": {
        "mc_reps": 200_000,
        "exact_max_triples": 2_000_000,
        "exact_chunk": 64,
        "kruns_exact_max_n": 200,
    },
    "enumeration": {
        "joint_limit": 1 << 20,
        "oracle_limit": 1 << 24,
        "copy_map_limit": 5_000_000,
    },
    "mgf": {
        "bootstrap": 200,
    },
    "bounds": {
        "C": 1.0,
        "C0": 1.0,
    },
}


def _merge(base: dict, override: dict) -> dict:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def load_config(path: os.PathLike = None) -> dict:
    """Load defaults, then the JSON file if present (bad files are logged and ignored)"""
    config = copy.deepcopy(DEFAULTS)
    path = Path(path or os.environ.get(ENV_CONFIG) or CONFIG_FILE)
    if path.exists():
        try:
            with path.open(encoding="utf-8") as f:
                disk_cfg = json.load(f)
            if isinstance(disk_cfg, dict):
                _merge(config, disk_cfg)
                logger.debug(f"Loaded defaults from {path}")
        except Exception as e:
            logger.warning(f"Failed to load {path}: {e}")
    return config


def default_lanes(config: dict = None) -> int:
    """MDTK_DEFAULT_LANES wins over the config file"""
    raw = os.environ.get(ENV_LANES)
    if raw:
        try:
            lanes = int(raw)
            if lanes >= 1:
                return lanes
        except ValueError:
            pass
        logger.warning(f"Ignoring invalid {ENV_LANES}={raw!r}")
    config = config or load_config()
    return int(config["experiment"]["lanes"])


def get(section: str, key: str, config: dict = None):
    config = config or load_config()
    return config[section][key]
