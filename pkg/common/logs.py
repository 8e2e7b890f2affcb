"""
Logging setup shared by the CLI and tests
"""

import logging
import sys

import coloredlogs

LOG_FORMAT = '%(asctime)s [%(name)s] %(message)s'


def setup_logging(level: str = "info"):
    """Install the console handler once; colored when stderr is a terminal"""
    level = level.upper()
    if sys.stderr.isatty():
        coloredlogs.install(level=level, fmt=LOG_FORMAT, stream=sys.stderr)
    else:
        logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
        logging.getLogger().setLevel(level)
