"""Exact finite computations for a Tsirelson-based hereditarily indecomposable space."""

import sys

# Exact certificates print rationals such as 2^-98308 in full.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

from .config import FAITHFUL, SCALED, ConfigError, InfeasibleAtBudget, SpaceConfig
from .vectors import BlockSequence, IndexInterval, RationalVector

__all__ = [
    "FAITHFUL", "SCALED", "ConfigError", "InfeasibleAtBudget", "SpaceConfig",
    "BlockSequence", "IndexInterval", "RationalVector",
]
__version__ = "0.1.0"
