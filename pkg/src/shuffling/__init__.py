"""Shuffling algorithms, interlacing particle dynamics and exact oracles for random tilings."""

__version__ = "0.1.0"

from .aztec import AztecTiling, LineEnsemble, sample_aztec, sample_aztec_q, shuffle_step, tiling_to_lines
from .gt import ContractError, GTPattern, WeylConfig
from .tower import TowerMatching, build_tower, sample_tower, tower_shuffle_step

__all__ = [
    "AztecTiling",
    "ContractError",
    "GTPattern",
    "LineEnsemble",
    "TowerMatching",
    "WeylConfig",
    "build_tower",
    "sample_aztec",
    "sample_aztec_q",
    "sample_tower",
    "shuffle_step",
    "tiling_to_lines",
    "tower_shuffle_step",
]
