"""Minimum-weight perfect matching by determinants over F2[X]/(X^w_th)."""

from .poly_gf2 import TruncatedPoly, monomial
from .graph_model import (
    DetectorGraph,
    PathGraph,
    WeightFunction,
    build_path_graph,
    discretize,
    full_precision,
    scale_for_precision,
)
from .det_decoder import (
    DecodeOutcome,
    PerturbedWeights,
    Scheme,
    Status,
    decode,
    default_w_max,
    perturb,
)
from .heuristic import HeuristicConfig, multi_trial_decode, variable_precision_decode

__all__ = [
    "TruncatedPoly", "monomial",
    "DetectorGraph", "PathGraph", "WeightFunction", "build_path_graph", "discretize",
    "full_precision", "scale_for_precision",
    "DecodeOutcome", "PerturbedWeights", "Scheme", "Status", "decode", "default_w_max", "perturb",
    "HeuristicConfig", "multi_trial_decode", "variable_precision_decode",
]

__version__ = "0.1.0"
