"""Sandwiched Renyi divergences, optimized entropic quantities and their continuity bounds."""

__version__ = "0.1.0"

from .errors import DomainError, KernelError, NonConvergenceError, ParseError, VerificationError
from .linalg import PartitionedState, random_density, trace_distance
from .divergences import (INF, ONE, AlphaLimit, d_max, d_sandwiched, parse_alpha, q_geometric, q_petz,
                          q_sandwiched, superadditivity_counterexample, umegaki)
from .variational import (ConvexStateSet, OptimizerConfig, OptResult, cmi_nonvar, cmi_up,
                          cond_entropy_nonvar, cond_entropy_up, d_alpha_to_set, gen_mutual_info,
                          inf_order_quantities, mutual_info_nonvar, mutual_info_up, sep_distance)
from .cnorms import NormIndices, c_norm, c_norm_dual, verify_norm_laws
from .bounds import Approach, BoundParams, Quantity, bound_for_quantity, bound_generic, best_bound
from .markov import RecoveryKind, beta0, certify_amc, markov_gap, petz_recover

__all__ = [
    "__version__", "DomainError", "KernelError", "NonConvergenceError", "ParseError", "VerificationError",
    "PartitionedState", "random_density", "trace_distance",
    "INF", "ONE", "AlphaLimit", "parse_alpha", "d_sandwiched", "q_sandwiched", "q_petz", "q_geometric",
    "umegaki", "d_max", "superadditivity_counterexample",
    "ConvexStateSet", "OptimizerConfig", "OptResult", "d_alpha_to_set", "cond_entropy_up",
    "cond_entropy_nonvar", "mutual_info_up", "mutual_info_nonvar", "cmi_up", "cmi_nonvar",
    "gen_mutual_info", "sep_distance", "inf_order_quantities",
    "NormIndices", "c_norm", "c_norm_dual", "verify_norm_laws",
    "Approach", "BoundParams", "Quantity", "bound_generic", "bound_for_quantity", "best_bound",
    "RecoveryKind", "beta0", "certify_amc", "markov_gap", "petz_recover",
]
