"""Numerical toolkit for free interpolation in the Nevanlinna and Smirnov classes.

Sequences in the unit disk are stored in polar form with the gap 1 - |z|
kept exactly, so points very close to the circle stay distinguishable.
"""

from .certificates import (
    Certificate,
    certify_cs,
    certify_dirac,
    certify_maximal,
    certify_propsep,
    certify_staircase_radial,
    garnett_precondition,
    garnett_split,
    noouter_bound,
    trace_membership,
    verify_majorant,
)
from .errors import (
    FreeInterpError,
    InvalidPoint,
    DuplicatePoint,
    NonFinite,
    CapacityExceeded,
    Underflow,
    HypothesisViolated,
    DegenerateWeight,
    GridTooCoarse,
    NotRadial,
    ModeMismatch,
    ArcsOverlap,
    NumericAccuracyWarning,
)
from .geometry import DiskPoint, log_blaschke_at, log_delta, mobius, pseudo_hyperbolic
from .orlicz import OrliczFunction, build_orlicz_example, check_growth, orlicz_sufficiency_check
from .potential import Measure, StepWeight, maximal_function, poisson_extend
from .sequences import (
    Sequence,
    attach_partner_points,
    classify,
    gen_disjoint_tangent,
    gen_radial,
    gen_random_separated,
    gen_stolz,
    split_four_families,
)

__version__ = "0.1.0"

__all__ = [
    "FreeInterpError", "InvalidPoint", "DuplicatePoint", "NonFinite", "CapacityExceeded", "Underflow", "HypothesisViolated",
    "DegenerateWeight", "GridTooCoarse", "NotRadial", "ModeMismatch", "ArcsOverlap", "NumericAccuracyWarning",
    "Certificate", "certify_cs", "certify_dirac", "certify_maximal", "certify_propsep",
    "certify_staircase_radial", "garnett_precondition", "garnett_split", "noouter_bound",
    "trace_membership", "verify_majorant",
    "DiskPoint", "log_blaschke_at", "log_delta", "mobius", "pseudo_hyperbolic",
    "OrliczFunction", "build_orlicz_example", "check_growth", "orlicz_sufficiency_check",
    "Measure", "StepWeight", "maximal_function", "poisson_extend",
    "Sequence", "attach_partner_points", "classify", "gen_disjoint_tangent", "gen_radial",
    "gen_random_separated", "gen_stolz", "split_four_families",
]
