"""Exact-arithmetic laboratory for finitary Abel and Tauber theorems."""

from .errors import (
    AbelTauberError,
    BoundViolation,
    ConfigurationError,
    ResourceLimitError,
    SearchExhausted,
    SoundnessError,
)
from .exact import ceil_log2, format_rational, omega, parse_rational
from .gaps import GapFunction, Window, window_for
from .limits import Limits
from .metastability import Certificate, counterexample_gap, holds_on, least_metastable_N
from .rates import abel_rate, gamma_bound, monotone_metastability_bound, phi_points, psi_tail, tauber_rate
from .series import (
    CoefficientSequence,
    EvalPoint,
    PointFamily,
    eval_certified,
    eval_truncated,
    partial_sum,
    summation_by_parts,
)
from .specker import check_tauber_condition_32, transform_31, transform_32
from .theorems import (
    AbelInstance,
    TauberInstance,
    abel_conclusion_holds,
    abel_premise_holds,
    tauber_conclusion_holds,
    tauber_premise_holds,
)

__version__ = "0.1.0"
