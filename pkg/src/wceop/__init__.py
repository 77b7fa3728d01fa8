"""Weighted conditional expectation operators ``T = M_w E M_u`` on finite
measure spaces, with matrix oracles and structural verdicts."""

from .condexp import cond_exp, cond_exp_matrix
from .exceptions import (
    DimensionError,
    NotInvertibleError,
    PreconditionError,
    SingularMatrixError,
    UnsupportedExponentError,
    WceError,
)
from .measure import (
    FiniteMeasureSpace,
    SigmaSubalgebra,
    indicator,
    is_A_measurable,
    is_measurable,
    lp_norm,
    smallest_A_set_containing,
    smallest_measurable_superset,
    support,
)
from .operator import (
    CesaroWeights,
    WceOperator,
    power_closed_form,
    spectral_radius_formula,
)
from .oracle import (
    RankResult,
    hermitian_sqrt,
    invert,
    polar_aluthge,
    rank_and_bases,
    realize,
    two_norm,
)
from .rng import XorShiftRng, instance_seed, splitmix64
from .scenario import GeneratorConfig, generate, generate_instance, load_scenario, save_scenario
from .structure import (
    ChainReport,
    Discrepancy,
    cesaro_bounded_analysis,
    chain_report,
    decomposition_theorem_check,
    i_minus_t_analysis,
    lemma_norm_check,
    power_bounded_analysis,
    quasi_complement_check,
    verify_ascent_theorem,
    verify_corollary_sums,
    verify_descent_theorem,
)

__version__ = "0.1.0"
