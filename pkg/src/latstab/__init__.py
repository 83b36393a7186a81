"""Stability invariants of unimodular lattices and the volume constants
around them: exact lattice linear algebra, per-rank minimal covolumes and
the stability predicate, random lattice samplers, and Monte Carlo checks of
the closed-form integral values."""

from .constants import (
    ConstantsRow,
    LemmaRow,
    RankinRow,
    alpha_from_gamma,
    b_constant_log,
    c_effective,
    constants_row,
    gamma_from_alpha,
    hermite_constant,
    hermite_upper,
    lemma_bound_check,
    r_constant,
    rankin_row,
    t_threshold,
    theorem_bound_log,
    thunder_integral_log,
    unit_ball_volume,
    zeta,
)
from .errors import (
    BudgetExceededError,
    DegenerateBasisError,
    InvariantViolationError,
    LatticeError,
    LatticeParseError,
)
from .lattice import (
    ClosestVector,
    Lattice,
    Sublattice,
    canonical_form,
    closest_vector,
    dual,
    enumerate_short_vectors,
    format_lattice_text,
    gram,
    lll_reduce,
    parse_lattice_text,
    read_lattice,
    saturate,
    saturation_index,
    subgroup_covolume,
    sublattice,
    vector_norm,
    write_lattice,
)
from .sampling import (
    SamplerSpec,
    exact_2d_acceptance_rate,
    exact_2d_y_cdf,
    gm_basis,
    sample_exact_2d,
    sample_gaussian_baseline,
    sample_gm,
    sample_lattice,
)
from .siegel import (
    MassResult,
    McEstimate,
    NormalizationReport,
    QuantileReport,
    ScalingCheck,
    TensorCount,
    alpha_quantiles,
    mc_integral,
    normalization_ratio,
    scaling_ratio,
    siegel_transform_count,
    stability_mass,
)
from .stability import (
    AlphaProfile,
    CovradEstimate,
    PolygonPoint,
    alpha,
    alpha_profile,
    covrad_lower,
    in_s_k,
    is_stable,
    min_covolume,
)

__version__ = "0.1.0"
