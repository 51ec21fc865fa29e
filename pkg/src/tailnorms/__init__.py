"""Numerical laboratory for Lebesgue, Grand Lebesgue, Orlicz and Lorentz norms,
and for a disjoint-block process whose supremum has a heavier tail than any
single coordinate."""

from .measure import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    UnitIntervalFunction,
    block,
    block_union,
    constant,
    evaluate_block_union,
    from_callable,
    indicator,
    integrate,
    sqrt_log,
)
from .counterexample import (
    CounterexampleProcess,
    MetricSpaceT,
    ProcessSpec,
    asymptotic_table,
    build_spec,
    sup_lp_series,
    symmetrize,
    weaker_norm_divergence,
)
from .norms import (
    LorentzWeight,
    NormReport,
    distribution_function,
    gls_norm,
    lorentz_norm,
    lp_norm,
    luxemburg_norm,
)
from .psi import (
    PsiFunction,
    YoungFunction,
    constant_psi,
    degenerate,
    gls_weaker,
    make_natural_psi,
    orlicz_weaker,
    power_singular,
    sqrt_psi,
    young_exp,
    young_exp_square,
    young_power,
)

__version__ = "0.1.0"
