"""tabcop: margin-free dependence analysis for two-way probability tables.

The dependence structure of a bivariate discrete distribution is what
survives rescaling of its rows and columns: the support pattern together
with the odds-ratio matrix.  This package extracts that structure,
represents it by the unique uniform-margin table of the class (the copula
pmf, found by iterative proportional fitting), rebuilds distributions
from (margins, copula) pairs, and generates parametric discrete copula
families along with density grids of their infinite-support limits.
"""

from tabcop.bernoulli import (
    bernoulli_copula,
    odds_ratio,
    perturb,
    reconstruct,
    tau_b_2x2,
    upsilon_from_omega,
)
from tabcop.dependence import (
    OddsRatioMatrix,
    completed_odds_matrix,
    frechet_bounds,
    odds_ratio_matrix,
    yule_upsilon,
)
from tabcop.errors import (
    DegenerateError,
    DimensionMismatchError,
    DomainError,
    EmptyTableError,
    InfeasibleError,
    NonConvergenceError,
    NotACopulaError,
    ParamError,
    ParseError,
    TabcopError,
    UndefinedEntryError,
    ValidationError,
    ZeroMarginError,
)
from tabcop.families import (
    ContinuousCopulaSpec,
    binomial_copula,
    bivariate_binomial_pmf,
    copula_cdf,
    discretize_copula,
    fgm_pmf,
    goodman_copula,
    parse_family_spec,
    truncated_geometric_copula,
    truncated_geometric_pmf,
)
from tabcop.infinite import (
    DensityGrid,
    bivariate_poisson_pmf,
    couple_countable_margins,
    geometric_copula_grid,
    poisson_copula_grid,
    truncated_poisson_margin,
)
from tabcop.pmf_core import (
    JointPmf,
    MarginPair,
    SupportPattern,
    from_counts,
    is_copula_pmf,
    margins,
    parse_table,
    support,
)
from tabcop.scaling import (
    IPF_BACKEND,
    FeasibilityClass,
    ScalingDiagnostics,
    apply_marginal_distortion,
    classify_existence,
    copula_pmf,
    couple,
    ipf_fit,
    same_nucleus,
)
from tabcop.viz import ConfettiOptions, confetti_svg, heatmap_ppm

__version__ = "0.1.0"
