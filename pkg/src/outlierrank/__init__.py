"""Rank distributions for independent normals with a single outlier."""

__version__ = "0.1.0"

from .classical import (  # noqa: E402
    GammaRaceModel,
    Ranking,
    TaylorConfig,
    all_rankings,
    blom_scores,
    exp_rank_prob,
    gamma_lattice_size,
    gamma_outlier_to_normal,
    gamma_rank_prob,
    gumbel_rank_prob,
    normal_rank_prob_quadrature,
    taylor_rank_prob,
)
from .errors import (  # noqa: E402
    BoundaryError,
    ComplexityError,
    DimensionError,
    DomainError,
    InfiniteQuantileError,
    NumericalIntegrityError,
    OutlierRankError,
    PatternError,
    QueryError,
)
from .latent import (  # noqa: E402
    BetaSurrogate,
    LatentSuccessLaw,
    OutlierModel,
    VarianceBreakdown,
    beta_surrogate,
    log_z_variance,
    z_cdf,
    z_density,
    z_mean,
    z_quantile,
    z_raw_moment,
    z_variance,
)
from .metrics import (  # noqa: E402
    QuantileFunction,
    beta_quantile_function,
    latent_quantile_function,
    w1_discrete,
    w2_continuous,
    w2_latent_vs_surrogate,
    w2_surrogate_map,
)
from .montecarlo import (  # noqa: E402
    EmpiricalRankingTable,
    EmpiricalRankTable,
    GenericModel,
    SimConfig,
    sample_z,
    simulate_outlier_ranks,
    simulate_rankings,
)
from .ranks import (  # noqa: E402
    ExtremeProbs,
    JointRankQuery,
    RankMoments,
    RankPmf,
    RegimeReport,
    asymptotic_regime_check,
    extreme_probs,
    in_group_marginal,
    joint_prob,
    r0_pmf_exact,
    r0_pmf_surrogate,
    rank_moments,
)
