"""Numerical extreme value theory.

The toolkit covers the unified max limit family and its type algebra (gev),
distribution handles with sampling and transforms (dist_core), regular and
pi-variation functionals (regvar), domain-of-attraction diagnostics and
norming sequences (domain), and a Monte Carlo maxima laboratory (simlab).
A command-line front end lives in cli.
"""

from .dist_core import (
    DistSpec,
    GaussianTailBounds,
    SampleBatch,
    gaussian_quantile_expansion,
    gaussian_tail_bounds,
    generalized_inverse,
    log_transform,
    make_builtin,
    norm_cdf,
    norm_quantile,
    norm_sf,
    norm_upper_quantile,
    parse_dist,
    sample_iid,
    survival,
    uniform_stream,
)
from .domain import (
    AsymptoticMoments,
    DomainVerdict,
    GammaPoint,
    MomentRatioSweep,
    NormingPair,
    VonMisesDiagnostics,
    asymptotic_R,
    asymptotic_W,
    classify,
    endpoint_grid,
    gamma_from_log_moment,
    gamma_variation_probe,
    gaussian_norming,
    gumbel_moment_ratio,
    norming_sequence,
    tail_rv_index,
    von_mises,
)
from .gev import (
    ClassicType,
    GevParams,
    LimitCheck,
    TypeRelation,
    classic_from_gev,
    frechet_cdf,
    gev_cdf,
    gev_pdf,
    gev_quantile,
    gumbel_cdf,
    norming_limit_check,
    type_params_from_quantiles,
    weibull_cdf,
)
from .regvar import (
    RvFit,
    RvProbe,
    Stabilized,
    adaptive_quad,
    dehaan_g,
    default_probe_grid,
    karamata_B,
    karamata_b,
    limit_estimate,
    pi_variation_ratio,
    pi_variation_sweep,
    rv_index,
    sv_uniform_ratio,
    tail_quad,
)
from .simlab import (
    ConvergenceReport,
    MalmquistResult,
    MaxRun,
    analytic_sup_distance,
    empirical_sup_distance,
    ks_statistic,
    malmquist_spacings,
    scheffe_tv,
    simulate_maxima,
)

__version__ = "0.1.0"
