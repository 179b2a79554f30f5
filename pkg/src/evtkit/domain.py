"""Domain-of-attraction diagnostics and classification.

The module turns a distribution handle into tail evidence: derivative ratios
probing each of the three max limit types, the asymptotic moments R and W with
their Gumbel-domain ratio, a scaling probe of the survival function near the
upper endpoint, and normalizing sequences once a shape is known.  classify
aggregates the evidence into a verdict rather than trusting any single
criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .dist_core import (
    DistSpec,
    generalized_inverse,
    log_transform,
    norm_upper_quantile,
    survival,
)
from .regvar import (
    RvFit,
    RvProbe,
    Stabilized,
    limit_estimate,
    rv_index,
    tail_quad,
)

__all__ = [
    "LIMIT_TOL",
    "NormingPair",
    "AsymptoticMoments",
    "MomentRatioSweep",
    "VonMisesDiagnostics",
    "GammaPoint",
    "DomainVerdict",
    "asymptotic_R",
    "asymptotic_W",
    "gumbel_moment_ratio",
    "endpoint_grid",
    "von_mises",
    "gamma_variation_probe",
    "tail_rv_index",
    "norming_sequence",
    "gaussian_norming",
    "gamma_from_log_moment",
    "classify",
]

# Relative tolerance for declaring a diagnostic limit reached.
LIMIT_TOL = 0.02

# Survival values below this are numerically indistinguishable from zero and
# excluded from probe grids.
_SF_FLOOR = 1e-300


@dataclass(frozen=True)
class NormingPair:
    """Scale and center making the normalized maximum of n draws converge."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"scale must be positive, got {self.a}")


@dataclass(frozen=True)
class AsymptoticMoments:
    """First and second tail moments at one threshold, with their ratio."""

    x: float
    R: float
    W: float
    ratio: float


@dataclass(frozen=True)
class MomentRatioSweep:
    points: tuple[AsymptoticMoments, ...]
    limit: Stabilized


@dataclass(frozen=True)
class VonMisesDiagnostics:
    """Derivative-ratio traces toward the upper endpoint.

    Exactly one of frechet_ratio / weibull_ratio is populated, depending on
    whether the endpoint is infinite or finite.  Each trace is a sequence of
    (x, value) pairs with a companion limit estimate; a trace too short to
    judge gets an unsettled estimate.
    """

    frechet_ratio: tuple[tuple[float, float], ...]
    weibull_ratio: tuple[tuple[float, float], ...]
    gumbel_q: tuple[tuple[float, float], ...]
    gumbel_ell: tuple[tuple[float, float], ...]
    frechet_limit: Optional[Stabilized]
    weibull_limit: Optional[Stabilized]
    q_limit: Optional[Stabilized]
    ell_limit: Optional[Stabilized]


@dataclass(frozen=True)
class GammaPoint:
    """One probe of the exponential-decay ratio at threshold t.

    pre_asymptotic marks a probe whose shifted argument overran the upper
    endpoint; the ratio is reported as 0 there but carries no limit
    information.
    """

    t: float
    value: float
    pre_asymptotic: bool = False


@dataclass(frozen=True)
class DomainVerdict:
    """Classification outcome with the evidence that produced it."""

    kind: str
    gamma: Optional[float]
    alpha: Optional[float] = None
    beta: Optional[float] = None
    evidence: dict = field(default_factory=dict)
    confidence_notes: str = ""

    def __post_init__(self):
        if self.kind not in ("frechet", "weibull", "gumbel", "undetermined"):
            raise ValueError(f"unknown kind: {self.kind!r}")
        if self.kind == "frechet" and not (
            self.alpha is not None and self.alpha > 0 and self.gamma == 1.0 / self.alpha
        ):
            raise ValueError("frechet verdict requires alpha > 0 and gamma = 1/alpha")
        if self.kind == "weibull" and not (
            self.beta is not None and self.beta > 0 and self.gamma == -1.0 / self.beta
        ):
            raise ValueError("weibull verdict requires beta > 0 and gamma = -1/beta")
        if self.kind == "gumbel" and self.gamma != 0.0:
            raise ValueError("gumbel verdict requires gamma = 0")
        if self.kind == "undetermined" and self.gamma is not None:
            raise ValueError("undetermined verdict carries no gamma")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "gamma": self.gamma}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.beta is not None:
            out["beta"] = self.beta
        out["evidence"] = {
            key: [[float(x), float(v)] for x, v in trace]
            for key, trace in self.evidence.items()
        }
        return out


def asymptotic_R(spec: DistSpec, x: float) -> float:
    """Mean excess of the tail: integral of the survival past x over survival at x.

    Finite exactly when the tail has a first moment; a heavy tail with index
    at or below 1 raises.
    """
    if not x < spec.uep:
        raise ValueError("threshold must lie below the upper endpoint")
    sfx = survival(spec, x)
    if not sfx > 0:
        raise ValueError(f"survival vanishes at {x:g}")
    try:
        total = tail_quad(lambda t: survival(spec, t), x, spec.uep)
    except ValueError as exc:
        raise ValueError(f"tail integral past {x:g} does not converge") from exc
    if not math.isfinite(total):
        raise ValueError(f"tail integral past {x:g} does not converge")
    return total / sfx


def asymptotic_W(spec: DistSpec, x: float) -> float:
    """Second tail moment: the doubly integrated survival past x over survival at x.

    The double integral of the survival over {x <= u <= t} collapses to the
    single integral of (t - x)(1 - F(t)), which one adaptive pass handles;
    the nested form would force the inner quadrature to chase relative
    accuracy on values near the underflow floor.  Finite exactly when the
    tail has a second moment.
    """
    if not x < spec.uep:
        raise ValueError("threshold must lie below the upper endpoint")
    sfx = survival(spec, x)
    if not sfx > 0:
        raise ValueError(f"survival vanishes at {x:g}")
    try:
        total = tail_quad(lambda t: (t - x) * survival(spec, t), x, spec.uep)
    except ValueError as exc:
        raise ValueError(f"double tail integral past {x:g} does not converge") from exc
    if not math.isfinite(total):
        raise ValueError(f"double tail integral past {x:g} does not converge")
    return total / sfx


def endpoint_grid(spec: DistSpec) -> list[float]:
    """Probe abscissae approaching the upper endpoint.

    Infinite endpoint: decades 10^1..10^8 where the survival is still
    resolvable in double precision.  Finite endpoint: uep - 10^-k, k = 1..12.
    """
    if spec.uep == math.inf:
        grid = [
            x
            for x in (10.0 ** k for k in range(1, 9))
            if x > spec.lep and survival(spec, x) > _SF_FLOOR
        ]
    else:
        grid = [
            x
            for x in (spec.uep - 10.0 ** -k for k in range(1, 13))
            if x > spec.lep and survival(spec, x) > _SF_FLOOR
        ]
    if not grid:
        raise ValueError(f"no usable probe points below the endpoint of {spec.label}")
    return grid


def gumbel_moment_ratio(
    spec: DistSpec, x_grid: Sequence[float] | None = None
) -> MomentRatioSweep:
    """R, W and W/R^2 along a grid; the ratio tending to 1 signals the light-tailed domain."""
    grid = list(x_grid) if x_grid is not None else endpoint_grid(spec)
    pts = []
    for x in grid:
        R = asymptotic_R(spec, x)
        W = asymptotic_W(spec, x)
        ratio = W / (R * R) if R > 0 else math.nan
        pts.append(AsymptoticMoments(x=x, R=R, W=W, ratio=ratio))
    return MomentRatioSweep(
        points=tuple(pts),
        limit=limit_estimate([p.ratio for p in pts]),
    )


def _derivative_handles(
    spec: DistSpec,
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    # analytic handles when present; central differences on what exists otherwise
    if spec.density is not None:
        d = spec.density
    else:

        def d(x: float) -> float:
            h = max(1e-6, 1e-6 * abs(x))
            return (spec.cdf(x + h) - spec.cdf(x - h)) / (2.0 * h)

    if spec.density_derivative is not None:
        dd = spec.density_derivative
    elif spec.density is not None:
        base = spec.density

        def dd(x: float) -> float:
            h = max(1e-6, 1e-6 * abs(x))
            return (base(x + h) - base(x - h)) / (2.0 * h)

    else:

        def dd(x: float) -> float:
            h = max(1e-6, 1e-6 * abs(x))
            return (spec.cdf(x + h) - 2.0 * spec.cdf(x) + spec.cdf(x - h)) / (h * h)

    return d, dd


def von_mises(spec: DistSpec, x_grid: Sequence[float] | None = None) -> VonMisesDiagnostics:
    """Derivative-ratio diagnostics toward the upper endpoint.

    Infinite endpoint: x F'(x)/(1-F(x)), whose limit is the heavy-tail index.
    Finite endpoint: (uep-x) F'(x)/(1-F(x)), whose limit is the bounded-tail
    index.  Both cases also trace q = F''(1-F)/F'^2 (limit -1 in the
    light-tailed domain) and ell = F' R/(1-F) (limit 1 there).  Points where a
    ratio is not finite, or where the tail moment behind ell diverges, are
    dropped from the traces.
    """
    grid = list(x_grid) if x_grid is not None else endpoint_grid(spec)
    finite_top = spec.uep < math.inf
    d_fn, dd_fn = _derivative_handles(spec)

    frechet, weibull, qs, ells = [], [], [], []
    for x in grid:
        sf = survival(spec, x)
        if not sf > 0:
            continue
        d = d_fn(x)
        if not (math.isfinite(d) and d > 0):
            continue
        if finite_top:
            v = (spec.uep - x) * d / sf
            if math.isfinite(v):
                weibull.append((x, v))
        else:
            v = x * d / sf
            if math.isfinite(v):
                frechet.append((x, v))
        dd = dd_fn(x)
        if math.isfinite(dd):
            q = dd * sf / (d * d)
            if math.isfinite(q):
                qs.append((x, q))
        try:
            R = asymptotic_R(spec, x)
        except ValueError:
            R = math.nan
        if math.isfinite(R):
            ell = d * R / sf
            if math.isfinite(ell):
                ells.append((x, ell))

    def lim(trace):
        return limit_estimate([v for _, v in trace]) if trace else None

    return VonMisesDiagnostics(
        frechet_ratio=tuple(frechet),
        weibull_ratio=tuple(weibull),
        gumbel_q=tuple(qs),
        gumbel_ell=tuple(ells),
        frechet_limit=lim(frechet),
        weibull_limit=lim(weibull),
        q_limit=lim(qs),
        ell_limit=lim(ells),
    )


def gamma_variation_probe(
    spec: DistSpec, x: float, t_grid: Sequence[float] | None = None
) -> list[GammaPoint]:
    """Ratio (1 - F(R(t) x + t)) / (1 - F(t)) along thresholds t.

    In the light-tailed domain the values approach e^-x.  A probe whose
    shifted argument lands at or past the upper endpoint is reported as 0
    with pre_asymptotic set; only thresholds close enough to the endpoint
    keep the argument inside the support.
    """
    grid = list(t_grid) if t_grid is not None else endpoint_grid(spec)
    out = []
    for t in grid:
        sft = survival(spec, t)
        if not sft > 0:
            continue
        R = asymptotic_R(spec, t)
        arg = R * x + t
        if arg >= spec.uep:
            out.append(GammaPoint(t=t, value=0.0, pre_asymptotic=True))
        else:
            out.append(GammaPoint(t=t, value=survival(spec, arg) / sft))
    return out


def tail_rv_index(spec: DistSpec) -> RvFit:
    """Scaling exponent of the upper tail.

    Infinite endpoint: probes the survival function directly; a power tail
    with index alpha comes back as -alpha with near-zero dispersion.  Finite
    endpoint: probes x -> 1 - F(uep - 1/x), which turns endpoint behavior
    (uep - x)^beta into the exponent -beta.  A tail that is not regularly
    varying shows up as large dispersion, not as an error.
    """
    if spec.uep == math.inf:

        def U(x: float) -> float:
            return survival(spec, x)

    else:

        def U(x: float) -> float:
            return survival(spec, spec.uep - 1.0 / x)

    cands = [10.0 ** k for k in range(0, 9)]
    grid = [x for x in cands if U(x) > _SF_FLOOR and U(10.0 * x) > _SF_FLOOR]
    if not grid:
        raise ValueError(f"tail of {spec.label} is not resolvable on the probe grid")
    return rv_index(RvProbe(fn=U, x_grid=grid))


def norming_sequence(spec: DistSpec, gamma: float, n: int) -> NormingPair:
    """Scale and center for the maximum of n draws, given the shape.

    Heavy tail: divide by the upper 1/n quantile.  Bounded tail: gap to the
    endpoint at the same quantile, centered at the endpoint.  Light tail:
    quantile spacing between levels 1/n and 1/(ne), centered at the 1/n level.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if gamma > 0:
        return NormingPair(a=generalized_inverse(spec, 1.0 - 1.0 / n), b=0.0, n=n)
    if gamma < 0:
        if spec.uep == math.inf:
            raise ValueError("bounded-tail norming needs a finite upper endpoint")
        return NormingPair(
            a=spec.uep - generalized_inverse(spec, 1.0 - 1.0 / n), b=spec.uep, n=n
        )
    b = generalized_inverse(spec, 1.0 - 1.0 / n)
    a = generalized_inverse(spec, 1.0 - 1.0 / (n * math.e)) - b
    return NormingPair(a=a, b=b, n=n)


def gaussian_norming(n: int, exact: bool = False) -> NormingPair:
    """Norming for standard normal maxima.

    Default: the classical expansion
        b_n = (2 log n)^{1/2} - (log 4 pi + log log n) / (2 (2 log n)^{1/2}),
        a_n = (2 log n)^{-1/2}.
    exact=True instead takes the quantile-based pair: b_n at upper level 1/n,
    a_n the spacing to level 1/(n e), both from the high-precision quantile.
    """
    if n < 3:
        raise ValueError("need n >= 3 (log log n must be positive)")
    if exact:
        b = norm_upper_quantile(1.0 / n)
        a = norm_upper_quantile(1.0 / (n * math.e)) - b
        return NormingPair(a=a, b=b, n=n)
    two_log = 2.0 * math.log(n)
    root = math.sqrt(two_log)
    b = root - (math.log(4.0 * math.pi) + math.log(math.log(n))) / (2.0 * root)
    return NormingPair(a=1.0 / root, b=b, n=n)


def gamma_from_log_moment(
    spec: DistSpec, x_grid: Sequence[float] | None = None
) -> Stabilized:
    """Shape estimate from the mean tail excess of log X.

    For a heavy tail with index alpha the log transform has exponential-like
    excesses of size 1/alpha = gamma; light tails give 0.  Returned as a limit
    estimate along the grid.
    """
    G = log_transform(spec)
    if x_grid is not None:
        grid = list(x_grid)
    elif G.uep < math.inf:
        grid = [x for x in (G.uep - 10.0 ** -k for k in range(1, 13)) if x > G.lep]
    else:
        cands = [2.0 ** k for k in range(0, 40)]
        grid = [x for x in cands if x > G.lep and survival(G, x) > _SF_FLOOR][-8:]
    if not grid:
        raise ValueError(f"no usable probe points for {G.label}")
    vals = [asymptotic_R(G, x) for x in grid]
    return limit_estimate(vals)


def _power_candidate(
    rv: Optional[RvFit], vm: VonMisesDiagnostics, finite_top: bool
) -> Optional[float]:
    """Tail index supported by both the scaling probe and the matching ratio."""
    if rv is None:
        return None
    rho = rv.rho_est
    if not (rho < -0.01 and rv.dispersion < 0.05 * abs(rho) + 0.01):
        return None
    index = -rho
    corrob = vm.weibull_limit if finite_top else vm.frechet_limit
    if corrob is None or not math.isfinite(corrob.value):
        return None
    if abs(corrob.value - index) > 0.1 * index:
        return None
    return index


def classify(spec: DistSpec) -> DomainVerdict:
    """Decide the max-limit domain of a distribution from tail evidence.

    Order of the decision: a regularly varying tail (endpoint-transformed when
    the endpoint is finite) corroborated by the matching derivative ratio wins
    first and fixes the index; otherwise the light-tailed criteria are tried
    (q tending to -1, then the moment ratio tending to 1, either suffices);
    anything left is undetermined.  A scaling verdict and a light-tail hit
    together are trusted only when the scaling dispersion is tiny, since
    pure-power detection is exact while the light-tail criteria are
    asymptotic.
    """
    finite_top = spec.uep < math.inf
    notes = []

    vm = von_mises(spec)

    rv = None
    try:
        rv = tail_rv_index(spec)
    except ValueError as exc:
        notes.append(f"tail scaling probe unavailable: {exc}")

    evidence: dict = {}
    if vm.frechet_ratio:
        evidence["frechet_ratio"] = vm.frechet_ratio
    if vm.weibull_ratio:
        evidence["weibull_ratio"] = vm.weibull_ratio
    if vm.gumbel_q:
        evidence["gumbel_q"] = vm.gumbel_q
    if vm.gumbel_ell:
        evidence["gumbel_ell"] = vm.gumbel_ell
    if rv is not None:
        evidence["tail_rv"] = rv.per_multiplier

    power = _power_candidate(rv, vm, finite_top)

    q_hit = vm.q_limit is not None and abs(vm.q_limit.value + 1.0) <= LIMIT_TOL
    if q_hit and vm.q_limit is not None and not vm.q_limit.settled:
        notes.append("q criterion hit on a short trace (not flagged settled)")

    ratio_hit = False
    if power is None and not q_hit:
        # the moment ratio is the expensive backup criterion; only consulted
        # when the cheap routes have not already decided
        try:
            sweep = gumbel_moment_ratio(spec)
            evidence["moment_ratio"] = tuple((p.x, p.ratio) for p in sweep.points)
            ratio_hit = abs(sweep.limit.value - 1.0) <= LIMIT_TOL
        except ValueError as exc:
            notes.append(f"moment ratio unavailable: {exc}")

    gumbel_hit = q_hit or ratio_hit

    if power is not None and gumbel_hit:
        if rv is not None and rv.dispersion < 0.01:
            notes.append(
                "light-tail criterion also fired; trusting the near-exact scaling exponent"
            )
            gumbel_hit = False
        else:
            notes.append(
                "scaling exponent and light-tail criterion disagree with no exact winner"
            )
            return DomainVerdict(
                kind="undetermined",
                gamma=None,
                evidence=evidence,
                confidence_notes="; ".join(notes),
            )

    if power is not None:
        if finite_top:
            beta = power
            notes.append(f"endpoint-transformed tail scales with exponent -{beta:g}")
            return DomainVerdict(
                kind="weibull",
                gamma=-1.0 / beta,
                beta=beta,
                evidence=evidence,
                confidence_notes="; ".join(notes),
            )
        alpha = power
        notes.append(f"survival tail scales with exponent -{alpha:g}")
        return DomainVerdict(
            kind="frechet",
            gamma=1.0 / alpha,
            alpha=alpha,
            evidence=evidence,
            confidence_notes="; ".join(notes),
        )

    if gumbel_hit:
        which = "q -> -1" if q_hit else "W/R^2 -> 1"
        notes.append(f"light-tail criterion satisfied ({which})")
        return DomainVerdict(
            kind="gumbel",
            gamma=0.0,
            evidence=evidence,
            confidence_notes="; ".join(notes),
        )

    notes.append("no criterion reached its limit on the probe grids")
    return DomainVerdict(
        kind="undetermined",
        gamma=None,
        evidence=evidence,
        confidence_notes="; ".join(notes),
    )
