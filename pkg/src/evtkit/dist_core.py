"""Distribution handles: builtins, numeric inversion, transforms, sampling.

A distribution enters the toolkit as a bundle of callables plus its support
endpoints.  Everything downstream (variation indices, domain diagnostics,
simulation) consumes only this bundle, so a user-supplied law participates on
equal footing with the builtins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import erfc, erfcinv

from .gev import GevParams, gev_cdf, gev_pdf, gev_quantile, gev_sf

__all__ = [
    "DistSpec",
    "SampleBatch",
    "GaussianTailBounds",
    "QUANTILE_TOL",
    "make_builtin",
    "parse_dist",
    "generalized_inverse",
    "survival",
    "log_transform",
    "norm_cdf",
    "norm_sf",
    "norm_quantile",
    "norm_upper_quantile",
    "gaussian_tail_bounds",
    "gaussian_quantile_expansion",
    "uniform_stream",
    "sample_iid",
]

# Bisection width at which numeric quantile inversion stops.
QUANTILE_TOL = 1e-12

# Bracket doubling for the generalized inverse gives up past this magnitude.
_BRACKET_LIMIT = 2.0 ** 64


@dataclass(frozen=True)
class DistSpec:
    """A distribution presented through its function handles.

    cdf is mandatory.  quantile, density and density_derivative are optional;
    consumers fall back to numeric inversion or differencing when a handle is
    absent, at a real accuracy cost near the tails.  lep and uep are the
    support endpoints (infinities allowed).

    sf is an optional accurate tail handle: double precision cannot represent
    1 - F below one rounding unit of 1 through the cdf, so tail diagnostics
    (survival below ~1e-16) are only meaningful when the distribution supplies
    the complement directly.  All builtins do.
    """

    cdf: Callable[[float], float]
    lep: float
    uep: float
    label: str
    quantile: Optional[Callable[[float], float]] = None
    density: Optional[Callable[[float], float]] = None
    density_derivative: Optional[Callable[[float], float]] = None
    sf: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if not self.lep < self.uep:
            raise ValueError(f"endpoints out of order: [{self.lep}, {self.uep}]")


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    seed: int
    label: str


@dataclass(frozen=True)
class GaussianTailBounds:
    x: float
    lower: float
    upper: float
    exact: float


def norm_cdf(x: float) -> float:
    """Standard normal distribution function via the complementary error function."""
    return 0.5 * erfc(-x / math.sqrt(2.0))


def norm_sf(x: float) -> float:
    """Standard normal survival function, accurate deep into the upper tail."""
    return 0.5 * erfc(x / math.sqrt(2.0))


def norm_quantile(u: float) -> float:
    if not 0.0 < u < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {u}")
    return -math.sqrt(2.0) * erfcinv(2.0 * u)


def norm_upper_quantile(s: float) -> float:
    """Point x with survival probability s, computed without forming 1 - s."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"survival level must lie in (0, 1), got {s}")
    return math.sqrt(2.0) * erfcinv(2.0 * s)


def _norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def make_builtin(family: str, *params: float) -> DistSpec:
    """Construct one of the reference distributions with analytic handles.

    Families: "exponential", "pareto" (index alpha), "uniform01",
    "std_normal", "gev" (gamma, loc, scale with loc and scale optional).
    """
    if family == "exponential":
        return DistSpec(
            cdf=lambda x: -math.expm1(-x) if x > 0 else 0.0,
            quantile=lambda u: -math.log1p(-u) if _check_u(u) else None,
            density=lambda x: math.exp(-x) if x > 0 else 0.0,
            density_derivative=lambda x: -math.exp(-x) if x > 0 else 0.0,
            sf=lambda x: math.exp(-x) if x > 0 else 1.0,
            lep=0.0,
            uep=math.inf,
            label="exponential",
        )
    if family == "pareto":
        if len(params) != 1:
            raise ValueError("pareto takes exactly one parameter (the tail index)")
        alpha = float(params[0])
        if not alpha > 0:
            raise ValueError("pareto index must be positive")
        return DistSpec(
            cdf=lambda x: 1.0 - x ** -alpha if x > 1.0 else 0.0,
            quantile=lambda u: math.exp(-math.log1p(-u) / alpha) if _check_u(u) else None,
            density=lambda x: alpha * x ** (-alpha - 1.0) if x > 1.0 else 0.0,
            density_derivative=lambda x: -alpha * (alpha + 1.0) * x ** (-alpha - 2.0)
            if x > 1.0
            else 0.0,
            sf=lambda x: x ** -alpha if x > 1.0 else 1.0,
            lep=1.0,
            uep=math.inf,
            label=f"pareto({alpha:g})",
        )
    if family == "uniform01":
        return DistSpec(
            cdf=lambda x: 0.0 if x < 0.0 else (1.0 if x > 1.0 else x),
            quantile=lambda u: u if _check_u(u) else None,
            density=lambda x: 1.0 if 0.0 < x < 1.0 else 0.0,
            density_derivative=lambda x: 0.0,
            sf=lambda x: 1.0 if x < 0.0 else (0.0 if x > 1.0 else 1.0 - x),
            lep=0.0,
            uep=1.0,
            label="uniform01",
        )
    if family == "std_normal":
        return DistSpec(
            cdf=norm_cdf,
            quantile=norm_quantile,
            density=_norm_pdf,
            density_derivative=lambda x: -x * _norm_pdf(x),
            sf=norm_sf,
            lep=-math.inf,
            uep=math.inf,
            label="std_normal",
        )
    if family == "gev":
        if not 1 <= len(params) <= 3:
            raise ValueError("gev takes (gamma[, loc[, scale]])")
        p = GevParams(*(float(v) for v in params))
        lep, uep = p.support()
        return DistSpec(
            cdf=lambda x: gev_cdf(p, x),
            quantile=lambda u: gev_quantile(p, u),
            density=lambda x: gev_pdf(p, x),
            density_derivative=lambda x: _gev_pdf_derivative(p, x),
            sf=lambda x: gev_sf(p, x),
            lep=lep,
            uep=uep,
            label=f"gev({p.gamma:g})",
        )
    raise ValueError(f"unknown family: {family!r}")


def _check_u(u: float) -> bool:
    if not 0.0 < u < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {u}")
    return True


def _gev_pdf_derivative(p: GevParams, x: float) -> float:
    """d/dx of the unified-family density.

    Written in the factored form -exp(-tau + (1+2g)L) * ((1+g) - tau) / scale^2
    with L = log tau, so the two diverging pieces never meet as inf - inf.
    """
    z = (x - p.loc) / p.scale
    if not math.isfinite(z):
        return math.nan if math.isnan(z) else 0.0
    s2 = p.scale * p.scale
    t = p.gamma * z
    if p.gamma == 0.0 or abs(t) < 1e-6:
        if z < -350.0:
            return 0.0
        w = math.exp(-z)
        return math.exp(-w - z) * (w - 1.0) / s2
    if 1.0 + t <= 0.0:
        return 0.0
    L = -math.log1p(t) / p.gamma
    if L > 700.0:
        return 0.0
    tau = math.exp(L)
    br = (1.0 + p.gamma) - tau
    e = -tau + (1.0 + 2.0 * p.gamma) * L
    if e > 709.0:
        return math.copysign(math.inf, -br) if br != 0.0 else 0.0
    return -math.exp(e) * br / s2


def generalized_inverse(spec: DistSpec, u: float) -> float:
    """Left-continuous inverse inf{x : F(x) >= u}.

    Uses the analytic quantile when the spec carries one; otherwise brackets
    by doubling from [-1, 1] and bisects to width QUANTILE_TOL (absolute, or
    relative for large arguments).
    """
    _check_u(u)
    if spec.quantile is not None:
        return spec.quantile(u)
    lo, hi = -1.0, 1.0
    while spec.cdf(hi) < u:
        hi *= 2.0
        if hi > _BRACKET_LIMIT:
            raise ValueError(f"no finite bracket for level {u} under {spec.label}")
    while spec.cdf(lo) >= u:
        lo *= 2.0
        if -lo > _BRACKET_LIMIT:
            raise ValueError(f"no finite bracket for level {u} under {spec.label}")
    # invariant: F(lo) < u <= F(hi)
    while hi - lo > QUANTILE_TOL * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if spec.cdf(mid) >= u:
            hi = mid
        else:
            lo = mid
    return hi


def survival(spec: DistSpec, x: float) -> float:
    """1 - F(x) clamped to [0, 1]; exact 1 and 0 beyond the endpoints.

    Served from the spec's accurate tail handle when present, since the
    difference 1 - cdf(x) cannot resolve tails below one rounding unit of 1.
    """
    if x < spec.lep:
        return 1.0
    if x >= spec.uep:
        return 0.0
    if spec.sf is not None:
        return min(1.0, max(0.0, spec.sf(x)))
    return min(1.0, max(0.0, 1.0 - spec.cdf(x)))


def log_transform(spec: DistSpec) -> DistSpec:
    """Distribution of log X for X following spec; requires a nonnegative support.

    The tail thins by exactly one exponential order: a power tail becomes
    Gumbel-domain material, which is what makes this the canonical bridge
    between the heavy and light tailed diagnostics.
    """
    if spec.lep < 0.0:
        raise ValueError("log transform needs a nonnegative lower endpoint")

    base_q = spec.quantile

    def cdf(y: float) -> float:
        if y >= 700.0:
            return 1.0
        return spec.cdf(math.exp(y))

    def quantile(u: float) -> float:
        x = base_q(u) if base_q is not None else generalized_inverse(spec, u)
        if x <= 0.0:
            return -math.inf
        return math.log(x)

    density = None
    if spec.density is not None:
        base_d = spec.density

        def density(y: float) -> float:
            if y >= 700.0:
                return 0.0
            ey = math.exp(y)
            return base_d(ey) * ey

    ddensity = None
    if spec.density is not None and spec.density_derivative is not None:
        base_d2, base_dd = spec.density, spec.density_derivative

        def ddensity(y: float) -> float:
            if y >= 700.0:
                return 0.0
            ey = math.exp(y)
            return (base_dd(ey) * ey + base_d2(ey)) * ey

    sf = None
    if spec.sf is not None:
        base_sf = spec.sf

        def sf(y: float) -> float:
            if y >= 700.0:
                return 0.0
            return base_sf(math.exp(y))

    return DistSpec(
        cdf=cdf,
        quantile=quantile,
        density=density,
        density_derivative=ddensity,
        sf=sf,
        lep=math.log(spec.lep) if spec.lep > 0.0 else -math.inf,
        uep=math.log(spec.uep) if spec.uep < math.inf else math.inf,
        label=f"log[{spec.label}]",
    )


def gaussian_tail_bounds(x: float) -> GaussianTailBounds:
    """Two-sided envelope for the standard normal upper tail at x > 0.

    With c = e^{-x^2/2} / sqrt(2 pi) the survival function is pinched:
        c * (1/x - 1/x^2)  <=  1 - Phi(x)  <=  c / x.
    """
    if not x > 0:
        raise ValueError("bounds hold for x > 0")
    c = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return GaussianTailBounds(
        x=x,
        lower=c * (1.0 / x - 1.0 / (x * x)),
        upper=c / x,
        exact=norm_sf(x),
    )


def gaussian_quantile_expansion(s: float) -> float:
    """Asymptotic upper quantile of the standard normal at survival level s.

    First-order inversion of the tail: with u = sqrt(-2 log s),
        x ~ u - (log(4 pi) + log(-2 log s)) / (2 u).
    Intended for small s; refuses s >= 0.05 where the expansion is meaningless.
    """
    if not 0.0 < s < 0.05:
        raise ValueError("expansion is for small survival levels (0 < s < 0.05)")
    v = -2.0 * math.log(s)
    u = math.sqrt(v)
    return u - (math.log(4.0 * math.pi) + math.log(v)) / (2.0 * u)


def uniform_stream(seed: int, rep: Optional[int] = None) -> np.random.Generator:
    """Counter-based generator; rep spawns a disjoint stream for one replicate."""
    key = () if rep is None else (rep,)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def sample_iid(spec: DistSpec, n: int, seed: int) -> SampleBatch:
    """n independent draws by quantile transformation of uniforms."""
    if n < 1:
        raise ValueError("need n >= 1")
    rng = uniform_stream(seed)
    u = rng.random(n)
    # 0.0 is a possible output of random(); keep levels strictly inside (0, 1)
    u = np.maximum(u, 2.0 ** -64)
    if spec.quantile is not None:
        vals = np.array([spec.quantile(float(v)) for v in u])
    else:
        vals = np.array([generalized_inverse(spec, float(v)) for v in u])
    return SampleBatch(values=vals, seed=seed, label=spec.label)


_GEV_PREFIX = "gev:"
_PARETO_PREFIX = "pareto:"


def parse_dist(token: str) -> DistSpec:
    """Parse the distribution mini-language used by the command line.

    Grammar: "exp" | "uniform" | "normal" | "pareto:<alpha>" |
    "gev:<gamma>[,<loc>[,<scale>]]".
    """
    tok = token.strip()
    if tok == "exp":
        return make_builtin("exponential")
    if tok == "uniform":
        return make_builtin("uniform01")
    if tok == "normal":
        return make_builtin("std_normal")
    if tok.startswith(_PARETO_PREFIX):
        body = tok[len(_PARETO_PREFIX):]
        try:
            alpha = float(body)
        except ValueError:
            raise ValueError(f"bad pareto parameter: {body!r}") from None
        return make_builtin("pareto", alpha)
    if tok.startswith(_GEV_PREFIX):
        body = tok[len(_GEV_PREFIX):]
        parts = body.split(",")
        if not 1 <= len(parts) <= 3:
            raise ValueError(f"gev takes 1 to 3 comma-separated numbers, got {body!r}")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"bad gev parameter list: {body!r}") from None
        return make_builtin("gev", *vals)
    raise ValueError(f"unknown distribution token: {token!r}")
