"""Generalized extreme value family and the affine type algebra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

__all__ = [
    "GevParams",
    "TypeRelation",
    "ClassicType",
    "LimitCheck",
    "gev_cdf",
    "gev_sf",
    "gev_pdf",
    "gev_quantile",
    "gumbel_cdf",
    "frechet_cdf",
    "weibull_cdf",
    "classic_from_gev",
    "type_params_from_quantiles",
    "norming_limit_check",
]

# Below this threshold on gamma*z the power form (1 + gamma*z)^(-1/gamma)
# is evaluated on the exact Gumbel branch; cancellation in log1p(g z)/g is
# the constraint, not speed.
_GUMBEL_SWITCH = 1e-9


@dataclass(frozen=True)
class GevParams:
    """Shape, location and scale of the unified max limit law.

    The distribution function is exp(-(1 + gamma*z)^(-1/gamma)) in the
    standardized argument z = (x - loc)/scale, extended by continuity to
    exp(-e^-z) at gamma = 0.
    """

    gamma: float
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def support(self) -> tuple[float, float]:
        """Endpoints of the region 1 + gamma*(x - loc)/scale >= 0."""
        if self.gamma > 0:
            return self.loc - self.scale / self.gamma, math.inf
        if self.gamma < 0:
            return -math.inf, self.loc - self.scale / self.gamma
        return -math.inf, math.inf


@dataclass(frozen=True)
class TypeRelation:
    """Affine change of argument relating two laws of the same type.

    The convention is H2(x) = H1(A*x + B) with A > 0.
    """

    A: float
    B: float

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"A must be positive, got {self.A}")

    def apply(self, x: float) -> float:
        return self.A * x + self.B

    def inverse(self) -> "TypeRelation":
        return TypeRelation(1.0 / self.A, -self.B / self.A)

    def compose(self, other: "TypeRelation") -> "TypeRelation":
        """Relation x -> self(other(x))."""
        return TypeRelation(self.A * other.A, self.A * other.B + self.B)


def gev_cdf(p: GevParams, x: float) -> float:
    """Distribution function of the unified family, stable through gamma -> 0.

    Outside the support the value is 0 on the heavy-tailed side and exactly 1
    at and beyond the finite upper endpoint of the bounded side.
    """
    z = (x - p.loc) / p.scale
    if math.isnan(z):
        return math.nan
    t = p.gamma * z
    if p.gamma == 0.0 or abs(t) < _GUMBEL_SWITCH:
        if z == math.inf:
            return 1.0
        if z < -700.0:
            return 0.0
        return math.exp(-math.exp(-z))
    if 1.0 + t <= 0.0:
        return 0.0 if p.gamma > 0 else 1.0
    logtau = -math.log1p(t) / p.gamma
    if logtau > 700.0:
        return 0.0
    return math.exp(-math.exp(logtau))


def gev_sf(p: GevParams, x: float) -> float:
    """Survival function 1 - gev_cdf(p, x), accurate deep in the upper tail.

    Where the cdf is within one rounding unit of 1 the difference 1 - cdf
    collapses to 0; this form keeps the exact magnitude by expm1.
    """
    z = (x - p.loc) / p.scale
    if math.isnan(z):
        return math.nan
    t = p.gamma * z
    if p.gamma == 0.0 or abs(t) < _GUMBEL_SWITCH:
        if z == math.inf:
            return 0.0
        if z < -700.0:
            return 1.0
        return -math.expm1(-math.exp(-z))
    if 1.0 + t <= 0.0:
        return 1.0 if p.gamma > 0 else 0.0
    logtau = -math.log1p(t) / p.gamma
    if logtau > 700.0:
        return 1.0
    return -math.expm1(-math.exp(logtau))


def gev_pdf(p: GevParams, x: float) -> float:
    """Density of the unified family, zero off the support."""
    z = (x - p.loc) / p.scale
    if not math.isfinite(z):
        return math.nan if math.isnan(z) else 0.0
    t = p.gamma * z
    if p.gamma == 0.0 or abs(t) < _GUMBEL_SWITCH:
        if z < -700.0:
            return 0.0
        w = math.exp(-z)
        return math.exp(-w - z) / p.scale
    if 1.0 + t <= 0.0:
        if 1.0 + t < 0.0 or p.gamma > 0:
            return 0.0
        # exactly at the finite upper endpoint the factor tau^(1+gamma) decides
        if p.gamma == -1.0:
            return 1.0 / p.scale
        return 0.0 if p.gamma > -1.0 else math.inf
    logtau = -math.log1p(t) / p.gamma
    if logtau > 700.0:
        return 0.0
    tau = math.exp(logtau)
    e = -tau + (1.0 + p.gamma) * logtau
    if e > 709.0:
        return math.inf
    return math.exp(e) / p.scale


def gev_quantile(p: GevParams, u: float) -> float:
    """Inverse of gev_cdf on (0, 1)."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {u}")
    w = -math.log(u)
    if p.gamma == 0.0:
        return p.loc - p.scale * math.log(w)
    # ((w^-gamma) - 1)/gamma written through expm1 to stay stable for small gamma
    return p.loc + p.scale * math.expm1(-p.gamma * math.log(w)) / p.gamma


def gumbel_cdf(x: float) -> float:
    """Standard Gumbel distribution function exp(-e^-x)."""
    if x < -700.0:
        return 0.0
    return math.exp(-math.exp(-x))


def frechet_cdf(alpha: float, x: float) -> float:
    """Standard Frechet distribution function exp(-x^-alpha), zero for x <= 0."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if x <= 0.0:
        return 0.0
    return math.exp(-(x ** -alpha))


def weibull_cdf(beta: float, x: float) -> float:
    """Standard bounded-tail distribution function exp(-(-x)^beta), one for x >= 0."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if x >= 0.0:
        return 1.0
    return math.exp(-((-x) ** beta))


@dataclass(frozen=True)
class ClassicType:
    """One of the three classical max limit laws and its link to the unified form.

    relation carries the (A, B) with G_gamma(x) = classic(A*x + B) for the
    standard shape-gamma law (loc 0, scale 1).
    """

    kind: str
    index: float | None
    relation: TypeRelation

    def cdf(self, x: float) -> float:
        if self.kind == "frechet":
            return frechet_cdf(self.index, x)
        if self.kind == "weibull":
            return weibull_cdf(self.index, x)
        return gumbel_cdf(x)


def classic_from_gev(gamma: float) -> ClassicType:
    """Map a shape to its classical type with the affine argument change.

    Positive shapes are heavy-tailed with index 1/gamma, negative shapes are
    bounded with index -1/gamma, and zero is the light-tailed middle case
    with the identity relation.
    """
    if gamma > 0:
        return ClassicType("frechet", 1.0 / gamma, TypeRelation(gamma, 1.0))
    if gamma < 0:
        return ClassicType("weibull", -1.0 / gamma, TypeRelation(-gamma, -1.0))
    return ClassicType("gumbel", None, TypeRelation(1.0, 0.0))


def type_params_from_quantiles(
    h_inv: Callable[[float], float],
    g_inv: Callable[[float], float],
    u1: float,
    u2: float,
) -> TypeRelation:
    """Recover the affine relation H(A*x + B) = G(x) from two quantile levels.

    Parameters
    ----------
    h_inv, g_inv : callables
        Quantile functions of the reference law H and the transformed law G.
    u1, u2 : floats
        Two levels with 0 < u1 < u2 < 1 at which both quantiles are probed.

    Returns
    -------
    TypeRelation
        The pair (A, B) such that H(A*x + B) matches G(x); equivalently the
        quantiles satisfy h_inv(u) = A*g_inv(u) + B.
    """
    if not (0.0 < u1 < u2 < 1.0):
        raise ValueError("need 0 < u1 < u2 < 1")
    h1, h2 = h_inv(u1), h_inv(u2)
    g1, g2 = g_inv(u1), g_inv(u2)
    dh = h2 - h1
    if dh == 0.0:
        raise ValueError("h_inv is degenerate between the probe levels")
    a = (g2 - g1) / dh
    if not a > 0:
        raise ValueError("quantile spreads must share their sign and be nonzero")
    A = 1.0 / a
    return TypeRelation(A, h1 - A * g1)


class LimitCheck(NamedTuple):
    A: float
    B: float
    stabilized: bool


def _pair(p) -> tuple[float, float]:
    # accept NormingPair-like objects and plain (a, b) sequences
    a = getattr(p, "a", None)
    if a is not None:
        return float(p.a), float(p.b)
    return float(p[0]), float(p[1])


def _settled(vals: Sequence[float], rtol: float) -> bool:
    if len(vals) < 3:
        return False
    v1, v2, v3 = vals[-3:]
    if not all(math.isfinite(v) for v in (v1, v2, v3)):
        return False
    scale = max(abs(v1), abs(v2), abs(v3))
    if scale == 0.0:
        return True
    return abs(v1 - v2) <= rtol * scale and abs(v2 - v3) <= rtol * scale


def norming_limit_check(base, alt, rtol: float = 1e-3) -> LimitCheck:
    """Estimate the type constants relating two norming sequences.

    base supplies pairs (a_n, b_n) and alt supplies (alpha_n, beta_n) on the
    same index grid.  When both sequences norm the same maxima, the ratios
    alpha_n/a_n and (beta_n - b_n)/a_n tend to the constants (A, B) of the
    affine relation between the two limits.  The estimates are the ratios at
    the last index; stabilized means the last three of each agree within
    relative rtol.
    """
    if len(base) != len(alt):
        raise ValueError("sequences must cover the same index grid")
    if len(base) == 0:
        raise ValueError("empty sequences")
    A_seq, B_seq = [], []
    for pb, pa in zip(base, alt):
        a, b = _pair(pb)
        aa, bb = _pair(pa)
        if not a > 0:
            raise ValueError("base scale must be positive")
        A_seq.append(aa / a)
        B_seq.append((bb - b) / a)
    ok = _settled(A_seq, rtol) and _settled(B_seq, rtol)
    return LimitCheck(A_seq[-1], B_seq[-1], ok)
