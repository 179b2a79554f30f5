"""Regular variation toolkit.

Index estimation from scaling ratios, the Karamata mean functionals b and B,
de Haan's g for pi-variation, and the uniform-ratio diagnostic for slow
variation.  All limits "as x tends to infinity" are operationalized the same
way: evaluate on a geometric grid, report the last value, and flag
stabilization when the last three agree to relative 1e-3.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad

__all__ = [
    "INTEGRAL_TOL",
    "Stabilized",
    "RvProbe",
    "RvFit",
    "limit_estimate",
    "default_probe_grid",
    "rv_index",
    "adaptive_quad",
    "tail_quad",
    "karamata_b",
    "karamata_B",
    "dehaan_g",
    "pi_variation_ratio",
    "pi_variation_sweep",
    "sv_uniform_ratio",
]

INTEGRAL_TOL = 1e-10


class Stabilized(NamedTuple):
    """A limit estimate with a convergence flag."""

    value: float
    settled: bool


def limit_estimate(values: Sequence[float], rtol: float = 1e-3) -> Stabilized:
    """Last value of a sequence, flagged settled when the last three agree.

    Agreement is relative to the largest magnitude among the last three;
    an identically-zero tail counts as settled.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("empty sequence")
    if len(vals) < 3:
        return Stabilized(vals[-1], False)
    v1, v2, v3 = vals[-3:]
    if not all(math.isfinite(v) for v in (v1, v2, v3)):
        return Stabilized(vals[-1], False)
    scale = max(abs(v1), abs(v2), abs(v3))
    if scale == 0.0:
        return Stabilized(0.0, True)
    ok = abs(v1 - v2) <= rtol * scale and abs(v2 - v3) <= rtol * scale
    return Stabilized(vals[-1], ok)


def default_probe_grid(start: float = 10.0, size: int = 8, ratio: float = 10.0) -> list[float]:
    """Geometric abscissa grid for limit probes."""
    if not (start > 0 and ratio > 1 and size >= 1):
        raise ValueError("need start > 0, ratio > 1, size >= 1")
    return [start * ratio ** k for k in range(size)]


@dataclass(frozen=True)
class RvProbe:
    """Target function with the abscissae and multipliers used to probe scaling."""

    fn: Callable[[float], float]
    x_grid: Sequence[float] = field(default_factory=default_probe_grid)
    multipliers: Sequence[float] = (2.0, 5.0, 10.0)

    def __post_init__(self):
        if len(self.x_grid) == 0 or len(self.multipliers) == 0:
            raise ValueError("grid and multipliers must be nonempty")
        if any(not x > 0 for x in self.x_grid):
            raise ValueError("grid points must be strictly positive")
        if list(self.x_grid) != sorted(self.x_grid):
            raise ValueError("grid must be increasing")
        if any(not (m > 0 and m != 1.0) for m in self.multipliers):
            raise ValueError("multipliers must be positive and different from 1")


@dataclass(frozen=True)
class RvFit:
    """Estimated variation exponent with its per-multiplier breakdown.

    dispersion is the spread (max minus min) of the per-multiplier estimates
    at the largest abscissa; a pure power law gives zero, and a large value
    means the scaling relation U(mx)/U(x) ~ m^rho is not holding.
    """

    rho_est: float
    per_multiplier: tuple[tuple[float, float], ...]
    dispersion: float

    def __post_init__(self):
        if self.dispersion < 0:
            raise ValueError("dispersion must be nonnegative")


def rv_index(probe: RvProbe) -> RvFit:
    """Estimate the variation exponent rho from log U(mx)/U(x) over log m.

    Each multiplier gives one estimate at the largest abscissa; the aggregate
    is their median, which shrugs off a slowly varying factor that biases the
    small multipliers most.
    """
    x = float(probe.x_grid[-1])
    ests = []
    for m in probe.multipliers:
        ux = probe.fn(x)
        umx = probe.fn(m * x)
        if not (ux > 0 and umx > 0):
            raise ValueError(
                f"target must be positive at probed points, got U({x:g})={ux:g}, "
                f"U({m * x:g})={umx:g}"
            )
        ests.append((float(m), math.log(umx / ux) / math.log(m)))
    vals = [e for _, e in ests]
    return RvFit(
        rho_est=statistics.median(vals),
        per_multiplier=tuple(ests),
        dispersion=max(vals) - min(vals),
    )


def adaptive_quad(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive quadrature on a finite interval, raising on non-convergence."""
    out = quad(
        fn,
        lo,
        hi,
        points=points,
        epsabs=1e-300,
        epsrel=INTEGRAL_TOL,
        limit=200,
        full_output=1,
    )
    if len(out) > 3:
        raise ValueError(f"quadrature failed on [{lo:g}, {hi:g}]: {out[3]}")
    return out[0]


def tail_quad(fn: Callable[[float], float], lo: float, hi: float) -> float:
    """Integral of fn over [lo, hi] allowing hi = inf.

    The improper case maps [lo, inf) onto s in [0, 1) via t = lo + s/(1-s),
    which concentrates quadrature nodes where the integrand still matters.
    """
    if hi != math.inf:
        return adaptive_quad(fn, lo, hi)

    def g(s: float) -> float:
        onems = 1.0 - s
        if onems <= 0.0:
            return 0.0
        t = lo + s / onems
        return fn(t) / (onems * onems)

    return adaptive_quad(g, 0.0, 1.0)


def karamata_b(U: Callable[[float], float], x: float) -> float:
    """Mean-value functional x*U(x) / integral of U over (0, x].

    For U regularly varying with exponent rho >= -1 this tends to rho + 1;
    for a pure power it equals rho + 1 at every x.
    """
    if not x > 0:
        raise ValueError("x must be positive")
    total = adaptive_quad(U, 0.0, x)
    if total == 0.0:
        raise ValueError("integral of U over (0, x] vanishes")
    return x * U(x) / total


def karamata_B(U: Callable[[float], float], x: float, cutoff: float = 1e15) -> float:
    """Mean-value functional x*U(x) / integral of U over [x, inf).

    For U regularly varying with exponent rho < -1 this tends to -(rho + 1).
    The improper integral runs through the t = x + s/(1-s) substitution;
    cutoff feeds the divergence test: a contribution past it that is not
    negligible against the whole means U is not integrable out there.
    """
    if not x > 0:
        raise ValueError("x must be positive")
    if not cutoff > x:
        raise ValueError("cutoff must exceed x")
    try:
        total = tail_quad(U, x, math.inf)
        tail = tail_quad(U, cutoff, math.inf)
    except ValueError as exc:
        raise ValueError(f"integral of U over [{x:g}, inf) diverges") from exc
    if not total > 0:
        raise ValueError("integral of U over [x, inf) is not positive")
    if tail > max(INTEGRAL_TOL, 0.01 * total):
        raise ValueError(
            f"mass past {cutoff:g} is {tail / total:.3g} of the whole; "
            "U does not look integrable"
        )
    return x * U(x) / total


def dehaan_g(U: Callable[[float], float], x: float) -> float:
    """Auxiliary function U(x) minus the running average (1/x) integral from 1 to x.

    For U in the pi-variation class this g is slowly varying, which rv_index
    confirms by returning an exponent near zero.
    """
    if not x > 1:
        raise ValueError("x must exceed 1")
    return U(x) - adaptive_quad(U, 1.0, x) / x


def pi_variation_ratio(U: Callable[[float], float], t: float, x: float, y: float) -> float:
    """Increment ratio (U(ty) - U(t)) / (U(tx) - U(t)) at one probe point t."""
    if not (x > 0 and y > 0 and x != 1.0):
        raise ValueError("need x > 0, y > 0, x != 1")
    ut = U(t)
    den = U(t * x) - ut
    if abs(den) < 1e-14 * abs(ut):
        raise ValueError(f"degenerate increment at t={t:g}: U(tx) - U(t) is numerically zero")
    return (U(t * y) - ut) / den


def pi_variation_sweep(
    U: Callable[[float], float],
    x: float,
    y: float,
    t_grid: Sequence[float] | None = None,
) -> Stabilized:
    """Increment ratios along increasing t, with the log y / log x target check.

    The returned value is the last ratio; settled means the last three agree
    to relative 1e-3, the usual criterion for a limit having been reached.
    """
    grid = list(t_grid) if t_grid is not None else default_probe_grid()
    vals = [pi_variation_ratio(U, t, x, y) for t in grid]
    return limit_estimate(vals)


def sv_uniform_ratio(
    S: Callable[[float], float],
    lo: float,
    hi: float,
    grid_size: int = 64,
) -> float:
    """Worst ratio deviation max |S(u)/S(v) - 1| over a window grid.

    For S slowly varying and a window shrinking with bounded endpoint ratio,
    the value tends to zero; a power factor keeps it bounded away.
    """
    if not (0.0 < lo <= hi):
        raise ValueError("need 0 < lo <= hi")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    pts = np.linspace(lo, hi, grid_size)
    vals = np.array([S(float(p)) for p in pts])
    if not np.all(vals > 0):
        raise ValueError("S must be positive on the window")
    return float(np.max(vals) / np.min(vals) - 1.0)
