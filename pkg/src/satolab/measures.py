"""The Sato-Tate measure and its local deformations at prime ideals.

On [0, pi] the limiting measure is d mu_infty = (2/pi) sin^2(theta) dtheta.
At a prime ideal of norm q the local measure is the deformation

    d mu_q = (q + 1) / ((q^{1/2} + q^{-1/2})^2 - 4 cos^2 theta) d mu_infty,

whose Chebyshev moments are exactly q^{-m/2} for even m and 0 for odd m.
The identity behind both facts is the geometric expansion of the density
ratio in U_{2n}(cos theta) q^{-n}, which also yields a closed-form CDF used
by the inverse-transform sampler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chebyshev import _check_theta, eval_U, simpson_quadrature
from .rng import CounterRng

__all__ = [
    "SatoTateMeasure",
    "LocalMeasure",
    "density",
    "chebyshev_moment",
    "moment_quadrature",
    "cdf",
    "quantile",
    "sample",
    "interval_mass",
]

# Geometric tail: terms with q^{ -n } below this are dropped from the CDF
# series, giving absolute truncation error under 2e-14.
_TAIL_EPS = 1e-14


@dataclass(frozen=True)
class SatoTateMeasure:
    """The semicircle-angle measure (2/pi) sin^2(theta) dtheta."""


@dataclass(frozen=True)
class LocalMeasure:
    """Plancherel-type measure at a place of residue norm q >= 2."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not math.isfinite(q) or q < 2.0:
            raise ValueError("local measure norm q must be finite and >= 2")
        object.__setattr__(self, "q", q)


def density(measure, theta):
    """Density of the measure with respect to dtheta, vectorized."""
    t = _check_theta(theta)
    base = (2.0 / math.pi) * np.sin(t) ** 2
    if isinstance(measure, SatoTateMeasure):
        return base
    q = measure.q
    denom = (math.sqrt(q) + 1.0 / math.sqrt(q)) ** 2 - 4.0 * np.cos(t) ** 2
    return base * (q + 1.0) / denom


def chebyshev_moment(measure, m: int) -> float:
    """Exact integral of U_m(cos theta) against the measure.

    For the local measure at norm q this is q^{-m/2} for even m and 0 for
    odd m; the limiting measure keeps only the m = 0 mass.
    """
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise ValueError("m must be a nonnegative integer")
    if isinstance(measure, SatoTateMeasure):
        return 1.0 if m == 0 else 0.0
    if m % 2 == 1:
        return 0.0
    return float(measure.q) ** (-m / 2.0)


def moment_quadrature(measure, m: int, quadrature_points: int = 2**12) -> float:
    """Quadrature cross-check of chebyshev_moment (composite Simpson)."""
    grid = np.linspace(0.0, math.pi, 2 * int(quadrature_points) + 1)
    integrand = eval_U(int(m), grid) * density(measure, grid)
    return simpson_quadrature(integrand, grid[1] - grid[0])


def _local_tail_length(q: float) -> int:
    # Largest n with q^{-n} >= _TAIL_EPS.
    return int(math.floor(-math.log(_TAIL_EPS) / math.log(q)))


def cdf(measure, theta):
    """Distribution function on [0, pi]; closed form, vectorized.

    The limiting measure has cdf theta/pi - sin(2 theta)/(2 pi).  The local
    cdf is the termwise integral of the density expansion,

        sum_n q^{-n} [ sin(2 n theta)/(2 n) - sin((2 n + 2) theta)/(2 n + 2) ] / pi

    (with the n = 0 term read as the limiting cdf), truncated geometrically.
    Both endpoints are exact: cdf(0) = 0 and cdf(pi) = 1.
    """
    t = _check_theta(theta)
    x = 2.0 * t
    s1 = np.sin(x)
    total = t / math.pi - s1 / (2.0 * math.pi)
    if isinstance(measure, SatoTateMeasure):
        return total
    q = measure.q
    n_max = _local_tail_length(q)
    if n_max >= 1:
        c = 2.0 * np.cos(x)
        sk_prev = np.zeros_like(x)  # sin(0 * x)
        sk = s1
        w = 1.0
        for n in range(1, n_max + 1):
            w /= q
            sk_next = c * sk - sk_prev  # sin((n+1) x)
            total = total + (w / math.pi) * (sk / (2.0 * n) - sk_next / (2.0 * n + 2.0))
            sk_prev, sk = sk, sk_next
    return total


def quantile(measure, u):
    """Inverse of cdf by 42 bisection halvings plus two Newton polish steps.

    Bisection brings the bracket below 1e-12; the Newton steps (clipped to
    the final bracket, skipped where the density is degenerate) sharpen the
    root without risking escape near the endpoints.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    if not np.all(np.isfinite(u_arr)) or np.any(u_arr < 0.0) or np.any(u_arr > 1.0):
        raise ValueError("u must lie in [0, 1]")
    shape = u_arr.shape
    u_flat = np.atleast_1d(u_arr).ravel()
    lo = np.zeros_like(u_flat)
    hi = np.full_like(u_flat, math.pi)
    for _ in range(42):
        mid = 0.5 * (lo + hi)
        less = cdf(measure, mid) < u_flat
        lo = np.where(less, mid, lo)
        hi = np.where(less, hi, mid)
    theta = 0.5 * (lo + hi)
    for _ in range(2):
        dens = density(measure, theta)
        resid = cdf(measure, theta) - u_flat
        step = np.where(dens > 1e-12, resid / np.maximum(dens, 1e-12), 0.0)
        theta = np.clip(theta - step, lo, hi)
    theta = np.where(u_flat == 0.0, 0.0, np.where(u_flat == 1.0, math.pi, theta))
    out = theta.reshape(shape) if shape else theta[0]
    return out


def sample(measure, rng: CounterRng, size=None):
    """Draw angles by inverse transform; one uniform consumed per angle."""
    n = 1 if size is None else int(size)
    u = rng.uniforms(n)
    theta = quantile(measure, u)
    return float(theta[0]) if size is None else theta


def interval_mass(measure, interval) -> float:
    """Mass cdf(b) - cdf(a) of an angle interval [a, b] in [0, pi].

    Accepts anything exposing endpoints a and b (an ArcInterval) or a plain
    pair.
    """
    if hasattr(interval, "a") and hasattr(interval, "b"):
        a, b = float(interval.a), float(interval.b)
    else:
        a, b = (float(v) for v in interval)
    if b < a:
        raise ValueError("interval endpoints must satisfy a <= b")
    return float(cdf(measure, b) - cdf(measure, a))
