"""Chebyshev polynomials of the second kind on the angle variable.

Throughout, U_n is evaluated at cos(theta) for theta in [0, pi], where the
family is orthonormal with respect to the semicircle weight
(2/pi) sin^2(theta) dtheta:

    (2/pi) * integral_0^pi U_m(cos t) U_n(cos t) sin^2 t dt = delta_{mn}.

Finite expansions f = sum_m c_m U_m are held as coefficient vectors; products
are reduced back to the U basis through the linearization

    U_m U_n = U_{m+n} + U_{m+n-2} + ... + U_{|m-n|}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChebyshevSeries",
    "eval_U",
    "linearize_product",
    "series_product",
    "fourier_coefficient",
    "simpson_quadrature",
]

# Below this, sin((n+1)t)/sin(t) loses too many digits and the three-term
# recurrence in cos(t) is used instead.
_SINE_QUOTIENT_CUTOFF = 1e-6


@dataclass(frozen=True)
class ChebyshevSeries:
    """Finite expansion sum_{m=0}^{d} coeffs[m] * U_m(cos theta)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.float64))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a nonempty one-dimensional array")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def evaluate(self, theta) -> np.ndarray:
        """Clenshaw evaluation at theta (scalar or array) in [0, pi]."""
        theta = _check_theta(theta)
        x = np.cos(theta)
        b1 = np.zeros_like(x)
        b2 = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            b1, b2 = c + 2.0 * x * b1 - b2, b1
        return b1

    def __call__(self, theta) -> np.ndarray:
        return self.evaluate(theta)


def _check_theta(theta) -> np.ndarray:
    t = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(t)):
        raise ValueError("theta must be finite")
    if np.any(t < 0.0) or np.any(t > np.pi):
        raise ValueError("theta must lie in [0, pi]")
    return t


def eval_U(n: int, theta) -> np.ndarray:
    """U_n(cos theta) via sin((n+1)theta)/sin(theta).

    Near theta = 0 and theta = pi the quotient degenerates and the three-term
    recurrence U_k = 2 cos(theta) U_{k-1} - U_{k-2} is used, which reproduces
    the endpoint values U_n(1) = n+1 and U_n(-1) = (-1)^n (n+1) exactly.

    Args:
        n: nonnegative integer degree.
        theta: scalar or array of angles in [0, pi].

    Returns:
        Array (or scalar array) of U_n values.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    t = _check_theta(theta)
    s = np.sin(t)
    safe = np.abs(s) >= _SINE_QUOTIENT_CUTOFF
    out = np.empty_like(t)
    out[safe] = np.sin((n + 1) * t[safe]) / s[safe]
    if not np.all(safe):
        out[~safe] = _eval_u_recurrence(n, np.cos(t[~safe]))
    if np.isscalar(theta) or np.ndim(theta) == 0:
        return out[()] if out.ndim == 0 else float(out)
    return out


def _eval_u_recurrence(n: int, x: np.ndarray) -> np.ndarray:
    pm1 = np.ones_like(x)
    if n == 0:
        return pm1
    p = 2.0 * x
    for _ in range(n - 1):
        pm1, p = p, 2.0 * x * p - pm1
    return p


def linearize_product(m: int, n: int) -> list:
    """Degrees appearing in U_m * U_n, descending: m+n, m+n-2, ..., |m-n|."""
    if m < 0 or n < 0:
        raise ValueError("degrees must be nonnegative")
    return list(range(m + n, abs(m - n) - 1, -2))


def series_product(a: ChebyshevSeries, b: ChebyshevSeries) -> ChebyshevSeries:
    """Product of two expansions, reduced to the U basis.

    Computed through the sine-polynomial form: with A = sin(theta) f and
    B = sin(theta) g, the product satisfies sin^2(theta) f g = A B, and
    matching cosine coefficients of A B against

        sin^2(theta) sum_k c_k U_k = (1/2) sum_k c_k (cos k theta - cos (k+2) theta)

    recovers c by a two-step recurrence.  This reproduces the term-by-term
    linearization exactly, in O(d^2) instead of O(d^3) work.
    """
    sa = a.coeffs  # coefficient of sin((m+1) theta)
    sb = b.coeffs
    deg = a.degree + b.degree
    conv = np.convolve(sa, sb)  # index i+j, frequency i+j+2
    corr = np.convolve(sa, sb[::-1])  # index i-j+len(sb)-1
    off = sb.size - 1

    def corr_at(d: int) -> float:
        k = d + off
        return float(corr[k]) if 0 <= k < corr.size else 0.0

    p = np.zeros(deg + 3)
    for k in range(deg + 3):
        first = corr_at(0) if k == 0 else corr_at(k) + corr_at(-k)
        second = float(conv[k - 2]) if 2 <= k < conv.size + 2 else 0.0
        p[k] = 0.5 * (first - second)
    c = np.zeros(deg + 1)
    for k in range(deg + 1):
        c[k] = 2.0 * p[k] + (c[k - 2] if k >= 2 else 0.0)
    return ChebyshevSeries(c)


def simpson_quadrature(values: np.ndarray, step: float) -> float:
    """Composite Simpson rule on an odd-length uniform grid."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 3 or v.size % 2 == 0:
        raise ValueError("need an odd number of nodes (even panel count)")
    weights = np.ones(v.size)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(step / 3.0 * np.dot(weights, v))


def fourier_coefficient(f, n: int, quadrature_points: int = 2**14) -> float:
    """Coefficient [f * U_n] = (2/pi) integral_0^pi f(theta) U_n(cos theta) sin^2 theta dtheta.

    For a ChebyshevSeries input the stored coefficient is returned directly
    (zero beyond the degree); otherwise the integral is evaluated by composite
    Simpson quadrature with `quadrature_points` panels.

    Args:
        f: callable on [0, pi] (vectorized or scalar), or a ChebyshevSeries.
        n: coefficient index, nonnegative.
        quadrature_points: panel count for the composite rule, at least 2.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    if isinstance(f, ChebyshevSeries):
        return float(f.coeffs[n]) if n <= f.degree else 0.0
    if quadrature_points < 2:
        raise ValueError("quadrature_points must be at least 2")
    grid = np.linspace(0.0, np.pi, 2 * int(quadrature_points) + 1)
    try:
        fv = np.asarray(f(grid), dtype=np.float64)
        if fv.shape != grid.shape:
            raise TypeError
    except (TypeError, ValueError):
        fv = np.array([float(f(t)) for t in grid])
    if not np.all(np.isfinite(fv)):
        raise ValueError("integrand returned non-finite values")
    integrand = fv * eval_U(int(n), grid) * np.sin(grid) ** 2 * (2.0 / np.pi)
    return simpson_quadrature(integrand, grid[1] - grid[0])
