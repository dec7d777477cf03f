"""Independent-angle Monte Carlo model of a vertical family of forms.

Each ensemble member draws one angle per prime ideal of norm up to x,
independently across ideals and members, with the angle at a place of norm q
distributed by the local measure for that q.  The member statistic is either
a count of angles inside an arc (indicator mode) or a sum of a periodized
smooth weight of the normalized angle t = theta/pi (smooth mode).

Determinism contract: every variate is a pure function of
(seed, member_index, ideal_position), per-member values are written into an
array indexed by member and only then reduced, so reports are bit-identical
under any blocking or thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .chebyshev import eval_U, fourier_coefficient
from .errors import ConfigError
from .measures import (
    LocalMeasure,
    _local_tail_length,
    cdf,
    chebyshev_moment,
    quantile,
)
from .number_field import FieldSpec, LevelSpec, enumerate_prime_ideals
from .rng import member_keys, uniform_matrix
from .selberg import ArcInterval, mu_infty_interval

__all__ = [
    "EnsembleConfig",
    "IndicatorStatistic",
    "MomentReport",
    "SmoothSpec",
    "SmoothStatistic",
    "TraceIdentityReport",
    "gaussian_moment",
    "member_statistic",
    "run_ensemble",
    "smooth_weight",
    "standardize",
    "trace_identity_check",
]

_TWO_PI = 2.0 * math.pi
_BLOCK = 2048  # members per work item; any value gives identical output
_GAUSS_TAIL_LOG = 34.6  # exp(-34.6) ~ 9e-16, keeps the dropped tail < 1e-12


@dataclass(frozen=True)
class SmoothSpec:
    """Even rapidly-decaying weight Phi to be periodized.

    kind "gaussian" uses Phi(u) = exp(-lam u^2); kind "custom" interpolates a
    table of (u, value) samples on u >= 0, extended evenly and vanishing past
    the last knot, so its periodization truncates exactly.  omega records the
    decay exponent (2 for the gaussian kind).
    """

    kind: str = "gaussian"
    lam: float = 1.0
    omega: float = 2.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("gaussian", "custom"):
            raise ConfigError("statistic.phi.kind", "expected 'gaussian' or 'custom'")
        if self.kind == "gaussian":
            lam = float(self.lam)
            if not math.isfinite(lam) or lam <= 0.0:
                raise ConfigError("statistic.phi.lambda", "decay rate must be positive")
            object.__setattr__(self, "lam", lam)
        else:
            knots = tuple((float(u), float(v)) for u, v in self.table)
            if len(knots) < 2:
                raise ConfigError("statistic.phi.table", "need at least two knots")
            us = [u for u, _ in knots]
            if us[0] != 0.0 or any(b <= a for a, b in zip(us, us[1:])):
                raise ConfigError(
                    "statistic.phi.table", "knots must start at 0 and increase"
                )
            if not all(math.isfinite(v) for _, v in knots):
                raise ConfigError("statistic.phi.table", "values must be finite")
            object.__setattr__(self, "table", knots)
        if not math.isfinite(float(self.omega)) or float(self.omega) <= 0.0:
            raise ConfigError("statistic.phi.omega", "decay exponent must be positive")

    def phi_values(self, u):
        """Phi(u), vectorized; even in u by construction."""
        uu = np.asarray(u, dtype=np.float64)
        if self.kind == "gaussian":
            return np.exp(-self.lam * uu * uu)
        us = np.array([k[0] for k in self.table])
        vs = np.array([k[1] for k in self.table])
        return np.interp(np.abs(uu), us, vs, right=0.0)


@dataclass(frozen=True)
class IndicatorStatistic:
    """Count of angles falling in the arc."""

    interval: ArcInterval

    def __post_init__(self):
        if not isinstance(self.interval, ArcInterval):
            raise ConfigError("statistic.interval", "expected an ArcInterval")


@dataclass(frozen=True)
class SmoothStatistic:
    """Sum of the periodized weight phi_M(theta/pi) over ideals."""

    phi: SmoothSpec
    M: float

    def __post_init__(self):
        if not isinstance(self.phi, SmoothSpec):
            raise ConfigError("statistic.phi", "expected a SmoothSpec")
        m = float(self.M)
        if not math.isfinite(m) or m < 1.0:
            raise ConfigError("statistic.M", "periodization scale must be >= 1")
        object.__setattr__(self, "M", m)


@dataclass(frozen=True)
class EnsembleConfig:
    """Full description of one Monte Carlo run."""

    field: FieldSpec
    level: LevelSpec
    x: float
    size: int
    seed: int
    statistic: object
    max_moment: int = 6

    def __post_init__(self):
        if not isinstance(self.field, FieldSpec):
            raise ConfigError("field", "expected a FieldSpec")
        if not isinstance(self.level, LevelSpec):
            raise ConfigError("level", "expected a LevelSpec")
        x = float(self.x)
        if not math.isfinite(x) or x < 2.0:
            raise ConfigError("x", "norm bound must be finite and >= 2")
        object.__setattr__(self, "x", x)
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise ConfigError("size", "ensemble size must be a positive integer")
        object.__setattr__(self, "size", int(self.size))
        if not isinstance(self.seed, (int, np.integer)):
            raise ConfigError("seed", "seed must be an integer")
        object.__setattr__(self, "seed", int(self.seed))
        if not isinstance(self.statistic, (IndicatorStatistic, SmoothStatistic)):
            raise ConfigError("statistic", "expected indicator or smooth statistic")
        if not isinstance(self.max_moment, (int, np.integer)) or not (
            1 <= self.max_moment <= 12
        ):
            raise ConfigError("max_moment", "moment order cap must lie in 1..12")
        object.__setattr__(self, "max_moment", int(self.max_moment))


@dataclass(frozen=True)
class MomentReport:
    """Standardized-moment summary of one ensemble run.

    empirical_moments and ks_statistic use the limit-law standardization
    (center pi_L mu, scale sqrt(pi_L var)); the model_centered_* fields use
    the exact finite-x model mean instead of the limiting center, removing
    the O(loglog x) drift while keeping the same scale.  Histogram counts
    plus underflow and overflow always sum to size.
    """

    empirical_moments: tuple
    standard_errors: tuple
    gaussian_targets: tuple
    ks_statistic: float
    histogram_edges: tuple
    histogram_counts: tuple
    underflow: int
    overflow: int
    pi_L_x: int
    mean_model: float
    variance_model: float
    center: float
    scale: float
    model_centered_moments: tuple
    model_centered_standard_errors: tuple
    model_centered_ks: float
    size: int


@dataclass(frozen=True)
class TraceIdentityReport:
    empirical: float
    target: float
    z_score: float
    standard_error: float
    size: int


def _truncation_window(spec: SmoothSpec, big_m: float) -> int:
    if spec.kind == "gaussian":
        return max(1, math.ceil(math.sqrt(_GAUSS_TAIL_LOG / spec.lam) / big_m))
    support = spec.table[-1][0]
    return max(1, math.ceil(support / big_m) + 1)


def smooth_weight(spec: SmoothSpec, big_m: float, t):
    """Periodized weight phi_M(t) = sum over m of Phi(M (t + m)).

    The window |m| <= m_max keeps the dropped tail below 1e-12 uniformly for
    t in [0, 1]; the custom kind has compact support so its tail is exactly
    zero.  Vectorized in t.
    """
    m_val = float(big_m)
    if not math.isfinite(m_val) or m_val < 1.0:
        raise ValueError("periodization scale M must be >= 1")
    tt = np.asarray(t, dtype=np.float64)
    win = _truncation_window(spec, m_val)
    acc = np.zeros_like(tt)
    for m in range(-win, win + 1):
        acc = acc + spec.phi_values(m_val * (tt + m))
    return acc if tt.shape else float(acc)


def gaussian_moment(r: int) -> float:
    """Moments of the standard normal: 0 odd, r!/(2^{r/2} (r/2)!) even."""
    if not isinstance(r, (int, np.integer)) or r < 0:
        raise ValueError("moment order must be a nonnegative integer")
    if r % 2 == 1:
        return 0.0
    half = r // 2
    return float(math.factorial(r) // (2**half * math.factorial(half)))


def standardize(value, fs: FieldSpec, x, interval: ArcInterval, level=None):
    """Affine limit-law normalization of an indicator count.

    Subtracts pi_L(x) mu(I) and divides by sqrt(pi_L(x) mu(I)(1 - mu(I)))
    where mu is the limiting angle measure.  Vectorized in value.
    """
    mu = mu_infty_interval(interval)
    if not 0.0 < mu < 1.0:
        raise ValueError("interval mass must lie strictly between 0 and 1")
    count = len(enumerate_prime_ideals(fs, x, level))
    center = count * mu
    scale = math.sqrt(count * mu * (1.0 - mu))
    out = (np.asarray(value, dtype=np.float64) - center) / scale
    return out if out.shape else float(out)


@dataclass
class _Bucket:
    """Ideal columns (in permuted order) whose cdf series share a length.

    c1[n-1] and c2[n-1] hold the per-column factors q^{-n}/(2 pi n) and
    q^{-n}/(2 pi (n + 1)) of the cdf series, hoisted out of the Newton loop.
    """

    k0: int
    k1: int
    c1: list
    c2: list
    qp: np.ndarray  # (sqrt q + 1/sqrt q)^2 per column
    fac: np.ndarray  # q + 1 per column


@dataclass
class _Context:
    kind: str
    n_ideals: int
    pi_L_x: int
    center: float
    scale: float
    mean_model: float
    variance_model: float
    lo_u: np.ndarray = None
    hi_u: np.ndarray = None
    perm: np.ndarray = None
    p_groups: list = dataclass_field(default_factory=list)
    buckets: list = dataclass_field(default_factory=list)
    theta_grid: np.ndarray = None
    cdf_table: np.ndarray = None
    spec: SmoothSpec = None
    big_m: float = 0.0


def _cdf_cols(theta: np.ndarray, bucket: _Bucket) -> np.ndarray:
    """Local cdf with per-column norms; same series as measures.cdf."""
    x = 2.0 * theta
    s1 = np.sin(x)
    total = theta / math.pi - s1 / _TWO_PI
    c = 2.0 * np.cos(x)
    sk_prev = np.zeros_like(x)
    sk = s1
    for c1, c2 in zip(bucket.c1, bucket.c2):
        sk_next = c * sk - sk_prev
        total += c1 * sk - c2 * sk_next
        sk_prev, sk = sk, sk_next
    return total


def _invert_cols(u, lo, hi, r_lo, r_hi, bucket: _Bucket) -> np.ndarray:
    """Quantiles within one-cell table brackets.

    Starts from inverse linear interpolation of the cdf across the cell and
    polishes with Newton steps clipped to the cell, which keeps iterates
    bracketed even where the density degenerates near the endpoints.  The
    worst case (vanishing density, negligible mass) is one cell width; the
    interior converges to machine accuracy.
    """
    den = np.maximum(r_hi - r_lo, 1e-300)
    theta = lo + (u - r_lo) / den * (hi - lo)
    for _ in range(4):
        sin_t = np.sin(theta)
        cos_t = np.cos(theta)
        dens = (2.0 / math.pi) * sin_t * sin_t * bucket.fac / (
            bucket.qp - 4.0 * cos_t * cos_t
        )
        resid = _cdf_cols(theta, bucket) - u
        step = np.where(dens > 1e-12, resid / np.maximum(dens, 1e-12), 0.0)
        theta = np.clip(theta - step, lo, hi)
    return np.where(u == 0.0, 0.0, np.where(u == 1.0, math.pi, theta))


def _smooth_profile(spec: SmoothSpec, big_m: float, n_max: int):
    """Expansion coefficients of phi_M(theta/pi) and its square in U_{2n}."""

    def f(theta):
        return smooth_weight(spec, big_m, np.asarray(theta) / math.pi)

    def f2(theta):
        vals = smooth_weight(spec, big_m, np.asarray(theta) / math.pi)
        return vals * vals

    coef_f = np.array([fourier_coefficient(f, 2 * n) for n in range(n_max + 1)])
    coef_g = np.array([fourier_coefficient(f2, 2 * n) for n in range(n_max + 1)])
    return coef_f, coef_g


def _local_series(coefs: np.ndarray, q: float, n_terms: int) -> float:
    """sum_n q^{-n} coefs[n], truncated once the geometric tail is spent."""
    top = min(n_terms, coefs.size - 1)
    total = 0.0
    w = 1.0
    for n in range(top + 1):
        total += w * coefs[n]
        w /= q
    return total


def _build_context(fs, level, x, statistic) -> _Context:
    ideals = enumerate_prime_ideals(fs, x, level)
    if not ideals:
        raise ConfigError("x", "no prime ideals of norm <= x; increase x")
    norms = np.array([ideal.norm for ideal in ideals], dtype=np.float64)
    count = len(ideals)
    qs, starts, counts = np.unique(norms, return_index=True, return_counts=True)

    if isinstance(statistic, IndicatorStatistic):
        interval = statistic.interval
        mu = mu_infty_interval(interval)
        lo_u = np.empty(count)
        hi_u = np.empty(count)
        mean_parts = []
        var_parts = []
        for q, j0, c in zip(qs, starts, counts):
            meas = LocalMeasure(q)
            a_u = float(cdf(meas, interval.a))
            b_u = float(cdf(meas, interval.b))
            lo_u[j0 : j0 + c] = a_u
            hi_u[j0 : j0 + c] = b_u
            mass = b_u - a_u
            mean_parts.append(c * mass)
            var_parts.append(c * mass * (1.0 - mass))
        mean_model = math.fsum(mean_parts)
        variance_model = math.fsum(var_parts)
        return _Context(
            kind="indicator",
            n_ideals=count,
            pi_L_x=count,
            center=count * mu,
            scale=math.sqrt(count * max(mu * (1.0 - mu), 0.0)),
            mean_model=mean_model,
            variance_model=variance_model,
            lo_u=lo_u,
            hi_u=hi_u,
        )

    spec = statistic.phi
    big_m = statistic.M
    terms = [_local_tail_length(q) for q in qs]
    coef_f, coef_g = _smooth_profile(spec, big_m, max(terms))
    mean_parts = []
    var_parts = []
    for q, c, n_terms in zip(qs, counts, terms):
        m_q = _local_series(coef_f, q, n_terms)
        s_q = _local_series(coef_g, q, n_terms)
        mean_parts.append(c * m_q)
        var_parts.append(c * (s_q - m_q * m_q))
    mean_model = math.fsum(mean_parts)
    variance_model = math.fsum(var_parts)
    v_weight = max(float(coef_g[0] - coef_f[0] ** 2), 0.0)

    # Bracket table: fine grid while the table fits comfortably in memory,
    # coarse grid for very large ideal counts.
    n_grid = 4097 if qs.size <= 2048 else 513
    theta_grid = np.linspace(0.0, math.pi, n_grid)
    cdf_table = np.empty((qs.size, n_grid))
    for i, q in enumerate(qs):
        cdf_table[i] = cdf(LocalMeasure(q), theta_grid)

    # Columns are permuted so that groups sharing a series length become
    # contiguous; every later pass works on views of the permuted matrix.
    by_terms = {}
    for i, (q, j0, c, n_terms) in enumerate(zip(qs, starts, counts, terms)):
        by_terms.setdefault(n_terms, []).append((i, int(j0), int(j0 + c)))
    perm_parts = []
    p_groups = []
    buckets = []
    offset = 0
    for n_terms in sorted(by_terms):
        k0 = offset
        qcol_parts = []
        for row, j0, j1 in by_terms[n_terms]:
            width = j1 - j0
            perm_parts.append(np.arange(j0, j1))
            p_groups.append((row, offset, offset + width))
            qcol_parts.append(np.full(width, float(qs[row])))
            offset += width
        qcol = np.concatenate(qcol_parts)
        w = 1.0 / qcol
        c1 = [w**n / (_TWO_PI * n) for n in range(1, n_terms + 1)]
        c2 = [w**n / (_TWO_PI * (n + 1)) for n in range(1, n_terms + 1)]
        buckets.append(
            _Bucket(
                k0=k0,
                k1=offset,
                c1=c1,
                c2=c2,
                qp=qcol + 2.0 + 1.0 / qcol,
                fac=qcol + 1.0,
            )
        )

    return _Context(
        kind="smooth",
        n_ideals=count,
        pi_L_x=count,
        center=count * float(coef_f[0]),
        scale=math.sqrt(count * float(v_weight)),
        mean_model=mean_model,
        variance_model=variance_model,
        perm=np.concatenate(perm_parts),
        p_groups=p_groups,
        buckets=buckets,
        theta_grid=theta_grid,
        cdf_table=cdf_table,
        spec=spec,
        big_m=big_m,
    )


@lru_cache(maxsize=4)
def _context_cached(fs, level, x, statistic) -> _Context:
    return _build_context(fs, level, x, statistic)


def _context(config: EnsembleConfig) -> _Context:
    return _context_cached(config.field, config.level, config.x, config.statistic)


def _member_values(ctx: _Context, keys: np.ndarray) -> np.ndarray:
    """Statistics for the members keyed by `keys`; pure in (key, position)."""
    u = uniform_matrix(keys, ctx.n_ideals)
    if ctx.kind == "indicator":
        inside = (u >= ctx.lo_u[None, :]) & (u <= ctx.hi_u[None, :])
        return inside.sum(axis=1).astype(np.float64)
    up = np.ascontiguousarray(u[:, ctx.perm])
    lo = np.empty_like(up)
    hi = np.empty_like(up)
    r_lo = np.empty_like(up)
    r_hi = np.empty_like(up)
    for row, k0, k1 in ctx.p_groups:
        tab = ctx.cdf_table[row]
        idx = np.searchsorted(tab, up[:, k0:k1], side="left").clip(1, tab.size - 1)
        lo[:, k0:k1] = ctx.theta_grid[idx - 1]
        hi[:, k0:k1] = ctx.theta_grid[idx]
        r_lo[:, k0:k1] = tab[idx - 1]
        r_hi[:, k0:k1] = tab[idx]
    theta = np.empty_like(up)
    for b in ctx.buckets:
        s = slice(b.k0, b.k1)
        theta[:, s] = _invert_cols(up[:, s], lo[:, s], hi[:, s], r_lo[:, s], r_hi[:, s], b)
    phi = smooth_weight(ctx.spec, ctx.big_m, theta * (1.0 / math.pi))
    return phi.sum(axis=1)


def member_statistic(config: EnsembleConfig, member_index: int) -> float:
    """Statistic of one member; a pure function of (seed, member_index)."""
    if not 0 <= int(member_index) < config.size:
        raise ValueError("member_index must lie in [0, size)")
    ctx = _context(config)
    keys = member_keys(config.seed, np.asarray([int(member_index)], dtype=np.uint64))
    return float(_member_values(ctx, keys)[0])


def _jackknife_se(values: np.ndarray) -> float:
    """Delete-one jackknife error of the sample mean.

    For the mean the replicate formula collapses to std/sqrt(n) with the
    n-1 convention; computed from the replicates directly.
    """
    n = values.size
    if n < 2:
        return 0.0
    total = float(np.sum(values))
    repl = (total - values) / (n - 1.0)
    rbar = float(np.mean(repl))
    return float(math.sqrt((n - 1.0) / n * float(np.sum((repl - rbar) ** 2))))


def _ks_to_normal(y: np.ndarray) -> float:
    """Two-sided sup distance between the empirical cdf and the normal cdf."""
    ys = np.sort(y)
    n = ys.size
    f = ndtr(ys)
    above = np.arange(1, n + 1) / n - f
    below = f - np.arange(0, n) / n
    return float(max(np.max(above), np.max(below)))


def run_ensemble(config: EnsembleConfig, threads: int = 1) -> MomentReport:
    """Sample the full ensemble and summarize standardized moments.

    The member loop may run on any number of threads; per-member values are
    computed independently and written into one array indexed by member, so
    the report is bit-identical for a fixed seed regardless of scheduling.
    """
    if config.size < 100:
        raise ConfigError("size", "moment reports require size >= 100")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    ctx = _context(config)
    if not ctx.scale > 0.0:
        raise ConfigError(
            "statistic", "statistic is degenerate: zero variance under the limit law"
        )
    total = config.size
    values = np.empty(total, dtype=np.float64)

    def fill(span):
        i0, i1 = span
        keys = member_keys(config.seed, np.arange(i0, i1, dtype=np.uint64))
        values[i0:i1] = _member_values(ctx, keys)

    spans = [(i, min(i + _BLOCK, total)) for i in range(0, total, _BLOCK)]
    if threads == 1:
        for span in spans:
            fill(span)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, spans))

    y = (values - ctx.center) / ctx.scale
    y_model = (values - ctx.mean_model) / ctx.scale
    orders = range(1, config.max_moment + 1)
    moments = tuple(float(np.mean(y**r)) for r in orders)
    errors = tuple(_jackknife_se(y**r) for r in orders)
    m_moments = tuple(float(np.mean(y_model**r)) for r in orders)
    m_errors = tuple(_jackknife_se(y_model**r) for r in orders)
    edges = np.linspace(-5.0, 5.0, 61)
    counts = np.histogram(y, bins=edges)[0]
    return MomentReport(
        empirical_moments=moments,
        standard_errors=errors,
        gaussian_targets=tuple(gaussian_moment(r) for r in orders),
        ks_statistic=_ks_to_normal(y),
        histogram_edges=tuple(float(e) for e in edges),
        histogram_counts=tuple(int(c) for c in counts),
        underflow=int(np.count_nonzero(y < -5.0)),
        overflow=int(np.count_nonzero(y > 5.0)),
        pi_L_x=ctx.pi_L_x,
        mean_model=ctx.mean_model,
        variance_model=ctx.variance_model,
        center=ctx.center,
        scale=ctx.scale,
        model_centered_moments=m_moments,
        model_centered_standard_errors=m_errors,
        model_centered_ks=_ks_to_normal(y_model),
        size=total,
    )


def trace_identity_check(config: EnsembleConfig, ideals, ms) -> TraceIdentityReport:
    """Ensemble average of a product of U_m values vs its closed form.

    The closed form is the product of local Chebyshev moments: q^{-m/2} per
    even order, zero if any order is odd.  Angles are drawn at the list
    position of each ideal, so the check shares no stream with run_ensemble.
    """
    ideal_list = list(ideals)
    orders = [int(m) for m in ms]
    if len(ideal_list) != len(orders):
        raise ValueError("need one order per ideal")
    if any(m < 0 for m in orders):
        raise ValueError("orders must be nonnegative")
    if len(set(ideal_list)) != len(ideal_list):
        raise ValueError("ideals must be pairwise distinct")
    total = config.size
    keys = member_keys(config.seed, np.arange(total, dtype=np.uint64))
    u = uniform_matrix(keys, len(ideal_list))
    prod = np.ones(total)
    target = 1.0
    for j, (ideal, m) in enumerate(zip(ideal_list, orders)):
        meas = LocalMeasure(ideal.norm)
        theta = quantile(meas, u[:, j])
        prod = prod * eval_U(m, theta)
        target *= chebyshev_moment(meas, m)
    empirical = float(np.mean(prod))
    spread = float(np.std(prod, ddof=1)) if total > 1 else 0.0
    se = spread / math.sqrt(total) if total > 1 else 0.0
    z = (empirical - target) / se if se > 0.0 else 0.0
    return TraceIdentityReport(
        empirical=empirical,
        target=float(target),
        z_score=float(z),
        standard_error=se,
        size=total,
    )
