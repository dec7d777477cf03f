"""Deterministic moment pipeline for extremal Chebyshev sums.

Covers the closed-form side of the central limit argument: powers of the
degree-M sum Z (the extremal expansion with its constant term removed),
exact local integrals of Z^r, the partition expansion of the n-th moment
with distinct-ideal tuple sums, and bookkeeping for the weight-growth
hypothesis under which the sampled trace terms are negligible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import expi

from .chebyshev import ChebyshevSeries, series_product
from .number_field import FieldSpec, LevelSpec, enumerate_prime_ideals, pi_L
from .selberg import ExtremalPair

__all__ = [
    "GrowthReport",
    "MainTermReport",
    "Partition",
    "WeightVector",
    "ZSeries",
    "classify_partition",
    "growth_bookkeeping",
    "integral_z_power_local",
    "main_term_report",
    "moment_main_term",
    "partitions_of",
    "limit_law_m",
    "z_power_coeffs",
]

_POWER_GUARD = 10_000  # r * M cap for exact linearized powers
_EXACT_PI_L_CUTOFF = 2_000_000.0


@dataclass(frozen=True)
class ZSeries:
    """Chebyshev sum with no constant term, tagged by the sign it came from."""

    series: ChebyshevSeries
    source: str

    def __post_init__(self):
        if self.source not in ("plus", "minus"):
            raise ValueError("source must be 'plus' or 'minus'")
        if self.series.coeffs[0] != 0.0:
            raise ValueError("constant Chebyshev coefficient must vanish")

    @property
    def degree(self) -> int:
        return self.series.degree

    @classmethod
    def from_extremal(cls, pair: ExtremalPair, sign: str = "plus") -> "ZSeries":
        f = pair.f_plus if sign == "plus" else pair.f_minus
        if f is None:
            raise ValueError("pair lacks the Chebyshev expansion; use to_chebyshev")
        coeffs = f.coeffs.copy()
        coeffs[0] = 0.0
        return cls(series=ChebyshevSeries(coeffs), source=sign)


@dataclass(frozen=True)
class Partition:
    """Unordered parts summing to n, with the expansion weight.

    The weight n!/(prod r_i!) / (prod mult_j!) counts the ways to split n
    labeled draws into blocks of the given sizes; it makes the partition
    expansion reproduce n-th powers of finite sums exactly, which is the
    binding contract (checked by the multinomial oracle test).
    """

    parts: tuple
    weight: Fraction

    @property
    def block_count(self) -> int:
        return len(self.parts)


def _partition_weight(parts: tuple) -> Fraction:
    n = sum(parts)
    w = Fraction(math.factorial(n))
    for r in parts:
        w /= math.factorial(r)
    mult = {}
    for r in parts:
        mult[r] = mult.get(r, 0) + 1
    for m in mult.values():
        w /= math.factorial(m)
    return w


def partitions_of(n: int) -> list:
    """All partitions of n (parts nonincreasing) with expansion weights."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 12:
        raise ValueError("partition order must lie in 1..12")

    out = []

    def rec(remaining, cap, prefix):
        if remaining == 0:
            parts = tuple(prefix)
            out.append(Partition(parts=parts, weight=_partition_weight(parts)))
            return
        for part in range(min(cap, remaining), 0, -1):
            rec(remaining - part, part, prefix + [part])

    rec(n, n, [])
    return out


def classify_partition(parts) -> int:
    """Case labels: 1 all parts equal 2; 2 some part equals 1; 3 the rest."""
    if all(r == 2 for r in parts):
        return 1
    if any(r == 1 for r in parts):
        return 2
    return 3


def z_power_coeffs(z: ZSeries, r: int) -> ChebyshevSeries:
    """Exact linearized Chebyshev coefficients of Z^r."""
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise ValueError("power must be a positive integer")
    if r * max(z.degree, 1) > _POWER_GUARD:
        raise ValueError("r * M exceeds the exact-expansion guard")
    result = ChebyshevSeries(z.series.coeffs.copy())
    for _ in range(int(r) - 1):
        result = series_product(result, z.series)
    return result


def integral_z_power_local(z: ZSeries, r: int, q: float) -> float:
    """Closed form of the local integral of Z^r at residue norm q.

    Odd-degree terms integrate to zero and U_m picks up q^{-m/2}, so the
    value is the even-coefficient polynomial of Z^r evaluated at 1/q.
    """
    qf = float(q)
    if not math.isfinite(qf) or qf < 2.0:
        raise ValueError("residue norm q must be finite and >= 2")
    coeffs = z_power_coeffs(z, r).coeffs
    even = coeffs[::2]
    w = 1.0 / qf
    total = 0.0
    for c in even[::-1]:
        total = total * w + c
    return float(total)


def _even_profile(coeffs: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Vectorized Horner evaluation of the even-coefficient polynomial."""
    even = coeffs[::2]
    total = np.zeros_like(w)
    for c in even[::-1]:
        total = total * w + c
    return total


@lru_cache(maxsize=16)
def _set_partitions(u: int) -> tuple:
    """All set partitions of range(u) as tuples of position tuples."""
    if u == 0:
        return ((),)
    smaller = _set_partitions(u - 1)
    new = []
    last = u - 1
    for sigma in smaller:
        for i, block in enumerate(sigma):
            new.append(sigma[:i] + (block + (last,),) + sigma[i + 1 :])
        new.append(sigma + ((last,),))
    return tuple(new)


def _distinct_tuple_sum(parts: tuple, f_rows: dict, counts: np.ndarray) -> float:
    """Sum over pairwise-distinct ideal tuples of the product of local
    integrals, by inclusion-exclusion over set partitions of positions.

    Collapsing a block of positions onto one ideal carries the Moebius
    factor (-1)^(|B|-1) (|B|-1)!; the per-block power sums are computed
    with compensated summation over the distinct-norm groups.
    """
    u = len(parts)
    block_sum_cache = {}

    def block_sum(multiset: tuple) -> float:
        got = block_sum_cache.get(multiset)
        if got is not None:
            return got
        prod = f_rows[multiset[0]].copy()
        for r in multiset[1:]:
            prod = prod * f_rows[r]
        val = math.fsum((counts * prod).tolist())
        block_sum_cache[multiset] = val
        return val

    terms = []
    for sigma in _set_partitions(u):
        factor = 1.0
        for block in sigma:
            multiset = tuple(sorted(parts[i] for i in block))
            sign = -1.0 if (len(block) - 1) % 2 else 1.0
            factor *= sign * math.factorial(len(block) - 1) * block_sum(multiset)
        terms.append(factor)
    return math.fsum(terms)


@dataclass(frozen=True)
class MainTermReport:
    n: int
    sign: str
    m_used: int
    pi_L_x: int
    total: float
    case_totals: dict
    partition_terms: tuple  # (parts, case, normalized value)


def main_term_report(
    n: int,
    fs: FieldSpec,
    x,
    pair: ExtremalPair,
    sign: str = "plus",
    level: LevelSpec = None,
) -> MainTermReport:
    """Partition expansion of the n-th moment main term, normalized.

    Computes (1/pi_L^{n/2}) sum over partitions of weight times the
    distinct-tuple sum of products of local Z^{r_i} integrals, with the
    per-partition case labels retained.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 8:
        raise ValueError("moment order must lie in 1..8 for exact tuple sums")
    z = ZSeries.from_extremal(pair, sign)
    ideals = enumerate_prime_ideals(fs, x, level)
    if not ideals:
        raise ValueError("no prime ideals of norm <= x")
    norms = np.array([ideal.norm for ideal in ideals], dtype=np.float64)
    qs, counts = np.unique(norms, return_counts=True)
    counts = counts.astype(np.float64)
    w = 1.0 / qs
    f_rows = {
        r: _even_profile(z_power_coeffs(z, r).coeffs, w) for r in range(1, n + 1)
    }
    scale = float(len(ideals)) ** (n / 2.0)
    case_totals = {1: 0.0, 2: 0.0, 3: 0.0}
    case_parts = {1: [], 2: [], 3: []}
    detail = []
    for partition in partitions_of(int(n)):
        tuple_sum = _distinct_tuple_sum(partition.parts, f_rows, counts)
        value = float(partition.weight) * tuple_sum / scale
        label = classify_partition(partition.parts)
        case_parts[label].append(value)
        detail.append((partition.parts, label, value))
    for label, vals in case_parts.items():
        case_totals[label] = math.fsum(vals)
    total = math.fsum(case_totals.values())
    return MainTermReport(
        n=int(n),
        sign=sign,
        m_used=pair.degree,
        pi_L_x=len(ideals),
        total=total,
        case_totals=case_totals,
        partition_terms=tuple(detail),
    )


def moment_main_term(
    n: int,
    fs: FieldSpec,
    x,
    pair: ExtremalPair,
    m_degree: int = None,
    sign: str = "plus",
    level: LevelSpec = None,
) -> float:
    """Normalized n-th moment main term; see main_term_report."""
    if m_degree is not None and int(m_degree) != pair.degree:
        raise ValueError("m_degree disagrees with the pair's degree")
    return main_term_report(n, fs, x, pair, sign=sign, level=level).total


@dataclass(frozen=True)
class WeightVector:
    """Even weights k_i >= 4, or their natural logs in asymptotic regimes.

    Passing ks validates evenness and the lower bound and fills log_ks;
    from_log accepts logarithms directly for weights too large to write
    down (evenness is then assumed, not checked).
    """

    ks: tuple = ()
    log_ks: tuple = ()

    def __post_init__(self):
        if self.ks:
            ks = tuple(int(k) for k in self.ks)
            if any(k < 4 or k % 2 for k in ks):
                raise ValueError("weights must be even integers >= 4")
            object.__setattr__(self, "ks", ks)
            object.__setattr__(self, "log_ks", tuple(math.log(k) for k in ks))
        elif self.log_ks:
            logs = tuple(float(v) for v in self.log_ks)
            if any(not math.isfinite(v) or v < math.log(4.0) for v in logs):
                raise ValueError("log-weights must be finite and >= log 4")
            object.__setattr__(self, "log_ks", logs)
        else:
            raise ValueError("need weights or their logarithms")

    @classmethod
    def from_log(cls, log_ks) -> "WeightVector":
        return cls(ks=(), log_ks=tuple(float(v) for v in log_ks))

    @property
    def degree(self) -> int:
        return len(self.log_ks)

    @property
    def sum_log(self) -> float:
        return math.fsum(self.log_ks)


def _pi_L_value(fs: FieldSpec, x, level: LevelSpec = None) -> float:
    """pi_L by enumeration in exact range, prime-ideal-theorem li(x) beyond."""
    xf = float(x)
    if xf <= _EXACT_PI_L_CUTOFF:
        return float(pi_L(fs, xf, level))
    est = float(expi(math.log(xf)))
    if level is not None:
        est -= sum(1 for ideal in level.excluded if ideal.norm <= xf)
    return est


def limit_law_m(fs: FieldSpec, x, level: LevelSpec = None) -> int:
    """Expansion degree floor(sqrt(pi_L(x)) loglog x) used in the limit law."""
    xf = float(x)
    if xf < 16.0:
        raise ValueError("x must be at least 16")
    count = _pi_L_value(fs, xf, level)
    return int(math.floor(math.sqrt(count) * math.log(math.log(xf))))


@dataclass(frozen=True)
class GrowthReport:
    x: float
    n: int
    degree: int
    m_weight_rule_short: int
    m_weight_rule_full: int
    m_limit_law: int
    pi_L_estimate: float
    hypothesis_ratio: float
    log10_budget: float
    budget: float
    within_budget: bool


def growth_bookkeeping(
    x,
    weights: WeightVector,
    level: LevelSpec = None,
    fs: FieldSpec = None,
    n: int = 2,
) -> GrowthReport:
    """Weight-growth bookkeeping for the trace-term error budget.

    Reports the weight-based degree rule [2d sum(log k_i) / (3 log x)] in
    both index conventions (the short form omits the final weight from the
    sum; the full form keeps it -- printed forms of the rule disagree, so
    both are carried), the limit-law degree floor(sqrt(pi_L) loglog x),
    and the n-th moment error budget M^{2n} x^{(3/2)Mn} pi_L^{n/2} /
    prod k_i evaluated at the limit-law degree, in log10 to survive
    under/overflow.
    """
    xf = float(x)
    if xf < 16.0:
        raise ValueError("x must be at least 16")
    if not isinstance(weights, WeightVector):
        raise ValueError("weights must be a WeightVector")
    if fs is None:
        fs = FieldSpec.rationals()
    d = weights.degree
    log_x = math.log(xf)
    short_sum = math.fsum(weights.log_ks[: d - 1]) if d > 1 else 0.0
    m_short = int(math.floor(2.0 * d * short_sum / (3.0 * log_x)))
    m_full = int(math.floor(2.0 * d * weights.sum_log / (3.0 * log_x)))
    count = _pi_L_value(fs, xf, level)
    m_thm = int(math.floor(math.sqrt(count) * math.log(math.log(xf))))
    ln10 = math.log(10.0)
    log10_budget = (
        2.0 * n * math.log10(max(m_thm, 1))
        + 1.5 * m_thm * n * math.log10(xf)
        + 0.5 * n * math.log10(count)
        - weights.sum_log / ln10
    )
    if log10_budget > 308.0:
        budget = math.inf
    elif log10_budget < -323.0:
        budget = 0.0
    else:
        budget = 10.0**log10_budget
    return GrowthReport(
        x=xf,
        n=int(n),
        degree=d,
        m_weight_rule_short=m_short,
        m_weight_rule_full=m_full,
        m_limit_law=m_thm,
        pi_L_estimate=count,
        hypothesis_ratio=weights.sum_log / (math.sqrt(xf) * log_x),
        log10_budget=log10_budget,
        budget=budget,
        within_budget=bool(log10_budget < -3.0),
    )
