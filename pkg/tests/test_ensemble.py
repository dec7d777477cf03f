"""Ensemble sampler: oracles against the audited quantile route, model-mean
identities, determinism contracts, and the trace-identity closed form."""
import math

import numpy as np
import pytest
from scipy import stats

from satolab.chebyshev import simpson_quadrature
from satolab.ensemble import (
    EnsembleConfig,
    IndicatorStatistic,
    SmoothSpec,
    SmoothStatistic,
    _context,
    _jackknife_se,
    _ks_to_normal,
    _member_values,
    gaussian_moment,
    member_statistic,
    run_ensemble,
    smooth_weight,
    standardize,
    trace_identity_check,
)
from satolab.errors import ConfigError
from satolab.measures import LocalMeasure, density, quantile
from satolab.number_field import FieldSpec, LevelSpec, enumerate_prime_ideals, split_prime
from satolab.rng import CounterRng, member_keys
from satolab.selberg import ArcInterval

Q5 = FieldSpec.real_quadratic(5)
NO_LEVEL = LevelSpec.empty()
QUARTER_ARC = ArcInterval(math.pi / 4, math.pi / 2)


def _indicator_config(x=1000.0, size=400, seed=20260816, interval=QUARTER_ARC):
    return EnsembleConfig(
        field=Q5,
        level=NO_LEVEL,
        x=x,
        size=size,
        seed=seed,
        statistic=IndicatorStatistic(interval),
    )


def _member_oracle(config, member_index, weight=None):
    """Member statistic recomputed through the audited measures.quantile path."""
    ideals = enumerate_prime_ideals(config.field, config.x, config.level)
    key = member_keys(config.seed, np.asarray([member_index]))[0]
    u = CounterRng(key=np.uint64(key)).uniforms(len(ideals))
    total = 0.0
    for j, ideal in enumerate(ideals):
        theta = float(quantile(LocalMeasure(ideal.norm), u[j]))
        if weight is None:
            stat = config.statistic
            total += 1.0 if stat.interval.a <= theta <= stat.interval.b else 0.0
        else:
            total += weight(theta)
    return total


def test_member_statistic_full_arc_counts_everything():
    # indicator over the whole angle range fires on every ideal
    cfg = _indicator_config(x=300.0, size=100, interval=ArcInterval(0.0, math.pi))
    count = len(enumerate_prime_ideals(Q5, 300.0))
    for i in (0, 7, 99):
        assert member_statistic(cfg, i) == float(count)


def test_member_statistic_vanishing_arc():
    tiny = ArcInterval(math.pi / 2, math.pi / 2 + 1e-12)
    cfg = _indicator_config(x=500.0, size=200, interval=tiny)
    assert all(member_statistic(cfg, i) == 0.0 for i in range(32))


def test_member_statistic_matches_quantile_oracle():
    cfg = _indicator_config(x=1000.0, size=120)
    for i in (0, 3, 57, 119):
        assert member_statistic(cfg, i) == _member_oracle(cfg, i)


def test_smooth_member_matches_quantile_oracle():
    spec = SmoothSpec(kind="gaussian", lam=1.0)
    cfg = EnsembleConfig(
        field=Q5,
        level=NO_LEVEL,
        x=500.0,
        size=150,
        seed=3,
        statistic=SmoothStatistic(phi=spec, M=4.0),
    )
    for i in (0, 11, 149):
        want = _member_oracle(
            cfg, i, weight=lambda th: float(smooth_weight(spec, 4.0, th / math.pi))
        )
        # fast table inversion vs 42-step bisection, accumulated over ideals
        assert member_statistic(cfg, i) == pytest.approx(want, abs=1e-9)


def test_member_values_independent_of_batching():
    cfg = _indicator_config(size=64)
    ctx = _context(cfg)
    keys = member_keys(cfg.seed, np.arange(64, dtype=np.uint64))
    whole = _member_values(ctx, keys)
    pieces = np.concatenate(
        [_member_values(ctx, keys[a:b]) for a, b in ((0, 10), (10, 37), (37, 64))]
    )
    assert np.array_equal(whole, pieces)
    assert member_statistic(cfg, 41) == whole[41]


def test_fast_inversion_agrees_with_quantile():
    spec = SmoothSpec(kind="gaussian", lam=2.0)
    cfg = EnsembleConfig(
        field=Q5,
        level=NO_LEVEL,
        x=400.0,
        size=100,
        seed=1,
        statistic=SmoothStatistic(phi=spec, M=2.0),
    )
    ctx = _context(cfg)
    ideals = enumerate_prime_ideals(Q5, 400.0)
    keys = member_keys(cfg.seed, np.arange(40, dtype=np.uint64))
    from satolab.ensemble import _invert_cols
    from satolab.rng import uniform_matrix

    real_u = uniform_matrix(keys, len(ideals))
    up = real_u[:, ctx.perm]
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

    worst = 0.0
    for bucket in ctx.buckets:
        s = slice(bucket.k0, bucket.k1)
        theta = _invert_cols(up[:, s], lo[:, s], hi[:, s], r_lo[:, s], r_hi[:, s], bucket)
        for row, k0, k1 in ctx.p_groups:
            if k0 < bucket.k0 or k1 > bucket.k1:
                continue
            q = float(1.0 / (bucket.c1[0][k0 - bucket.k0] * 2.0 * math.pi))
            slow = quantile(LocalMeasure(q), up[:, k0:k1])
            worst = max(
                worst,
                float(np.max(np.abs(theta[:, k0 - bucket.k0 : k1 - bucket.k0] - slow))),
            )
    assert worst < 1e-9


def test_exact_mean_and_variance_oracle():
    # model mean/variance are exact sums of per-ideal masses; the empirical
    # ensemble must match within 5 standard errors
    cfg = _indicator_config(x=1000.0, size=4000, seed=42)
    rep = run_ensemble(cfg)
    raw_mean = rep.center + rep.scale * rep.empirical_moments[0]
    se = math.sqrt(rep.variance_model / rep.size)
    assert abs(raw_mean - rep.mean_model) <= 5.0 * se
    raw_second = (rep.scale**2) * rep.empirical_moments[1]
    raw_var = raw_second - (raw_mean - rep.center) ** 2  # about the center
    # variance check is looser: sampling error of a variance ~ var * sqrt(2/H)
    assert abs(raw_var - rep.variance_model) <= 6.0 * rep.variance_model * math.sqrt(
        2.0 / rep.size
    )


def test_model_mean_drift_is_logarithmic():
    # |model mean - pi_L mu(I)| fitted against loglog x with small constant
    for x in (1e3, 1e4):
        cfg = _indicator_config(x=x, size=100)
        ctx = _context(cfg)
        drift = abs(ctx.mean_model - ctx.center)
        assert drift <= 5.0 * math.log(math.log(x))


def test_histogram_partitions_members():
    cfg = _indicator_config(size=700, seed=5)
    rep = run_ensemble(cfg)
    assert len(rep.histogram_edges) == 61
    assert len(rep.histogram_counts) == 60
    assert sum(rep.histogram_counts) + rep.underflow + rep.overflow == rep.size
    assert rep.histogram_edges[0] == -5.0 and rep.histogram_edges[-1] == 5.0


def test_jackknife_matches_closed_form():
    rng = np.random.default_rng(20260816)
    v = rng.normal(size=501)
    closed = float(np.std(v, ddof=1) / math.sqrt(v.size))
    assert _jackknife_se(v) == pytest.approx(closed, rel=1e-12)
    assert _jackknife_se(np.array([3.0])) == 0.0


def test_ks_matches_scipy():
    rng = np.random.default_rng(7)
    y = rng.normal(size=2000)
    want = stats.kstest(y, "norm").statistic
    assert _ks_to_normal(y) == pytest.approx(float(want), abs=1e-12)


def test_thread_count_never_changes_report():
    cfg = _indicator_config(x=2000.0, size=4500, seed=911)
    one = run_ensemble(cfg, threads=1)
    many = run_ensemble(cfg, threads=3)
    assert one == many


def test_standardize_affine_examples():
    ideals = enumerate_prime_ideals(Q5, 1000.0)
    mu = (QUARTER_ARC.b - QUARTER_ARC.a) / math.pi - (
        math.sin(2 * QUARTER_ARC.b) - math.sin(2 * QUARTER_ARC.a)
    ) / (2 * math.pi)
    center = len(ideals) * mu
    scale = math.sqrt(len(ideals) * mu * (1 - mu))
    assert standardize(center, Q5, 1000.0, QUARTER_ARC) == pytest.approx(0.0, abs=1e-12)
    assert standardize(center + scale, Q5, 1000.0, QUARTER_ARC) == pytest.approx(
        1.0, rel=1e-12
    )
    with pytest.raises(ValueError):
        standardize(1.0, Q5, 1000.0, ArcInterval(0.0, math.pi))


def test_gaussian_moment_recursion():
    # m_r = (r - 1) m_{r-2} for the standard normal
    prev2, prev1 = 1.0, 0.0
    for r in range(2, 13):
        want = (r - 1) * prev2
        got = gaussian_moment(r)
        if r % 2 == 0:
            assert got == want
        else:
            assert got == 0.0
        prev2, prev1 = prev1, want if r % 2 == 0 else 0.0
    with pytest.raises(ValueError):
        gaussian_moment(-1)


def test_smooth_weight_series_example():
    spec = SmoothSpec(kind="gaussian", lam=1.0)
    want = 1.0 + 2.0 * sum(math.exp(-(m**2)) for m in range(1, 9))
    assert smooth_weight(spec, 1.0, 0.0) == pytest.approx(want, abs=1e-12)
    # evenness through the periodization: phi(t) = phi(1 - t)
    for t in (0.1, 0.37, 0.5, 0.93):
        assert smooth_weight(spec, 4.0, t) == pytest.approx(
            smooth_weight(spec, 4.0, 1.0 - t), rel=1e-12
        )
    # one-period shift only moves truncated tail mass
    assert smooth_weight(spec, 4.0, 1.3) == pytest.approx(
        smooth_weight(spec, 4.0, 0.3), abs=1e-11
    )
    with pytest.raises(ValueError):
        smooth_weight(spec, 0.5, 0.2)


def test_smooth_local_mean_matches_direct_quadrature():
    # coefficient route for E_q[phi] vs direct integration of phi * density
    spec = SmoothSpec(kind="gaussian", lam=1.0)
    big_m = 4.0
    cfg = EnsembleConfig(
        field=Q5,
        level=NO_LEVEL,
        x=30.0,
        size=100,
        seed=0,
        statistic=SmoothStatistic(phi=spec, M=big_m),
    )
    ctx = _context(cfg)
    ideals = enumerate_prime_ideals(Q5, 30.0)
    theta = np.linspace(0.0, math.pi, 2**12 + 1)
    phi_vals = smooth_weight(spec, big_m, theta / math.pi)
    want = 0.0
    for ideal in ideals:
        meas = LocalMeasure(ideal.norm)
        want += simpson_quadrature(phi_vals * density(meas, theta), theta[1] - theta[0])
    assert ctx.mean_model == pytest.approx(want, abs=1e-9)


def test_custom_table_weight_periodizes_exactly():
    # triangle bump supported on |u| <= 1: compactly supported table kind
    spec = SmoothSpec(kind="custom", table=((0.0, 1.0), (1.0, 0.0)))
    assert spec.phi_values(0.25) == pytest.approx(0.75)
    assert spec.phi_values(-0.25) == pytest.approx(0.75)
    assert spec.phi_values(2.0) == 0.0
    # periodization of the triangle at M=1 telescopes to a constant
    for t in (0.0, 0.2, 0.5, 0.9):
        assert smooth_weight(spec, 1.0, t) == pytest.approx(1.0, abs=1e-12)


def test_custom_table_member_matches_oracle():
    spec = SmoothSpec(kind="custom", table=((0.0, 1.0), (0.5, 0.4), (1.0, 0.0)))
    cfg = EnsembleConfig(
        field=Q5,
        level=NO_LEVEL,
        x=200.0,
        size=100,
        seed=77,
        statistic=SmoothStatistic(phi=spec, M=2.0),
    )
    want = _member_oracle(
        cfg, 13, weight=lambda th: float(smooth_weight(spec, 2.0, th / math.pi))
    )
    assert member_statistic(cfg, 13) == pytest.approx(want, abs=1e-9)


def test_trace_identity_even_orders():
    cfg = _indicator_config(x=100.0, size=20000, seed=7)
    p4 = split_prime(Q5, 2)[0]
    p9 = split_prime(Q5, 3)[0]
    rep = trace_identity_check(cfg, [p4, p9], [2, 2])
    assert rep.target == pytest.approx(1.0 / 36.0, rel=1e-12)
    assert abs(rep.z_score) <= 5.0
    assert abs(rep.empirical - rep.target) <= 5.0 * rep.standard_error


def test_trace_identity_odd_order_targets_zero():
    cfg = _indicator_config(x=100.0, size=20000, seed=8)
    p4 = split_prime(Q5, 2)[0]
    p9 = split_prime(Q5, 3)[0]
    rep = trace_identity_check(cfg, [p4, p9], [2, 3])
    assert rep.target == 0.0
    assert abs(rep.z_score) <= 5.0


def test_trace_identity_empty_product():
    cfg = _indicator_config(size=500)
    rep = trace_identity_check(cfg, [], [])
    assert rep.empirical == 1.0 and rep.target == 1.0 and rep.z_score == 0.0


def test_trace_identity_rejects_bad_input():
    cfg = _indicator_config(size=500)
    p4 = split_prime(Q5, 2)[0]
    with pytest.raises(ValueError):
        trace_identity_check(cfg, [p4, p4], [2, 2])
    with pytest.raises(ValueError):
        trace_identity_check(cfg, [p4], [2, 2])
    with pytest.raises(ValueError):
        trace_identity_check(cfg, [p4], [-1])


def test_config_validation_names_fields():
    good = dict(
        field=Q5,
        level=NO_LEVEL,
        x=100.0,
        size=200,
        seed=1,
        statistic=IndicatorStatistic(QUARTER_ARC),
    )
    with pytest.raises(ConfigError, match="'x'"):
        EnsembleConfig(**{**good, "x": 1.0})
    with pytest.raises(ConfigError, match="'size'"):
        EnsembleConfig(**{**good, "size": 0})
    with pytest.raises(ConfigError, match="'seed'"):
        EnsembleConfig(**{**good, "seed": 1.5})
    with pytest.raises(ConfigError, match="'statistic'"):
        EnsembleConfig(**{**good, "statistic": QUARTER_ARC})
    with pytest.raises(ConfigError, match="'max_moment'"):
        EnsembleConfig(**{**good, "max_moment": 13})
    with pytest.raises(ConfigError, match="'statistic.phi.kind'"):
        SmoothSpec(kind="sinc")
    with pytest.raises(ConfigError, match="'statistic.phi.lambda'"):
        SmoothSpec(kind="gaussian", lam=0.0)
    with pytest.raises(ConfigError, match="'statistic.phi.table'"):
        SmoothSpec(kind="custom", table=((0.5, 1.0), (1.0, 0.0)))
    with pytest.raises(ConfigError, match="'statistic.M'"):
        SmoothStatistic(phi=SmoothSpec(), M=0.5)


def test_run_ensemble_guards():
    cfg = _indicator_config(size=99)
    with pytest.raises(ConfigError, match="'size'"):
        run_ensemble(cfg)
    with pytest.raises(ValueError):
        run_ensemble(_indicator_config(size=200), threads=0)
    full = EnsembleConfig(
        field=Q5,
        level=NO_LEVEL,
        x=100.0,
        size=200,
        seed=1,
        statistic=IndicatorStatistic(ArcInterval(0.0, math.pi)),
    )
    with pytest.raises(ConfigError, match="'statistic'"):
        run_ensemble(full)
    with pytest.raises(ValueError):
        member_statistic(_indicator_config(size=10), 10)


def test_moment_report_is_calibrated():
    # fixed-seed medium run: model-centered moments near gaussian targets
    cfg = EnsembleConfig(
        field=Q5,
        level=NO_LEVEL,
        x=2000.0,
        size=6000,
        seed=20260816,
        statistic=IndicatorStatistic(QUARTER_ARC),
        max_moment=4,
    )
    rep = run_ensemble(cfg)
    for m, s, g in zip(
        rep.model_centered_moments,
        rep.model_centered_standard_errors,
        rep.gaussian_targets,
    ):
        assert abs(m - g) <= 5.0 * s
    assert all(s > 0 for s in rep.standard_errors)
    assert rep.model_centered_ks < 0.05
