import math

import numpy as np
import pytest

from fracbv import (
    FanContext,
    NumericsError,
    SourceProfile,
    fan_holder_gap,
    fan_profile,
    fan_profile_residual,
    fan_profile_rootfind,
    power_law_flux,
    slope_time_integral,
    slope_time_integral_numeric,
    user_flux,
)

ZERO = SourceProfile.zero()


def make_ctx(p, source=ZERO, M=3.0):
    return FanContext(flux=power_law_flux(p, M=M), source=source)


def test_power_law_closed_form_examples():
    ctx = make_ctx(2.0)
    assert fan_profile(ctx, 4.0, 1.0) == pytest.approx(2.0, abs=1e-15)
    assert fan_profile(ctx, 0.0, 1.0) == 0.0
    src = SourceProfile.constant(-1.0)
    ctx2 = make_ctx(2.0, src)
    t_star = math.log(2.0) / 2.0  # effective time 0.25
    assert fan_profile(ctx2, 0.25, t_star) == pytest.approx(1.0, rel=1e-13)


def test_rootfind_agrees_with_closed_form():
    rng = np.random.default_rng(11)
    for p in (1.0, 2.0, 3.0):
        for source in (ZERO, SourceProfile.constant(-1.0), SourceProfile.piecewise([0, 0.5], [1, -1])):
            ctx = FanContext(flux=power_law_flux(p, M=2.0), source=source)
            for _ in range(20):
                t = rng.uniform(0.05, 2.0)
                w = rng.uniform(-1.9, 1.9)
                x = slope_time_integral(ctx.flux, source, w, t)
                assert fan_profile_rootfind(ctx, x, t) == pytest.approx(
                    fan_profile(ctx, x, t), abs=1e-10
                )


def test_residual_small():
    rng = np.random.default_rng(5)
    src = SourceProfile.piecewise([0, 0.5], [1, -1])
    ctx = FanContext(flux=power_law_flux(2.0, M=2.0), source=src)
    for _ in range(50):
        t = rng.uniform(0.05, 2.0)
        w = rng.uniform(-1.9, 1.9)
        x = slope_time_integral(ctx.flux, src, w, t)
        assert abs(fan_profile_residual(ctx, x, t)) < 1e-10 * (1.0 + abs(x))


def test_monotone_in_position():
    rng = np.random.default_rng(9)
    ctx = make_ctx(2.0)
    for _ in range(200):
        t = rng.uniform(0.05, 3.0)
        xmax = (0.9 * ctx.flux.M) ** 2 * ctx.source.effective_time(2.0, t)
        x1, x2 = np.sort(rng.uniform(-xmax, xmax, size=2))
        if x1 == x2:
            continue
        assert fan_profile(ctx, x1, t) < fan_profile(ctx, x2, t)


def test_holder_gap_examples():
    ctx = make_ctx(2.0)
    lhs, rhs = fan_holder_gap(ctx, 1.0, 1.0, 1.0)
    assert lhs == 0.0 and rhs == 0.0
    lhs, rhs = fan_holder_gap(ctx, 1.0, 0.0, 1.0)
    assert lhs == pytest.approx(1.0, abs=1e-14)
    assert rhs == pytest.approx(math.sqrt(2.0), abs=1e-14)
    ctx1 = make_ctx(1.0)
    lhs, rhs = fan_holder_gap(ctx1, 2.0, 1.0, 4.0)
    assert lhs == pytest.approx(0.25, abs=1e-14)  # equality case for p = 1
    assert rhs == pytest.approx(0.25, abs=1e-14)


def test_holder_bound_random_triples():
    rng = np.random.default_rng(23)
    for p, source in ((2.0, ZERO), (3.0, SourceProfile.constant(-0.5))):
        ctx = FanContext(flux=power_law_flux(p, M=2.0), source=source)
        for _ in range(2500):
            t = rng.uniform(0.05, 2.0)
            zmax = (0.9 * ctx.flux.M) ** p * source.effective_time(p, t)
            z1, z2 = rng.uniform(-zmax, zmax, size=2)
            lhs, rhs = fan_holder_gap(ctx, z1, z2, t)
            assert lhs <= rhs + ctx.root_tol


def test_user_flux_path_and_residual():
    # smooth strictly convex non-power-law flux
    F = user_flux(lambda u: np.cosh(u) - 1.0, np.sinh, M=2.0)
    ctx = FanContext(flux=F, source=SourceProfile.constant(-0.5))
    t = 0.8
    x = slope_time_integral_numeric(F, ctx.source, 0.9, t)
    v = fan_profile(ctx, x, t)
    assert v == pytest.approx(0.9, abs=1e-9)
    assert abs(fan_profile_residual(ctx, x, t, value=v)) < 1e-9


def test_time_domain_errors():
    ctx = make_ctx(2.0)
    with pytest.raises(ValueError):
        fan_profile(ctx, 1.0, 0.0)
    with pytest.raises(ValueError):
        fan_profile(ctx, 1.0, -0.5)


def test_range_escape_raises():
    ctx = make_ctx(2.0, M=1.0)
    # value would be (100)^{1/2} / 1 = 10 >> M
    with pytest.raises(NumericsError):
        fan_profile(ctx, 100.0, 1.0)
    F = user_flux(lambda u: np.cosh(u) - 1.0, np.sinh, M=1.0)
    with pytest.raises(NumericsError):
        fan_profile_rootfind(FanContext(flux=F, source=ZERO), 1e6, 1.0)
