import math

import numpy as np
import pytest

from fracbv import (
    FanContext,
    SourceProfile,
    fan_edges,
    fan_profile,
    make_packet,
    packet_profile,
    packet_solution,
    planar_lift,
    power_law_flux,
    riemann_shock,
    speed_bound,
)
from fracbv.fanprofile import integrate_smooth

ZERO = SourceProfile.zero()


class TestRiemannShock:
    def test_antisymmetric_burgers_stationary(self):
        F = power_law_flux(1.0, M=2.0)
        pos, left, right = riemann_shock(F, ZERO, 1.0, -1.0, 0.0, 3.0)
        assert pos == 0.0 and left == 1.0 and right == -1.0

    def test_burgers_half_speed(self):
        F = power_law_flux(1.0, M=2.0)
        pos, _, _ = riemann_shock(F, ZERO, 2.0, 0.0, 0.0, 1.0)
        assert pos == pytest.approx(1.0, abs=1e-14)

    def test_even_flux_antisymmetric_stationary(self):
        F = power_law_flux(2.0, M=2.0)
        pos, left, right = riemann_shock(F, ZERO, 1.0, -1.0, 0.0, 5.0)
        assert pos == 0.0 and left == 1.0 and right == -1.0

    def test_source_scales_states(self):
        src = SourceProfile.constant(-1.0)
        F = power_law_flux(1.0, M=2.0)
        pos, left, right = riemann_shock(F, src, 1.0, 0.5, 0.0, 1.0)
        assert left == pytest.approx(math.exp(-1.0))
        assert right == pytest.approx(0.5 * math.exp(-1.0))
        # speed of the jump is the secant slope of f at the scaled states
        quad, _ = _speed_integral(F, src, 1.0, 0.5, 1.0)
        assert pos == pytest.approx(quad, rel=1e-10)

    def test_rarefaction_input_rejected(self):
        F = power_law_flux(1.0, M=2.0)
        with pytest.raises(ValueError):
            riemann_shock(F, ZERO, -1.0, 1.0, 0.0, 1.0)


def _speed_integral(F, src, w_minus, w_plus, t):
    def integrand(theta):
        e = np.exp(src.cumulative_source(float(np.atleast_1d(theta)[0])))
        return (F.f(w_plus * e) - F.f(w_minus * e)) / ((w_plus - w_minus) * e)

    val = integrate_smooth(lambda ths: np.array([integrand(th) for th in np.atleast_1d(ths)]), 0.0, t, 1e-12)
    return val, None


class TestFanEdges:
    def test_power_law_offsets(self):
        F = power_law_flux(2.0, M=1.0)
        P = make_packet(F, ZERO, 0.0, 1.0, 0.5)
        zl, zr = fan_edges(F, ZERO, P, 1.0)
        assert zl == pytest.approx(-1.0 + 0.25, abs=1e-14)
        assert zr == pytest.approx(1.0 - 0.25, abs=1e-14)

    def test_short_time_limit(self):
        F = power_law_flux(2.0, M=1.0)
        P = make_packet(F, ZERO, 0.0, 1.0, 0.5)
        zl, zr = fan_edges(F, ZERO, P, 1e-12)
        assert zl == pytest.approx(-1.0, abs=1e-11)
        assert zr == pytest.approx(1.0, abs=1e-11)

    def test_saturation_limit(self):
        src = SourceProfile.constant(-1.0)
        F = power_law_flux(2.0, M=1.0)
        P = make_packet(F, src, 0.0, 1.0, 1.0)
        zl, _ = fan_edges(F, src, P, math.inf)
        assert zl == pytest.approx(-1.0 + 0.5, rel=1e-14)  # saturated travel


class TestPacket:
    def setup_method(self):
        self.F = power_law_flux(2.0, M=0.5)
        self.P = make_packet(self.F, ZERO, 0.0, 0.1, 0.5)

    def test_interaction_time(self):
        assert self.P.t_n == pytest.approx(0.4, rel=1e-15)

    def test_plateau_value(self):
        assert packet_solution(self.F, ZERO, self.P, -0.05, 0.1) == pytest.approx(0.5)

    def test_zero_outside_support(self):
        for x in (-0.11, 0.11, 5.0):
            assert packet_solution(self.F, ZERO, self.P, x, 0.1) == 0.0
            assert packet_solution(self.F, ZERO, self.P, x, 2.0) == 0.0

    def test_post_interaction_center_limits(self):
        t = 0.8  # = 2 t_n
        prof = packet_profile(self.F, ZERO, self.P, t)
        left, right = prof.side_values(0.0)
        expected = math.sqrt(0.1 / t)
        assert left == pytest.approx(expected, rel=1e-13)
        assert right == pytest.approx(-expected, rel=1e-13)

    def test_continuity_at_fan_edges(self):
        for t in (0.05, 0.2, 0.39):
            prof = packet_profile(self.F, ZERO, self.P, t)
            zl, zr = fan_edges(self.F, ZERO, self.P, t)
            for x in (zl, zr):
                left, right = prof.side_values(x)
                assert abs(left - right) < 1e-9

    def test_entropy_admissibility_at_center(self):
        for t in (0.1, 0.4, 1.0, 10.0):
            prof = packet_profile(self.F, ZERO, self.P, t)
            left, right = prof.side_values(0.0)
            assert left > right

    def test_conservation(self):
        # region-wise composite quadrature; antisymmetric data integrates to 0
        for t in (0.15, 0.8):
            prof = packet_profile(self.F, ZERO, self.P, t)
            total = 0.0
            for region in prof.regions:
                xs = np.linspace(region.left, region.right, 4001)
                vals = np.array([prof.region_value(region, x) for x in xs])
                total += np.trapezoid(vals, xs)
            assert abs(total) < 1e-6

    def test_edges_meet_at_center(self):
        zl, zr = fan_edges(self.F, ZERO, self.P, self.P.t_n)
        assert zl == pytest.approx(self.P.x_n, abs=1e-14)
        assert zr == pytest.approx(self.P.x_n, abs=1e-14)

    def test_support_never_grows(self):
        rng = np.random.default_rng(2)
        for t in rng.uniform(0.01, 5.0, size=20):
            prof = packet_profile(self.F, ZERO, self.P, t)
            lo, hi = prof.span
            assert lo >= self.P.support[0] - 1e-15
            assert hi <= self.P.support[1] + 1e-15

    def test_with_source_interaction_blocked(self):
        src = SourceProfile.constant(-1.0)
        P = make_packet(power_law_flux(2.0, M=1.0), src, 0.0, 0.5, 1.0)
        assert P.t_n == math.inf  # width/amplitude^p = 0.5 >= saturation 0.5
        prof = packet_profile(power_law_flux(2.0, M=1.0), src, P, 10.0)
        left, right = prof.side_values(0.0)
        assert left > 0.0 > right  # jump never dies

    def test_non_power_law_rejected(self):
        from fracbv import user_flux

        F = user_flux(lambda u: np.cosh(u) - 1, np.sinh, M=1.0)
        with pytest.raises(ValueError):
            make_packet(F, ZERO, 0.0, 0.1, 0.5)


class TestPlanarLift:
    def test_constant_lift(self):
        assert planar_lift(lambda x, t: 0.0, (1.0, 0.0), 3.0, (4.0, 5.0), 1.0) == 3.0

    def test_coordinate_direction(self):
        u = lambda x, t: x * t
        val = planar_lift(u, (1.0, 0.0), 0.5, (2.0, 9.0), 3.0)
        assert val == pytest.approx(0.5 + 6.0)

    def test_oblique_direction(self):
        F = power_law_flux(2.0, M=0.5)
        P = make_packet(F, ZERO, 0.0, 0.1, 0.5)
        u = lambda x, t: packet_solution(F, ZERO, P, x, t)
        val = planar_lift(u, (0.6, 0.8), 1.0, (5.0, 0.0), 0.1)
        assert val == pytest.approx(1.0 + u(3.0, 0.1))

    def test_non_unit_direction_rejected(self):
        with pytest.raises(ValueError):
            planar_lift(lambda x, t: 0.0, (1.0, 1.0), 0.0, (0.0, 0.0), 1.0)


def test_speed_bound_power_law():
    F = power_law_flux(2.0, M=1.0)
    assert speed_bound(F, ZERO, 5.0) == pytest.approx(1.0)
    src = SourceProfile.constant(0.5)
    assert speed_bound(F, src, 2.0) == pytest.approx(math.exp(1.0) ** 2)


def test_profile_contiguity_validation():
    from fracbv import ConstantRegion, PiecewiseProfile

    ctx = FanContext(flux=power_law_flux(2.0, M=1.0), source=ZERO)
    with pytest.raises(ValueError):
        PiecewiseProfile(
            ctx=ctx,
            time=1.0,
            regions=(ConstantRegion(0.0, 1.0, 0.1), ConstantRegion(1.5, 2.0, 0.2)),
        )
