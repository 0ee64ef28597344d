import math

import numpy as np
import pytest

from fracbv import (
    NumericsError,
    TriangularSetup,
    alternating_initial_data,
    characteristic_flow,
    continuity_defect,
    flow_positions,
    fractional_variation,
    p_variation,
    pulse_value,
    transport_velocity,
    transported_value,
    transported_variation_sums,
    u_value,
    u_values,
    u_variation_lower_bounds,
)
from fracbv import SampledFunction
from fracbv.triangular import midpoint_markers, transported_points, transported_values

SETUP = TriangularSetup(p=2.0, T=1.0, N=64)
DT = 1.0 / 2**10  # coarse step keeps the ODE-heavy tests quick


class TestSetup:
    def test_formation_times_exceed_horizon(self):
        assert np.all(SETUP.t_form > SETUP.T)
        assert SETUP.t_form[0] == pytest.approx(2.0)

    def test_amplitude_identity(self):
        # amplitude^p * formation time = width, exactly by construction
        np.testing.assert_allclose(
            SETUP.amplitudes**SETUP.p * SETUP.t_form, SETUP.widths, rtol=1e-14
        )

    def test_supports_contiguous(self):
        np.testing.assert_allclose(
            np.diff(SETUP.edges), 2.0 * SETUP.widths, rtol=1e-14
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            TriangularSetup(p=0.5, T=1.0, N=4)
        with pytest.raises(ValueError):
            TriangularSetup(p=2.0, T=-1.0, N=4)


class TestPulse:
    def test_fan_branch_value(self):
        # first pulse: fan reaches past x = 0.04 at t = 1
        assert pulse_value(SETUP, 1, 0.04, 1.0) == pytest.approx(0.2, rel=1e-14)

    def test_zero_at_center_and_ends(self):
        w1 = SETUP.widths[0]
        for t in (0.25, 1.0):
            assert pulse_value(SETUP, 1, 0.0, t) == 0.0
            assert pulse_value(SETUP, 1, w1, t) == pytest.approx(0.0, abs=1e-13)
            assert pulse_value(SETUP, 1, 2 * w1, t) == 0.0

    def test_seam_identity(self):
        # at x = amplitude^p t the fan and the decreasing branch agree
        for n in (1, 3, 10):
            i = n - 1
            r = SETUP.widths[i] / SETUP.t_form[i] * 0.7
            fan = (r / 0.7) ** SETUP.s
            back = ((SETUP.widths[i] - r) / (SETUP.t_form[i] - 0.7)) ** SETUP.s
            assert fan == pytest.approx(back, rel=1e-13)
            assert pulse_value(SETUP, n, r * (1 - 1e-12), 0.7) == pytest.approx(fan, rel=1e-9)

    def test_antisymmetry(self):
        w1 = SETUP.widths[0]
        for xi in (0.2, 0.8, 1.3):
            left = pulse_value(SETUP, 1, w1 - xi * w1, 0.5)
            right = pulse_value(SETUP, 1, w1 + xi * w1, 0.5)
            assert left == pytest.approx(-right, rel=1e-12)

    def test_initial_data_recovered_at_time_zero(self):
        w1, t1 = SETUP.widths[0], SETUP.t_form[0]
        assert pulse_value(SETUP, 1, 0.3 * w1, 0.0) == pytest.approx(
            ((w1 - 0.3 * w1) / t1) ** 0.5, rel=1e-13
        )

    def test_index_validation(self):
        with pytest.raises(ValueError):
            pulse_value(SETUP, 0, 0.1, 0.5)
        with pytest.raises(ValueError):
            pulse_value(SETUP, 1, 0.1, 2.0)


class TestGlobalField:
    def test_continuity_defect_tiny(self):
        for t in (0.25, 1.0):
            assert continuity_defect(SETUP, t) < 1e-8

    def test_zero_outside_all_supports(self):
        assert u_value(SETUP, -1.0, 0.5) == 0.0
        assert u_value(SETUP, SETUP.edges[-1] + 1.0, 0.5) == 0.0

    def test_slope_field_lipschitz(self):
        # difference quotients of f'(u) stay under 1/t + max 1/(t_n - T)
        t = 0.5
        xs = np.linspace(-0.1, SETUP.edges[-1] + 0.1, 20001)
        u = u_values(SETUP, xs, t)
        slopes = u * np.abs(u) ** (SETUP.p - 1.0)
        quotients = np.abs(np.diff(slopes)) / np.diff(xs)
        bound = 1.0 / t + float(np.max(1.0 / (SETUP.t_form - SETUP.T)))
        assert quotients.max() <= bound * (1.0 + 1e-6)

    def test_velocity_outside_supports(self):
        assert transport_velocity(SETUP, -5.0, 0.5) == 0.0

    def test_velocity_linear_on_fans(self):
        r1 = SETUP.widths[0] / SETUP.t_form[0] * 1.0
        for frac in (0.2, 0.5, 0.9):
            x = frac * r1
            assert transport_velocity(SETUP, x, 1.0) == pytest.approx(x / 1.0, rel=1e-13)


class TestCharacteristics:
    def test_frozen_outside(self):
        assert characteristic_flow(SETUP, -2.0, 1.0, dt=DT) == -2.0

    def test_fan_flow_closed_form(self):
        t_a, t_b = 0.5, 1.0
        x_a = 0.3 * SETUP.widths[0] / SETUP.t_form[0] * t_a  # inside the fan
        got = characteristic_flow(SETUP, x_a, t_b, dt=DT / 4, t_start=t_a)
        assert got == pytest.approx(x_a * t_b / t_a, rel=1e-10)

    def test_backward_branch_closed_form(self):
        # characteristics that stay on the decreasing branch are straight in
        # the rescaled time: X(t) = w - (w - x0)(t1 - t)/t1
        w1, t1 = SETUP.widths[0], SETUP.t_form[0]
        x0 = 1.0
        closed = w1 - (w1 - x0) * (t1 - 1.0) / t1
        assert characteristic_flow(SETUP, x0, 1.0, dt=DT / 4) == pytest.approx(
            closed, rel=1e-10
        )

    def test_order_preserved_random_pairs(self):
        rng = np.random.default_rng(17)
        x0 = np.sort(rng.uniform(-0.5, SETUP.edges[-1] + 0.5, size=400))
        xt = flow_positions(SETUP, x0, 1.0, dt=DT)
        resolvable = np.diff(x0) > 1e-9
        assert np.all(np.diff(xt)[resolvable] > 0.0)

    def test_time_window_validated(self):
        with pytest.raises(ValueError):
            characteristic_flow(SETUP, 0.0, 2.0, dt=DT)


class TestTransport:
    def test_initial_time_identity(self):
        v0 = alternating_initial_data()
        xs = np.array([0.3, 0.7, 0.05])
        np.testing.assert_array_equal(transported_values(SETUP, v0, xs, 0.0), v0(xs))

    def test_alternating_pattern(self):
        v0 = alternating_initial_data()
        ys = midpoint_markers(12)
        vals = v0(ys)
        assert np.all(vals[::2] == 1.0)  # odd n
        assert np.all(vals[1::2] == -1.0)  # even n
        assert v0(0.7) == 1.0 and v0(-3.0) == 1.0

    def test_traced_values_match_advected_pattern(self):
        v0 = alternating_initial_data()
        t = 0.5
        ys, zs = transported_points(SETUP, t, 10, dt=DT)
        vals = transported_values(SETUP, v0, zs, t, dt=DT)
        np.testing.assert_array_equal(vals, v0(ys))

    def test_dilution_factor_optional(self):
        v0 = alternating_initial_data()
        t = 0.5
        _, zs = transported_points(SETUP, t, 4, dt=DT)
        plain = transported_values(SETUP, v0, zs, t, dt=DT)
        weighted = transported_values(SETUP, v0, zs, t, dt=DT, include_dilution=True)
        assert np.all(np.sign(weighted) == np.sign(plain))
        assert np.any(np.abs(weighted - plain) > 1e-8)  # flow genuinely stretches

    def test_scalar_wrapper(self):
        v0 = alternating_initial_data()
        _, zs = transported_points(SETUP, 0.25, 3, dt=DT)
        assert transported_value(SETUP, v0, float(zs[0]), 0.25, dt=DT) == v0(
            midpoint_markers(3)
        )[0]


class TestDivergenceSums:
    @pytest.mark.parametrize(
        "N,s_prime,expected",
        [(10, 1.0, 20.0), (10, 0.5, 40.0), (0, 1.0, 0.0)],
    )
    def test_exact_values(self, N, s_prime, expected):
        assert transported_variation_sums(SETUP, 0.5, s_prime, N, dt=DT) == expected

    def test_linear_growth(self):
        vals = [transported_variation_sums(SETUP, 0.25, 1.0, N, dt=DT) for N in (4, 8, 16)]
        assert vals == [8.0, 16.0, 32.0]

    def test_order_validation(self):
        with pytest.raises(ValueError):
            transported_variation_sums(SETUP, 0.5, 1.5, 4, dt=DT)


class TestVariationBounds:
    def test_per_pulse_bound_formula(self):
        eps = 0.5
        bounds = u_variation_lower_bounds(SETUP, eps)
        expo = 1.0 / (1.0 + SETUP.p * eps)
        # same series through the amplitude identity
        again = 4.0 * (SETUP.amplitudes**SETUP.p) ** expo
        np.testing.assert_allclose(bounds, again, rtol=1e-13)

    def test_measured_variation_attains_bound(self):
        # sampling each pulse at its seams realizes the four monotone swings
        eps = 0.5
        t = 1.0
        s_prime = 1.0 / (1.0 / SETUP.s + SETUP.p * eps / SETUP.s / SETUP.p)  # = 1/(1/s+eps) ... computed below
        s_prime = 1.0 / (1.0 / SETUP.s + eps)
        bounds = u_variation_lower_bounds(SETUP, eps)
        for n in (1, 2, 5):
            i = n - 1
            w, tn = SETUP.widths[i], SETUP.t_form[i]
            r = w / tn * t
            locs = np.array([0.0, r, w, 2 * w - r, 2 * w]) + SETUP.edges[i]
            xs = np.unique(
                np.concatenate([locs, np.linspace(SETUP.edges[i], SETUP.edges[i] + 2 * w, 41)])
            )
            vals = u_values(SETUP, xs, t)
            measured = fractional_variation(SampledFunction(xs, vals), s_prime)
            assert measured >= bounds[i] * (1.0 - 1e-12)
            assert measured == pytest.approx(bounds[i], rel=1e-10)

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            u_variation_lower_bounds(SETUP, 0.0)
