"""
Tests for closed-form Bohmian trajectories, turning points and onset estimators.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from src.ramp_tunneling.analytic.bohmian import (
    bohm_velocity,
    critical_delta,
    critical_position,
    effective_velocity,
    estimate_onset,
    fast_boost_turning_point,
    fast_boost_turning_time,
    onset_fast_boost,
    onset_numeric,
    onset_resting,
    onset_slow_boost,
    recommend_onset_regime,
    separation_ratio,
    slow_boost_turning_point,
    slow_boost_turning_time,
    trajectory,
    trajectory_bundle,
    turning_point_v0zero,
    turning_time_general,
    turning_time_v0zero,
)
from src.ramp_tunneling.analytic.ramp import classical_path, psi
from src.ramp_tunneling.contracts import (
    GaussianPacket,
    OnsetRegime,
    RampSpec,
    TrajectoryInitial,
    TurningKind,
)
from src.ramp_tunneling.exceptions import DomainError
from src.ramp_tunneling.transmission.estimators import cutoff_from_sensitivity


class TestVelocityField:
    def test_centroid_moves_classically(self, ramp):
        packet = GaussianPacket(p0=1.0, sigma0=0.15)
        x_cl, p_cl = classical_path(packet, ramp, 0.7)
        assert float(bohm_velocity(packet, ramp, x_cl, 0.7)) == pytest.approx(float(p_cl))

    def test_release_velocity_is_uniform(self, ramp):
        packet = GaussianPacket(p0=1.5, sigma0=0.15)
        np.testing.assert_allclose(bohm_velocity(packet, ramp, np.linspace(-1, 1, 11), 0.0), 1.5)

    def test_matches_phase_gradient(self, narrow_packet, ramp):
        init = TrajectoryInitial.offset(narrow_packet, 0.3)
        t = 0.5
        x = float(trajectory(narrow_packet, ramp, init, t))
        h = 1e-5
        ratio = psi(narrow_packet, ramp, x + h, t) * np.conj(psi(narrow_packet, ramp, x - h, t))
        gradient = float(np.angle(ratio)) / (2.0 * h)
        assert float(bohm_velocity(narrow_packet, ramp, x, t)) == pytest.approx(gradient, rel=1e-6)


class TestTrajectories:
    def test_starts_at_initial_position(self, narrow_packet, ramp):
        init = TrajectoryInitial.at(narrow_packet, 0.2)
        assert float(trajectory(narrow_packet, ramp, init, 0.0)) == pytest.approx(0.2)

    def test_zero_offset_is_centroid(self, narrow_packet, ramp):
        init = TrajectoryInitial.offset(narrow_packet, 0.0)
        times = np.linspace(0.0, 2.0, 21)
        x_cl, _ = classical_path(narrow_packet, ramp, times)
        np.testing.assert_allclose(trajectory(narrow_packet, ramp, init, times), x_cl)

    def test_offset_trajectory_at_unit_time(self, ramp):
        packet = GaussianPacket(sigma0=0.3)
        init = TrajectoryInitial.offset(packet, 0.3)
        expected = -5.0 + 0.3 * math.sqrt(1.0 + (1.0 / 0.6 / 0.3) ** 2)
        assert float(trajectory(packet, ramp, init, 1.0)) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(-3.3066, abs=1e-3)

    def test_inconsistent_initial_condition(self, narrow_packet, ramp):
        with pytest.raises(DomainError):
            trajectory(narrow_packet, ramp, TrajectoryInitial(x_init=0.5, delta0=0.1), 0.2)

    def test_agrees_with_integrated_velocity(self, narrow_packet, ramp):
        solution = solve_ivp(
            lambda t, x: bohm_velocity(narrow_packet, ramp, x, t),
            (0.0, 1.0),
            [0.3],
            method="DOP853",
            rtol=1e-11,
            atol=1e-12,
            dense_output=True,
        )
        times = np.linspace(0.0, 1.0, 11)
        init = TrajectoryInitial.at(narrow_packet, 0.3)
        np.testing.assert_allclose(
            solution.sol(times)[0], trajectory(narrow_packet, ramp, init, times), rtol=0, atol=1e-6
        )

    def test_bundle_shape_and_ratio(self, narrow_packet, ramp):
        inits = np.array([-0.2, 0.0, 0.1, 0.4])
        times = np.array([0.0, 0.5, 1.0])
        bundle = trajectory_bundle(narrow_packet, ramp, inits, times)
        assert bundle.shape == (3, 4)
        ratio = (bundle[:, 3] - bundle[:, 0]) / (inits[3] - inits[0])
        np.testing.assert_allclose(ratio, separation_ratio(narrow_packet, times))

    @given(
        d1=st.floats(min_value=-1.0, max_value=1.0),
        gap=st.floats(min_value=1e-4, max_value=1.0),
        t=st.floats(min_value=0.0, max_value=5.0),
    )
    def test_trajectories_never_cross(self, d1, gap, t):
        packet = GaussianPacket(sigma0=0.15)
        ramp = RampSpec(alpha=10.0)
        lower = trajectory(packet, ramp, TrajectoryInitial.offset(packet, d1), t)
        upper = trajectory(packet, ramp, TrajectoryInitial.offset(packet, d1 + gap), t)
        assert float(upper) > float(lower)

    @settings(max_examples=50)
    @given(
        delta0=st.floats(min_value=-1.0, max_value=1.0),
        t=st.floats(min_value=0.01, max_value=2.0),
    )
    def test_position_derivative_is_velocity(self, delta0, t):
        packet = GaussianPacket(p0=0.5, sigma0=0.2)
        ramp = RampSpec(alpha=10.0)
        init = TrajectoryInitial.offset(packet, delta0)
        h = 1e-5
        slope = (float(trajectory(packet, ramp, init, t + h)) - float(trajectory(packet, ramp, init, t - h))) / (2 * h)
        velocity = float(bohm_velocity(packet, ramp, trajectory(packet, ramp, init, t), t))
        assert slope == pytest.approx(velocity, abs=1e-6 * max(1.0, abs(velocity)))


class TestTurningPoints:
    def test_critical_distance(self, narrow_packet, ramp):
        assert critical_delta(narrow_packet, ramp) == pytest.approx(0.02025, rel=1e-9)
        assert critical_position(narrow_packet, ramp) == pytest.approx(0.02025, rel=1e-9)

    def test_critical_distance_scales_as_fourth_power(self, ramp):
        small = critical_delta(GaussianPacket(sigma0=0.1), ramp)
        large = critical_delta(GaussianPacket(sigma0=0.2), ramp)
        assert large / small == pytest.approx(16.0)

    def test_turning_time_example(self, narrow_packet, ramp):
        event = turning_time_v0zero(narrow_packet, ramp, 0.3)
        assert event.kind is TurningKind.TRUE_TURNING
        assert event.t_tp == pytest.approx(0.6651, abs=1e-4)

    def test_turning_time_matches_velocity_root(self, narrow_packet, ramp):
        init = TrajectoryInitial.offset(narrow_packet, 0.3)

        def velocity(t):
            return float(bohm_velocity(narrow_packet, ramp, trajectory(narrow_packet, ramp, init, t), t))

        root = brentq(velocity, 1e-6, 5.0, xtol=1e-14)
        assert turning_time_v0zero(narrow_packet, ramp, 0.3).t_tp == pytest.approx(root, abs=1e-6)

    def test_turning_point_is_on_trajectory(self, narrow_packet, ramp):
        event = turning_time_v0zero(narrow_packet, ramp, 0.3)
        init = TrajectoryInitial.offset(narrow_packet, 0.3)
        assert event.x_tp == pytest.approx(float(trajectory(narrow_packet, ramp, init, event.t_tp)), rel=1e-10)
        assert event.x_tp == pytest.approx(2.2323, abs=1e-4)
        velocity = bohm_velocity(narrow_packet, ramp, event.x_tp, event.t_tp)
        assert float(velocity) == pytest.approx(0.0, abs=1e-8)

    def test_immediate_backward_below_critical(self, narrow_packet, ramp):
        event = turning_time_v0zero(narrow_packet, ramp, 0.01)
        assert event.kind is TurningKind.IMMEDIATE_BACKWARD
        assert event.t_tp == 0.0
        assert event.x_tp == pytest.approx(0.01)

    def test_critical_offset_turns_at_release(self, narrow_packet, ramp):
        event = turning_time_v0zero(narrow_packet, ramp, critical_delta(narrow_packet, ramp))
        assert event.t_tp == 0.0

    def test_classification_flips_once(self, narrow_packet, ramp):
        delta_c = critical_delta(narrow_packet, ramp)
        offsets = delta_c + np.linspace(-5e-4, 5e-4, 101)
        kinds = [turning_time_v0zero(narrow_packet, ramp, d).kind for d in offsets]
        flips = sum(1 for a, b in zip(kinds, kinds[1:]) if a is not b)
        assert flips == 1
        assert kinds[0] is TurningKind.IMMEDIATE_BACKWARD
        assert kinds[-1] is TurningKind.TRUE_TURNING

    def test_turning_point_below_critical_rejected(self, narrow_packet, ramp):
        with pytest.raises(DomainError):
            turning_point_v0zero(narrow_packet, ramp, 0.01)

    def test_resting_formulas_reject_moving_packet(self, ramp):
        moving = GaussianPacket(p0=1.0, sigma0=0.15)
        with pytest.raises(DomainError):
            turning_time_v0zero(moving, ramp, 0.3)
        with pytest.raises(DomainError):
            onset_resting(moving, ramp, 1.0)

    def test_general_turning_time_delegates_at_rest(self, narrow_packet, ramp):
        assert turning_time_general(narrow_packet, ramp, 0.3) == turning_time_v0zero(narrow_packet, ramp, 0.3)

    @pytest.mark.parametrize("delta0", [-0.2, 0.0, 0.1, 0.5])
    def test_general_turning_time_zeroes_velocity(self, ramp, delta0):
        packet = GaussianPacket(p0=1.0, sigma0=0.15)
        event = turning_time_general(packet, ramp, delta0)
        assert event.t_tp > 0.0
        assert float(bohm_velocity(packet, ramp, event.x_tp, event.t_tp)) == pytest.approx(0.0, abs=1e-8)

    def test_slow_boost_limit(self, ramp):
        packet = GaussianPacket(p0=0.5, sigma0=0.5)
        exact = turning_time_general(packet, ramp, 0.1).t_tp
        assert slow_boost_turning_time(packet, ramp, 0.1) == pytest.approx(0.5 / 9.6)
        assert exact == pytest.approx(slow_boost_turning_time(packet, ramp, 0.1), rel=1e-2)
        linear = slow_boost_turning_time(packet, ramp, 0.1, linearized=True)
        assert linear == pytest.approx(0.05 * 1.04)
        assert slow_boost_turning_point(packet, ramp, 0.1) == pytest.approx(0.1 + 0.25 / 20.0)

    def test_slow_boost_without_turning(self, ramp):
        packet = GaussianPacket(p0=0.5, sigma0=0.5)
        with pytest.raises(DomainError):
            slow_boost_turning_time(packet, ramp, 5.0)

    def test_fast_boost_uses_effective_velocity(self, ramp):
        packet = GaussianPacket(p0=1.0, sigma0=0.15)
        v_eff = effective_velocity(packet, 0.15)
        assert v_eff == pytest.approx(1.0 + packet.v_s)
        assert fast_boost_turning_time(packet, ramp, 0.15) == pytest.approx(v_eff / 10.0)
        assert fast_boost_turning_point(packet, ramp, 0.15) == pytest.approx(v_eff ** 2 / 20.0)


class TestOnsetEstimators:
    def test_resting_onset_example(self, narrow_packet, ramp):
        x_cutoff = cutoff_from_sensitivity(narrow_packet, 6).x_cutoff
        onset = onset_resting(narrow_packet, ramp, x_cutoff)
        assert onset.regime is OnsetRegime.RESTING
        assert onset.x0_min == pytest.approx(0.1774, abs=5e-4)

    def test_resting_onset_turns_on_cutoff(self, narrow_packet, ramp):
        x_cutoff = 0.7885
        onset = onset_resting(narrow_packet, ramp, x_cutoff)
        assert turning_point_v0zero(narrow_packet, ramp, onset.x0_min) == pytest.approx(x_cutoff, rel=1e-10)

    def test_resting_onset_at_zero_radicand(self, narrow_packet, ramp):
        x_cutoff = 0.5 * narrow_packet.sigma0 * ramp.alpha / narrow_packet.alpha_s
        assert onset_resting(narrow_packet, ramp, x_cutoff).x0_min == pytest.approx(0.0, abs=1e-7)

    def test_resting_onset_outside_domain(self, narrow_packet, ramp):
        with pytest.raises(DomainError):
            onset_resting(narrow_packet, ramp, -0.5)

    def test_slow_boost_onset(self, ramp):
        packet = GaussianPacket(p0=2.0, sigma0=0.5)
        assert onset_slow_boost(packet, ramp, 1.0).x0_min == pytest.approx(0.8)

    def test_fast_boost_onset_example(self, ramp):
        packet = GaussianPacket(p0=1.0, sigma0=0.15)
        x_cutoff = cutoff_from_sensitivity(packet, 6).x_cutoff
        onset = onset_fast_boost(packet, ramp, x_cutoff)
        assert onset.regime is OnsetRegime.FAST_BOOST
        assert onset.x0_min == pytest.approx(0.1337, abs=1e-3)

    def test_fast_boost_onset_slope_in_velocity(self, ramp):
        slow = onset_fast_boost(GaussianPacket(p0=1.0, sigma0=0.15), ramp, 0.8).x0_min
        fast = onset_fast_boost(GaussianPacket(p0=2.0, sigma0=0.15), ramp, 0.8).x0_min
        assert fast - slow == pytest.approx(-0.15 / (1.0 / 0.3))

    def test_fast_boost_onset_behind_centroid(self, ramp):
        with pytest.raises(DomainError):
            onset_fast_boost(GaussianPacket(p0=1.0, sigma0=0.15), ramp, -0.1)

    def test_fast_boost_and_resting_agree_far_away(self, narrow_packet, ramp):
        resting = onset_resting(narrow_packet, ramp, 100.0).x0_min
        fast = onset_fast_boost(narrow_packet, ramp, 100.0).x0_min
        assert fast == pytest.approx(resting, rel=1e-4)

    def test_numeric_onset_matches_resting_formula(self, narrow_packet, ramp):
        x_cutoff = cutoff_from_sensitivity(narrow_packet, 6).x_cutoff
        numeric = onset_numeric(narrow_packet, ramp, x_cutoff)
        assert numeric.regime is OnsetRegime.NUMERIC
        assert numeric.x0_min == pytest.approx(onset_resting(narrow_packet, ramp, x_cutoff).x0_min, rel=1e-9)

    def test_numeric_onset_for_moving_packet(self, ramp):
        packet = GaussianPacket(p0=1.0, sigma0=0.15)
        x_cutoff = 0.7885
        onset = onset_numeric(packet, ramp, x_cutoff)
        event = turning_time_general(packet, ramp, onset.x0_min - packet.x0)
        assert event.x_tp == pytest.approx(x_cutoff, abs=1e-9)

    @pytest.mark.parametrize(
        "p0, sigma0, expected",
        [
            (0.0, 0.15, OnsetRegime.RESTING),
            (0.5, 0.5, OnsetRegime.SLOW_BOOST),
            (5.0, 0.15, OnsetRegime.FAST_BOOST),
            (1.0, 0.15, OnsetRegime.NUMERIC),
        ],
    )
    def test_regime_recommendation(self, ramp, p0, sigma0, expected):
        assert recommend_onset_regime(GaussianPacket(p0=p0, sigma0=sigma0), ramp) is expected

    def test_estimate_onset_dispatch(self, ramp):
        packet = GaussianPacket(p0=5.0, sigma0=0.15)
        assert estimate_onset(packet, ramp, 3.0) == onset_fast_boost(packet, ramp, 3.0)

    @given(
        sigma0=st.floats(min_value=0.08, max_value=0.3),
        n=st.floats(min_value=2.0, max_value=10.0),
        alpha=st.floats(min_value=1.0, max_value=20.0),
    )
    def test_resting_onset_inside_barrier(self, sigma0, n, alpha):
        packet = GaussianPacket(sigma0=sigma0)
        ramp = RampSpec(alpha=alpha)
        x_cutoff = cutoff_from_sensitivity(packet, n).x_cutoff
        assume(x_cutoff > 0.5 * sigma0 * alpha / packet.alpha_s)
        onset = onset_resting(packet, ramp, x_cutoff)
        assert packet.x0 <= onset.x0_min <= x_cutoff + 1e-9
