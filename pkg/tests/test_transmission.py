"""
Tests for transmission estimators, sampling and comparison metrics.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import erfc

from src.ramp_tunneling.analytic.bohmian import onset_resting
from src.ramp_tunneling.analytic.ramp import rho
from src.ramp_tunneling.contracts import GaussianPacket, RampSpec, TransmissionMethod, TransmissionResult
from src.ramp_tunneling.exceptions import DomainError
from src.ramp_tunneling.transmission.estimators import (
    binomial_standard_error,
    cutoff_from_sensitivity,
    deviation_sigma,
    erfc_transmission,
    gamma_ratio,
    jacobian_check,
    monte_carlo_transmission,
    sensitivity_multiplier,
)
from src.ramp_tunneling.transmission.sampling import (
    percentile_positions,
    sample_initial_positions,
    uniform_stream,
)


def _estimate(sigma0: float, alpha: float, n: float) -> float:
    packet = GaussianPacket(sigma0=sigma0)
    x_cutoff = cutoff_from_sensitivity(packet, n).x_cutoff
    x0_min = onset_resting(packet, RampSpec(alpha=alpha), x_cutoff).x0_min
    return erfc_transmission(packet, x0_min).value


class TestSensitivityCutoff:
    @pytest.mark.parametrize("n, expected", [(4, 4.2919), (6, 5.2565), (7, 5.6777)])
    def test_multiplier(self, n, expected):
        assert sensitivity_multiplier(n) == pytest.approx(expected, abs=1e-4)

    def test_cutoff_position(self, narrow_packet):
        cutoff = cutoff_from_sensitivity(narrow_packet, 6)
        assert cutoff.N == pytest.approx(5.2565, abs=1e-4)
        assert cutoff.x_cutoff == pytest.approx(0.7885, abs=1e-4)

    def test_non_positive_sensitivity(self):
        with pytest.raises(DomainError):
            sensitivity_multiplier(0.0)

    @given(n=st.floats(min_value=0.1, max_value=20.0), sigma0=st.floats(min_value=0.01, max_value=2.0))
    def test_density_ratio_at_cutoff(self, n, sigma0):
        packet = GaussianPacket(sigma0=sigma0)
        x_cutoff = cutoff_from_sensitivity(packet, n).x_cutoff
        assert float(gamma_ratio(packet, x_cutoff)) == pytest.approx(10.0 ** -n, rel=1e-9)


class TestErfcEstimate:
    def test_half_at_centroid(self, narrow_packet):
        assert erfc_transmission(narrow_packet, narrow_packet.x0).value == pytest.approx(0.5)

    def test_matches_closed_form(self, narrow_packet):
        result = erfc_transmission(narrow_packet, 0.1774)
        assert result.method is TransmissionMethod.ERFC_ESTIMATE
        assert result.x0_min_used == 0.1774
        assert result.value == pytest.approx(0.5 * erfc(0.1774 / (math.sqrt(2.0) * 0.15)), rel=1e-12)
        assert result.value == pytest.approx(0.1185, abs=3e-4)

    def test_corrected_onset_example(self, narrow_packet):
        assert erfc_transmission(narrow_packet, 0.1547).value == pytest.approx(0.15149, rel=1e-2)

    def test_resting_onset_estimate(self, narrow_packet, ramp):
        assert _estimate(0.15, 10.0, 6) == pytest.approx(0.11795, abs=5e-4)

    def test_finite_bound_splits_total(self, narrow_packet):
        inner = erfc_transmission(narrow_packet, 0.1, 0.4).value
        outer = erfc_transmission(narrow_packet, 0.4).value
        total = erfc_transmission(narrow_packet, 0.1).value
        assert inner + outer == pytest.approx(total, rel=1e-12)

    def test_empty_interval(self, narrow_packet):
        assert erfc_transmission(narrow_packet, 0.4, 0.4).value == 0.0

    def test_far_tail_without_cancellation(self, narrow_packet):
        value = erfc_transmission(narrow_packet, 10 * narrow_packet.sigma0, 11 * narrow_packet.sigma0).value
        assert 0.0 < value < 1e-20

    def test_non_finite_onset(self, narrow_packet):
        with pytest.raises(DomainError):
            erfc_transmission(narrow_packet, math.nan)

    @given(
        a=st.floats(min_value=-1.0, max_value=1.0),
        gap=st.floats(min_value=1e-3, max_value=1.0),
    )
    def test_decreasing_in_onset(self, a, gap):
        packet = GaussianPacket(sigma0=0.15)
        assert erfc_transmission(packet, a + gap).value <= erfc_transmission(packet, a).value

    @given(
        x0_min=st.floats(min_value=0.01, max_value=1.0),
        sigma0=st.floats(min_value=0.05, max_value=0.5),
    )
    def test_increasing_in_width(self, x0_min, sigma0):
        narrow = erfc_transmission(GaussianPacket(sigma0=sigma0), x0_min).value
        wide = erfc_transmission(GaussianPacket(sigma0=1.1 * sigma0), x0_min).value
        assert wide >= narrow


class TestEstimateTrends:
    @pytest.mark.parametrize("sigma0", [0.1, 0.15, 0.2, 0.3])
    def test_steeper_ramp_transmits_less(self, sigma0):
        values = [_estimate(sigma0, alpha, 6) for alpha in (5.0, 10.0, 20.0)]
        assert values[0] > values[1] > values[2]
        assert values[0] <= 0.5

    @pytest.mark.parametrize("sigma0", [0.1, 0.15, 0.2, 0.3])
    def test_higher_sensitivity_transmits_less(self, sigma0):
        values = [_estimate(sigma0, 10.0, n) for n in (4, 5, 6, 7)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_flat_ramp_limit(self):
        assert _estimate(0.15, 1e-3, 6) > 0.49

    def test_sensitivity_gap(self):
        gap = _estimate(0.138, 10.0, 4) - _estimate(0.138, 10.0, 7)
        assert gap == pytest.approx(0.0336, abs=3e-3)


class TestMonteCarlo:
    def test_agrees_with_erfc(self, narrow_packet):
        result = monte_carlo_transmission(narrow_packet, 0.1774, n_samples=100000, seed=7)
        assert result.method is TransmissionMethod.MONTE_CARLO
        assert result.n_samples == 100000
        expected = erfc_transmission(narrow_packet, 0.1774).value
        assert result.value == pytest.approx(expected, abs=4.0 * binomial_standard_error(expected, 100000))

    def test_limits(self, narrow_packet):
        assert monte_carlo_transmission(narrow_packet, -100.0, n_samples=1000).value == 1.0
        assert monte_carlo_transmission(narrow_packet, 0.2, 0.2, n_samples=1000).value == 0.0

    def test_deterministic_for_seed(self, narrow_packet):
        first = monte_carlo_transmission(narrow_packet, 0.1, n_samples=5000, seed=11)
        second = monte_carlo_transmission(narrow_packet, 0.1, n_samples=5000, seed=11)
        assert first.value == second.value

    def test_independent_of_sharding(self, narrow_packet):
        whole = monte_carlo_transmission(narrow_packet, 0.1, n_samples=10007, seed=3)
        sharded = monte_carlo_transmission(narrow_packet, 0.1, n_samples=10007, seed=3, shard_size=1000)
        assert whole.value == sharded.value

    def test_unbiased_over_seeds(self, narrow_packet):
        expected = erfc_transmission(narrow_packet, 0.1774).value
        values = [monte_carlo_transmission(narrow_packet, 0.1774, n_samples=1000, seed=s).value for s in range(100)]
        spread = binomial_standard_error(expected, 1000) / math.sqrt(100)
        assert abs(np.mean(values) - expected) <= 3.0 * spread

    def test_invalid_sample_count(self, narrow_packet):
        with pytest.raises(DomainError):
            monte_carlo_transmission(narrow_packet, 0.1, n_samples=0)


class TestSampling:
    def test_stream_offsets(self):
        whole = uniform_stream(5, 10)
        np.testing.assert_array_equal(uniform_stream(5, 7, offset=3), whole[3:])
        assert np.all((whole > 0.0) & (whole < 1.0))

    def test_sample_offsets(self, narrow_packet):
        whole = sample_initial_positions(narrow_packet, 10, seed=0)
        np.testing.assert_array_equal(sample_initial_positions(narrow_packet, 7, seed=0, offset=3), whole[3:])

    def test_sample_moments(self, narrow_packet):
        samples = sample_initial_positions(narrow_packet, 200000, seed=1)
        assert np.mean(samples) == pytest.approx(0.0, abs=3e-3)
        assert np.std(samples) == pytest.approx(0.15, rel=1e-2)

    def test_percentiles_centered(self, narrow_packet):
        positions = percentile_positions(narrow_packet, 99)
        assert positions[49] == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.diff(positions) > 0)

    def test_percentiles_with_bounds(self, narrow_packet):
        positions = percentile_positions(narrow_packet, 16, lower=-0.15, upper=0.7885)
        assert positions[0] == -0.15
        assert positions[-1] == 0.7885
        assert np.all(np.diff(positions) > 0)

    def test_empty_percentile_range(self, narrow_packet):
        with pytest.raises(DomainError):
            percentile_positions(narrow_packet, 5, lower=0.3, upper=0.1)


class TestMetrics:
    def test_deviation_example(self):
        assert deviation_sigma(0.11795, 0.15149) == pytest.approx(22.14, abs=0.05)

    def test_deviation_of_results(self):
        estimate = TransmissionResult(value=0.1, method=TransmissionMethod.ERFC_ESTIMATE)
        reference = TransmissionResult(value=0.1, method=TransmissionMethod.WAVE_PACKET)
        assert deviation_sigma(estimate, reference) == 0.0

    def test_deviation_needs_positive_reference(self):
        with pytest.raises(DomainError):
            deviation_sigma(0.1, 0.0)

    def test_standard_error(self):
        assert binomial_standard_error(0.5, 100) == pytest.approx(0.05)
        assert binomial_standard_error(0.0, 100) == 0.0

    def test_jacobian_at_release(self, narrow_packet, ramp):
        inits = np.linspace(-0.3, 0.3, 31)
        assert jacobian_check(narrow_packet, ramp, inits, 0.0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
    def test_affine_closed_form_map_is_exact(self, narrow_packet, ramp, t):
        inits = np.linspace(-0.3, 0.3, 31)
        assert jacobian_check(narrow_packet, ramp, inits, t) <= 1e-9

    def test_defect_shrinks_quadratically_with_spacing(self, narrow_packet):
        # x -> exp(x) carries rho0 onto rho0(log y) / y exactly
        def carried(y):
            return rho(narrow_packet, None, np.log(y), 0.0) / y

        defects = []
        for count in (31, 61, 121):
            inits = np.linspace(-0.3, 0.3, count)
            defects.append(
                jacobian_check(narrow_packet, None, inits, 1.0, positions=np.exp(inits), density=carried)
            )
        assert defects[0] < 1e-2
        for coarse, fine in zip(defects, defects[1:]):
            assert coarse / fine == pytest.approx(4.0, rel=0.25)

    def test_jacobian_needs_increasing_inits(self, narrow_packet, ramp):
        with pytest.raises(DomainError):
            jacobian_check(narrow_packet, ramp, [0.1, 0.0, 0.2], 1.0)
