import math

import numpy as np
import pytest

from qutrit_link.core_params import PulseProfile, TimeGrid, build_params
from qutrit_link.errors import WavepacketError
from qutrit_link.sender import (
    Wavepacket,
    beta_coefficients,
    beta_from_theta,
    cumulative_flux,
    peak_intermediate_population,
    photon_wavepackets,
    populations,
    simulate_sender,
    theta,
    theta_by_quadrature,
    theta_infinity,
)
from tests.conftest import REFERENCE_SET

TABLE_ROW_012 = (0.31, 0.36, 0.33)


def test_theta_limits_for_reference_pulse(reference_params, gaussian_profile):
    profile = gaussian_profile(0.12)
    assert theta_infinity(reference_params, profile) == pytest.approx(1.2573, abs=1e-4)
    assert theta(50.0, reference_params, profile) == pytest.approx(theta_infinity(reference_params, profile))
    assert theta(-50.0, reference_params, profile) == pytest.approx(0.0, abs=1e-300)
    assert theta(0.0, reference_params, profile) == pytest.approx(0.5 * theta_infinity(reference_params, profile), rel=1e-14)


def test_theta_closed_form_matches_quadrature(reference_params, gaussian_profile):
    profile = gaussian_profile(0.12, center=0.2)
    times = np.linspace(-0.4, 0.8, 25)
    np.testing.assert_allclose(theta(times, reference_params, profile),
                               theta_by_quadrature(times, reference_params, profile, tol=1e-12), atol=1e-9)


def test_tabulated_theta_matches_quadrature(reference_params):
    times = np.linspace(-0.5, 0.5, 41)
    profile = PulseProfile.tabulated(times, np.exp(-(times / 0.12) ** 2))
    probe = np.array([-0.45, -0.1, 0.0, 0.23, 0.5, 0.9])
    np.testing.assert_allclose(theta(probe, reference_params, profile),
                               theta_by_quadrature(probe, reference_params, profile), atol=1e-8)
    assert theta(0.9, reference_params, profile) == pytest.approx(theta_infinity(reference_params, profile))


def test_populations_start_in_m_minus_one(reference_params, gaussian_profile):
    pops = populations(-10.0, reference_params, gaussian_profile(0.12))
    assert tuple(pops) == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)


def test_populations_at_pulse_center(reference_params, gaussian_profile):
    pops = populations(0.0, reference_params, gaussian_profile(0.12))
    assert tuple(pops) == pytest.approx((0.533, 0.335, 0.132), abs=1e-3)
    assert sum(pops) == pytest.approx(1.0, abs=1e-12)


def test_populations_stay_normalized_over_the_pulse(reference_params, gaussian_profile):
    pops = populations(np.linspace(-1.0, 1.0, 101), reference_params, gaussian_profile(0.12))
    total = pops.minus + pops.zero + pops.plus
    np.testing.assert_allclose(total, 1.0, atol=1e-12)
    assert np.all(pops.plus >= 0.0)


@pytest.mark.parametrize("T1", [0.22, 0.75])
def test_intermediate_population_peaks_at_one_over_e(reference_params, gaussian_profile, T1):
    peak = peak_intermediate_population(reference_params, gaussian_profile(T1))
    assert peak.theta == pytest.approx(1.0, abs=1e-9)
    assert peak.value == pytest.approx(math.exp(-1.0), abs=1e-9)
    grid = np.linspace(-5 * T1, 5 * T1, 20001)
    assert np.max(populations(grid, reference_params, gaussian_profile(T1)).zero) <= peak.value + 1e-12


def test_weak_pulse_has_no_intermediate_peak(gaussian_profile):
    params = build_params(**dict(REFERENCE_SET, omega1=1.0))
    peak = peak_intermediate_population(params, gaussian_profile(0.12))
    assert peak.time is None
    assert peak.theta < 1.0


def test_beta_coefficients_reference_pulse_against_table(reference_params, gaussian_profile):
    beta2 = beta_coefficients(reference_params, gaussian_profile(0.12)).squared()
    assert tuple(beta2) == pytest.approx((0.2844, 0.3576, 0.3580), abs=1e-4)
    for value, printed in zip(beta2, TABLE_ROW_012):
        assert abs(value - printed) <= 0.05


def test_beta_coefficients_long_pulse(reference_params, gaussian_profile):
    beta2 = beta_coefficients(reference_params, gaussian_profile(0.75)).squared()
    assert beta2.minus == pytest.approx(3.87e-4, rel=0.01)
    assert beta2.zero == pytest.approx(3.04e-3, rel=0.01)
    assert beta2.plus == pytest.approx(0.9966, abs=1e-4)


def test_beta_without_drive_is_product_state():
    assert tuple(beta_from_theta(0.0)) == (1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        beta_from_theta(-0.1)


def test_cumulative_flux_limits(reference_params, gaussian_profile):
    profile = gaussian_profile(0.12)
    assert cumulative_flux(-10.0, reference_params, profile) == pytest.approx(0.0, abs=1e-12)
    assert cumulative_flux(10.0, reference_params, profile) == pytest.approx(0.3576 + 2 * 0.3580, abs=2e-4)
    strong = build_params(**dict(REFERENCE_SET, omega1=70.0))
    assert cumulative_flux(10.0, strong, profile) == pytest.approx(2.0, abs=1e-6)


def test_photon_wavepackets_satisfy_norm_identities(reference_params, reference_wavepacket, gaussian_profile):
    beta2 = beta_coefficients(reference_params, gaussian_profile(0.12)).squared()
    n_I, n_II = reference_wavepacket.photon_numbers()
    assert n_I == pytest.approx(beta2.zero + beta2.plus, abs=1e-6)
    assert n_II == pytest.approx(beta2.plus, abs=1e-6)
    assert np.all(reference_wavepacket.phi_I >= 0.0)
    assert not reference_wavepacket.phi_I.flags.writeable


def test_photon_wavepackets_reject_narrow_grid(reference_params, gaussian_profile):
    with pytest.raises(WavepacketError, match="identity"):
        photon_wavepackets(reference_params, gaussian_profile(0.12), TimeGrid(-0.1, 0.1, 200))


def test_sampled_wavepacket_interpolates_and_vanishes_outside():
    grid = TimeGrid(0.0, 1.0, 3)
    wavepacket = Wavepacket.from_samples(grid, [0.0, 1.0, 0.0], [0.0, 0.5, 0.0])
    phi_I, phi_II = wavepacket.amplitudes(np.array([0.25, 2.0]))
    assert phi_I.tolist() == pytest.approx([0.5, 0.0])
    assert phi_II.tolist() == pytest.approx([0.25, 0.0])
    assert wavepacket.center == pytest.approx(0.5)


def test_wavepacket_rejects_negative_samples():
    with pytest.raises(WavepacketError):
        Wavepacket.from_samples(TimeGrid(0.0, 1.0, 3), [0.0, -1.0, 0.0], [0.0, 0.0, 0.0])


def test_simulate_sender_summary(reference_params, gaussian_profile, caplog):
    profile = gaussian_profile(0.12)
    with caplog.at_level("INFO", logger="sender"):
        result = simulate_sender(reference_params, profile, TimeGrid.around(profile, n_points=501))
    assert result.theta_inf == pytest.approx(1.25728, abs=1e-5)
    assert result.photons_emitted == pytest.approx(1.0735, abs=2e-4)
    assert result.theta.shape == (501,)
    assert "theta_inf" in caplog.text
