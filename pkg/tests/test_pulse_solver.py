import math

import numpy as np
import pytest

from qutrit_link.core_params import PulseProfile, TimeGrid
from qutrit_link.errors import SolverError
from qutrit_link.pulse_solver import (
    explicit_plan,
    overlap_imbalance,
    solve_amplitude,
    solve_delay,
    solve_pulse,
)
from qutrit_link.receiver import overlap_integrals
from qutrit_link.sender import Wavepacket, photon_wavepackets


def _synthetic(scale_II: float) -> Wavepacket:
    grid = TimeGrid(-0.6, 0.6, 601)
    t = grid.times()
    phi = np.exp(-0.5 * (t / 0.12) ** 2)
    return Wavepacket.from_samples(grid, phi, scale_II * phi, center=0.0, width=0.12)


def test_solved_delay_is_positive(solved_plan):
    assert solved_plan.delay > 0.0
    assert solved_plan.solved
    lo, hi = solved_plan.bracket_used
    assert lo < solved_plan.delay < hi


def test_solved_delay_balances_the_overlaps(reference_wavepacket, solved_plan):
    assert overlap_imbalance(reference_wavepacket, solved_plan.profile2) == pytest.approx(0.0, abs=1e-9)


def test_solved_plan_residuals_are_small(solved_plan):
    assert max(abs(r) for r in solved_plan.residuals) < 1e-6


def test_solved_drive_ratio_is_of_order_a_few(solved_plan):
    assert 1.0 < solved_plan.omega2_over_omega1 < 20.0


def test_solve_amplitude_sets_pi_area(reference_wavepacket, reference_params, solved_plan):
    amplitude = solve_amplitude(reference_wavepacket, 0.12, solved_plan.delay, reference_params.k)
    a, b = overlap_integrals(reference_wavepacket, solved_plan.profile2)
    assert amplitude == pytest.approx(solved_plan.amplitude_scale)
    assert amplitude / math.sqrt(reference_params.k) * (a + b) == pytest.approx(math.pi, rel=1e-8)


def test_receiver_params_reproduce_the_amplitude(reference_params, solved_plan):
    params2 = solved_plan.receiver_params(reference_params)
    assert params2.g * params2.omega2 / abs(params2.delta) == pytest.approx(solved_plan.amplitude_scale)
    assert params2.omega1 == reference_params.omega1


def test_plan_exports_residuals_and_ratio(solved_plan):
    data = solved_plan.to_json_dict()
    assert set(data) == {"delay_us", "G2_rad_per_us", "omega2_over_omega1", "eta_residual", "zeta_residual"}
    assert data["delay_us"] == solved_plan.delay


def test_long_sender_pulse_also_has_a_plan(reference_params):
    profile = PulseProfile.gaussian(0.75)
    wavepacket = photon_wavepackets(reference_params, profile, TimeGrid.around(profile))
    plan = solve_pulse(wavepacket, reference_params, 0.75)
    assert max(abs(r) for r in plan.residuals) < 1e-6


def test_empty_wavepacket_is_rejected():
    grid = TimeGrid(-0.6, 0.6, 101)
    empty = Wavepacket.from_samples(grid, np.zeros(101), np.zeros(101), center=0.0, width=0.12)
    with pytest.raises(SolverError, match="no photon amplitude"):
        solve_delay(empty, 0.12)


def test_identical_photon_modes_are_degenerate():
    with pytest.raises(SolverError, match="degenerate"):
        solve_delay(_synthetic(1.0), 0.12)


def test_no_sign_change_reports_both_ends():
    with pytest.raises(SolverError, match=r"D\("):
        solve_delay(_synthetic(2.0), 0.12)


def test_explicit_plan_bypasses_the_solver(reference_wavepacket, reference_params):
    plan = explicit_plan(reference_wavepacket, reference_params, 0.12, delay=0.1, omega2_over_omega1=4.0)
    assert not plan.solved
    assert plan.bracket_used is None
    assert plan.delay == 0.1
    assert plan.amplitude_scale == pytest.approx(4.0 * reference_params.g * reference_params.omega1 / reference_params.delta)
    assert plan.profile2.center == pytest.approx(0.1)
    assert all(math.isfinite(r) for r in plan.residuals)


def test_solver_logs_the_plan(reference_wavepacket, reference_params, caplog):
    with caplog.at_level("INFO", logger="pulse_solver"):
        solve_pulse(reference_wavepacket, reference_params, 0.12)
    assert "receiver plan" in caplog.text
