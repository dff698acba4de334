import pytest

from qutrit_link.core_params import PulseProfile, TimeGrid
from qutrit_link.errors import ParameterError
from qutrit_link.robustness import energy_factors, energy_robustness


def test_energy_factors_span_the_spread():
    factors = energy_factors(0.05, 5)
    assert factors.tolist() == pytest.approx([0.95, 0.975, 1.0, 1.025, 1.05])
    assert energy_factors(0.1, 1).tolist() == [1.0]


@pytest.mark.parametrize("spread, n_points", [(-0.1, 3), (1.0, 3), (0.05, 0)])
def test_energy_factors_reject_bad_input(spread, n_points):
    with pytest.raises(ParameterError):
        energy_factors(spread, n_points)


@pytest.mark.slow
def test_nominal_energy_keeps_the_nominal_state(reference_params, solved_plan):
    profile = PulseProfile.gaussian(0.12)
    rows = energy_robustness(reference_params, profile, TimeGrid.around(profile), solved_plan, spread=0.05, n_points=3)
    low, nominal, high = rows

    assert nominal.energy_factor == pytest.approx(1.0)
    assert nominal.fidelity == pytest.approx(1.0, abs=1e-9)
    assert nominal.entropy == pytest.approx(1.577, abs=1e-3)
    assert nominal.absorbed == pytest.approx((1.0, 1.0), abs=1e-9)
    assert low.theta_inf < nominal.theta_inf < high.theta_inf
    assert high.theta_inf == pytest.approx(1.05 * nominal.theta_inf)
    # five percent energy noise costs little fidelity
    assert min(low.fidelity, high.fidelity) > 0.95
    assert max(low.fidelity, high.fidelity) < 1.0


def test_rows_serialize_flat(reference_params, solved_plan):
    profile = PulseProfile.gaussian(0.12)
    row = energy_robustness(reference_params, profile, TimeGrid.around(profile), solved_plan, n_points=1)[0]
    data = row.to_dict()
    assert data["energy_factor"] == 1.0
    assert {"beta2_m1", "beta2_0", "beta2_p1", "absorbed_00", "absorbed_m10", "fidelity"} <= set(data)
