import math

import pytest

import qutrit_link.pipeline as pipeline
from qutrit_link.config_loader import parse_config
from qutrit_link.receiver import final_joint_state
from tests.conftest import reference_document


@pytest.fixture(scope="module")
def config():
    return parse_config(reference_document())


def test_entangle_matches_the_stages_run_separately(config):
    stage, receiver, joint = pipeline.run_entangle(config)

    separate_stage = pipeline.run_sender(config)
    plan = pipeline.plan_receiver(config, separate_stage)
    separate_receiver = pipeline.run_receiver(config, separate_stage, plan)
    separate_joint = final_joint_state(separate_stage.result.beta, separate_receiver.result, tol=config.receiver.tol)

    assert plan.to_json_dict() == receiver.plan.to_json_dict()
    assert separate_receiver.summary() == receiver.summary()
    assert separate_joint.to_dict() == joint.to_dict()
    assert stage.result.theta_inf == separate_stage.result.theta_inf


def test_sender_summary_reports_photon_numbers(config):
    summary = pipeline.run_sender(config).summary()
    photons = summary["photon_numbers"]
    assert photons["phi_I"] == pytest.approx(0.3576 + 0.3580, abs=2e-4)
    assert photons["phi_II"] == pytest.approx(0.3580, abs=1e-4)
    assert photons["total"] == pytest.approx(photons["phi_I"] + photons["phi_II"], abs=1e-6)
    assert summary["cooperativity"] == pytest.approx(32.7, abs=0.1)
    assert summary["peak_sigma0"]["theta"] == pytest.approx(1.0)


def test_explicit_plan_reports_residuals():
    config = parse_config(reference_document(receiver={"delay_us": 0.1, "omega2_over_omega1": 4.0}))
    stage = pipeline.run_sender(config)
    receiver = pipeline.run_receiver(config, stage)
    assert receiver.plan.solved is False
    assert receiver.plan.omega2_over_omega1 == 4.0
    assert receiver.summary()["residuals"]["eta"] >= 0.0


def test_table1_reference_rows(config):
    rows = pipeline.table1_rows(config)
    assert len(rows) == 3
    long_row = rows[0]
    assert long_row["beta2_p1"] == pytest.approx(0.9966, abs=1e-4)
    assert long_row["ref_entropy_exact"] == pytest.approx(0.051, abs=0.01)
    assert rows[1]["ref_entropy_exact"] == pytest.approx(1.262, abs=1e-3)


def test_table1_without_reference_row():
    config = parse_config(reference_document(table1={"durations": [0.3]}))
    (row,) = pipeline.table1_rows(config)
    assert "ref_beta2_m1" not in row


def test_detect_summary_without_sigma_minus_clicks(caplog):
    config = parse_config(reference_document(detection={"beta2": [1.0, 0.0, 0.0], "n_trials": 1000}))
    with caplog.at_level("WARNING", logger="pipeline"):
        summary = pipeline.run_detect(config, workers=1)
    assert summary["ratio"] is None
    assert summary["n_plus"] == 1000
    assert summary["expected_ratio"] is None
    assert "ratio not estimated" in caplog.text


@pytest.mark.slow
def test_oracle_without_closed_form_off_quadrature_phase(caplog):
    config = parse_config(reference_document(params={"phi2": 0.3}))
    with caplog.at_level("WARNING", logger="pipeline"):
        run = pipeline.run_oracle(config)
    assert run.closed is None
    assert run.report is None
    assert run.branches.phi2 == 0.3
    assert run.branches.absorbed[0] == pytest.approx(math.sin(0.5 * run.area.eta_inf) ** 2, abs=1e-8)
    assert "no closed form" in caplog.text


def test_detect_with_blind_detector_reports_no_estimates(caplog):
    config = parse_config(reference_document(detection={"beta2": [0.31, 0.36, 0.33], "n_trials": 2000, "efficiency": 0.0}))
    with caplog.at_level("WARNING", logger="pipeline"):
        summary = pipeline.run_detect(config, workers=1)
    assert summary["n_silent"] == 2000
    assert summary["ratio"] is None
    assert summary["fidelity"] is None
    assert summary["fidelity_se"] is None
    assert "fidelity not estimated" in caplog.text
