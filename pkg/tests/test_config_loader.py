import math

import pytest

from qutrit_link.config_loader import load_config, parse_config
from qutrit_link.errors import ConfigError
from tests.conftest import reference_document


def test_minimal_config_gets_defaults(write_config):
    config = load_config(write_config())
    assert config.sender.n_points == 2000
    assert config.sender.t0 == 0.0
    assert config.params.phi2 == pytest.approx(math.pi / 2)
    assert config.receiver.solve is True
    assert not config.receiver.explicit_plan
    assert config.T2 == pytest.approx(0.12)
    assert config.omega2_mhz == pytest.approx(28.0)
    assert config.detection.seed == 20240101
    assert config.table1.durations == (0.75, 0.22, 0.12)


def test_resolved_config_echoes_defaults(write_config):
    resolved = load_config(write_config()).to_dict()
    assert resolved["receiver"]["T2"] == pytest.approx(0.12)
    assert resolved["params"]["omega2"] == pytest.approx(28.0)
    assert resolved["table1"]["durations"] == [0.75, 0.22, 0.12]
    assert set(resolved) == {"params", "sender", "receiver", "detection", "output", "table1", "robustness"}


def test_explicit_plan_disables_solver(write_config):
    document = reference_document(receiver={"delay_us": 0.1, "omega2_over_omega1": 4, "solve": False})
    config = load_config(write_config(document))
    assert config.receiver.explicit_plan
    assert config.receiver.omega2_over_omega1 == 4.0


def test_delay_without_ratio_is_rejected():
    with pytest.raises(ConfigError) as excinfo:
        parse_config(reference_document(receiver={"delay_us": 0.1}))
    assert excinfo.value.key == "receiver.omega2_over_omega1"


def test_disabled_solver_needs_explicit_plan():
    with pytest.raises(ConfigError, match="receiver.solve"):
        parse_config(reference_document(receiver={"solve": False}))


def test_duplicate_keys_are_rejected(write_config):
    text = '{"params": {"g": 12, "g": 13, "k": 3, "gamma_sp": 5.87, "omega1": 7, "delta": 100}, "sender": {"T1": 0.12}}'
    with pytest.raises(ConfigError, match="duplicate key 'g'"):
        load_config(write_config(text=text))


def test_syntax_error_reports_line_and_column(write_config):
    with pytest.raises(ConfigError) as excinfo:
        load_config(write_config(text='{\n  "params": {\n    "g": 12,\n  }\n}'))
    assert excinfo.value.line == 4
    assert "line 4" in str(excinfo.value)


def test_unknown_key_gets_a_suggestion():
    document = reference_document()
    document["params"]["detla"] = 100.0
    with pytest.raises(ConfigError, match="did you mean 'params.delta'") as excinfo:
        parse_config(document)
    assert excinfo.value.key == "params.detla"


def test_unknown_block_is_rejected():
    document = reference_document()
    document["senders"] = {}
    with pytest.raises(ConfigError, match="'sender'"):
        parse_config(document)


def test_missing_required_key_is_named():
    document = reference_document()
    del document["sender"]["T1"]
    with pytest.raises(ConfigError, match="sender.T1"):
        parse_config(document)


def test_missing_block_is_named():
    with pytest.raises(ConfigError, match="'sender'"):
        parse_config({"params": reference_document()["params"]})


def test_zero_detuning_names_the_offending_key():
    document = reference_document()
    document["params"]["delta"] = 0.0
    with pytest.raises(ConfigError) as excinfo:
        parse_config(document)
    assert excinfo.value.key == "params.delta"


@pytest.mark.parametrize(
    "block, key, value",
    [
        ("sender", "T1", -0.1),
        ("sender", "n_points", 1.5),
        ("detection", "efficiency", 1.2),
        ("detection", "target", 2),
        ("receiver", "solve", "yes"),
        ("output", "format", "parquet"),
        ("params", "g", True),
    ],
)
def test_invalid_values_are_rejected(block, key, value):
    document = reference_document(**{block: {key: value}})
    with pytest.raises(ConfigError) as excinfo:
        parse_config(document)
    assert excinfo.value.key == f"{block}.{key}"


def test_seed_override(write_config):
    config = load_config(write_config()).with_seed(42)
    assert config.detection.seed == 42
    with pytest.raises(ConfigError):
        config.with_seed(-1)


def test_missing_file(workspace_temp_dir):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(workspace_temp_dir / "missing-config.json"))


def test_shipped_run_config_loads():
    config = load_config("config/run.json")
    assert config.sender.T1 == pytest.approx(0.12)
    assert config.output.format == "json"
