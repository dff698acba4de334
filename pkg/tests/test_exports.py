import json
import os

import numpy as np
import pytest

import qutrit_link.exports as exports
from qutrit_link import __version__
from qutrit_link.errors import ExportError


def test_format_number_uses_twelve_significant_digits():
    assert exports.format_number(1 / 3) == "0.333333333333"
    assert exports.format_number(-0.0) == "0"
    assert exports.format_number(float("nan")) == "nan"
    assert exports.format_number(1e-20) == "1e-20"


def test_clean_for_json_handles_numpy_and_non_finite_values():
    cleaned = exports.clean_for_json({"a": np.float64(2 / 3), "b": np.arange(2), "c": float("inf"), "d": np.bool_(True)})
    assert cleaned == {"a": 0.666666666667, "b": [0, 1], "c": None, "d": True}


def test_write_json_embeds_version_and_config(run_dir):
    path = exports.write_json(str(run_dir / "summary.json"), {"theta_inf": 1.2572812345678}, config={"sender": {"T1": 0.12}})
    with open(path, encoding="utf-8") as fh:
        document = json.load(fh)
    assert document["version"] == __version__
    assert document["config"] == {"sender": {"T1": 0.12}}
    assert document["theta_inf"] == 1.25728123457


def test_write_json_is_byte_identical_across_runs(run_dir):
    payload = {"values": np.linspace(0, 1, 7), "name": "x"}
    first = exports.write_json(str(run_dir / "a.json"), payload, config={})
    second = exports.write_json(str(run_dir / "b.json"), payload, config={})
    with open(first, "rb") as a, open(second, "rb") as b:
        assert a.read() == b.read()


def test_csv_has_provenance_comments_then_header(run_dir):
    path = exports.write_csv(str(run_dir / "traj.csv"), ["t", "x"], [[0.0, 1 / 3], [1.0, None]], config={"k": 1})
    with open(path, "rb") as fh:
        raw = fh.read()
    assert b"\r\n" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == f"# qutrit_link {__version__}"
    assert lines[1] == '# config: {"k":1}'
    assert lines[2:] == ["t,x", "0,0.333333333333", "1,"]


def test_atomic_write_leaves_no_temporary_files(run_dir):
    exports.atomic_write_text(str(run_dir / "out.txt"), "hello\n")
    assert sorted(os.listdir(run_dir)) == ["out.txt"]


def test_atomic_write_reports_unwritable_target(run_dir):
    blocker = run_dir / "not_a_dir"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(ExportError, match="cannot write"):
        exports.atomic_write_text(str(blocker / "out.txt"), "hello\n")


def test_sender_rows_follow_header(reference_params, reference_wavepacket):
    from qutrit_link.sender import simulate_sender
    from qutrit_link.core_params import PulseProfile

    result = simulate_sender(reference_params, PulseProfile.gaussian(0.12), reference_wavepacket.grid)
    rows = exports.sender_rows(result, reference_wavepacket)
    assert len(rows) == reference_wavepacket.grid.n_points
    assert all(len(row) == len(exports.SENDER_HEADER) for row in rows)
    # populations sum to one in every row
    assert sum(rows[1000][4:]) == pytest.approx(1.0)


def test_oracle_header_lists_real_and_imaginary_parts():
    assert exports.ORACLE_HEADER[:3] == ["t", "re_c1", "im_c1"]
    assert exports.ORACLE_HEADER[-2:] == ["norm2ph", "norm1ph"]
    assert len(exports.ORACLE_HEADER) == 1 + 12 + 2
