import json
import uuid
from pathlib import Path

import pytest

from qutrit_link.core_params import PulseProfile, TimeGrid, build_params
from qutrit_link.pulse_solver import solve_pulse
from qutrit_link.sender import photon_wavepackets

# rates in 2*pi x MHz
REFERENCE_SET = {
    "g": 12.0, "k": 3.0, "gamma_sp": 5.87, "omega1": 7.0, "delta": 100.0,
    "delta_b_f": -12.0, "delta_b_fp": 4.0,
}
REFERENCE_T1 = 0.12


@pytest.fixture()
def workspace_temp_dir():
    root = Path.cwd() / "outputs" / "pytest-runtime"
    root.mkdir(parents=True, exist_ok=True)
    yield root


@pytest.fixture()
def run_dir(workspace_temp_dir):
    path = workspace_temp_dir / f"run_{uuid.uuid4().hex}"
    path.mkdir(parents=True, exist_ok=True)
    return path


@pytest.fixture(scope="session")
def reference_params():
    return build_params(omega2=4.0 * REFERENCE_SET["omega1"], **REFERENCE_SET)


@pytest.fixture()
def gaussian_profile():
    def make(duration: float = REFERENCE_T1, center: float = 0.0) -> PulseProfile:
        return PulseProfile.gaussian(duration, center)
    return make


@pytest.fixture(scope="session")
def reference_wavepacket(reference_params):
    profile = PulseProfile.gaussian(REFERENCE_T1)
    return photon_wavepackets(reference_params, profile, TimeGrid.around(profile))


@pytest.fixture(scope="session")
def solved_plan(reference_wavepacket, reference_params):
    return solve_pulse(reference_wavepacket, reference_params, REFERENCE_T1)


@pytest.fixture()
def write_config(run_dir):
    def write(document: dict | None = None, *, text: str | None = None, name: str = "run.json") -> str:
        path = run_dir / name
        if text is None:
            document = document if document is not None else reference_document()
            text = json.dumps(document, indent=2)
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


def reference_document(**blocks) -> dict:
    document = {"params": dict(REFERENCE_SET), "sender": {"T1": REFERENCE_T1}}
    for name, values in blocks.items():
        document.setdefault(name, {}).update(values)
    return document
