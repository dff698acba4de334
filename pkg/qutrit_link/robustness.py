"""Sensitivity of the link to pump-pulse energy fluctuations.

Pulse energy scales as Omega^2, so an energy factor s multiplies both drive
amplitudes by sqrt(s). The receiver pulse plan stays at its nominal delay
and strength, as it would in a running experiment.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from qutrit_link.core_params import PulseProfile, SystemParams, TimeGrid
from qutrit_link.errors import ParameterError
from qutrit_link.pulse_solver import ReceiverPulsePlan
from qutrit_link.receiver import area_functions, entanglement_entropy, gamma_closed_form
from qutrit_link.sender import beta_coefficients, photon_wavepackets, theta_infinity

logger = logging.getLogger("robustness")


@dataclass(frozen=True)
class RobustnessRow:
    energy_factor: float
    theta_inf: float
    beta2: Tuple[float, float, float]
    entropy: float
    eta_inf: float
    zeta_inf: float
    absorbed: Tuple[float, float]
    fidelity: float

    def to_dict(self) -> dict:
        return {
            "energy_factor": self.energy_factor,
            "theta_inf": self.theta_inf,
            "beta2_m1": self.beta2[0], "beta2_0": self.beta2[1], "beta2_p1": self.beta2[2],
            "entropy_bits": self.entropy,
            "eta_inf": self.eta_inf, "zeta_inf": self.zeta_inf,
            "absorbed_00": self.absorbed[0], "absorbed_m10": self.absorbed[1],
            "fidelity": self.fidelity,
        }


def energy_factors(spread: float, n_points: int) -> np.ndarray:
    if not 0.0 <= spread < 1.0:
        raise ParameterError(f"energy spread must lie in [0, 1), got {spread!r}")
    if n_points < 1:
        raise ParameterError(f"need at least one energy point, got {n_points!r}")
    if n_points == 1:
        return np.array([1.0])
    return np.linspace(1.0 - spread, 1.0 + spread, n_points)


def energy_robustness(params: SystemParams, profile1: PulseProfile, grid: TimeGrid, plan: ReceiverPulsePlan, *,
                      spread: float = 0.05, n_points: int = 11, extend_widths: float = 5.0) -> List[RobustnessRow]:
    """One row per energy factor; fidelity is |<psi_nominal|psi>|^2 of the two-atom state."""
    nominal = plan.receiver_params(params)
    beta0 = np.asarray(beta_coefficients(params, profile1), dtype=float)
    rows = []
    for factor in energy_factors(spread, n_points):
        scale = math.sqrt(float(factor))
        scaled = dataclasses.replace(nominal, omega1=nominal.omega1 * scale, omega2=nominal.omega2 * scale)
        beta = np.asarray(beta_coefficients(scaled, profile1), dtype=float)
        wavepacket = photon_wavepackets(scaled, profile1, grid)
        result = gamma_closed_form(area_functions(wavepacket, scaled, plan.profile2, extend_widths=extend_widths))
        overlap = float(np.sum(beta0 * beta * np.asarray(result.transfer_factors, dtype=float)))
        rows.append(RobustnessRow(
            energy_factor=float(factor),
            theta_inf=theta_infinity(scaled, profile1),
            beta2=tuple(float(v) for v in beta * beta),
            entropy=entanglement_entropy(beta),
            eta_inf=result.area.eta_inf,
            zeta_inf=result.area.zeta_inf,
            absorbed=result.absorbed,
            fidelity=overlap * overlap,
        ))
        logger.debug("energy factor %.4g: fidelity %.8g", factor, overlap * overlap)
    worst = min(rows, key=lambda r: r.fidelity)
    logger.info("energy robustness over +/-%.3g: worst fidelity %.6g at factor %.4g",
                spread, worst.fidelity, worst.energy_factor)
    return rows
