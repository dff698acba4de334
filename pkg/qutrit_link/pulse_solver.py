"""Receiver drive design: delay and strength of f2 so that both effective
pulse areas reach pi.

Both areas are linear in |G2|, so the problem splits into a 1-D root find
for the delay (eta_inf = zeta_inf, i.e. equal overlap with Phi_I and
Phi_II) followed by an exact amplitude scaling.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

from scipy.optimize import brentq

from qutrit_link.core_params import PulseProfile, SystemParams
from qutrit_link.errors import SolverError
from qutrit_link.receiver import overlap_integrals
from qutrit_link.sender import Wavepacket

logger = logging.getLogger("pulse_solver")

MIN_PHOTON_NUMBER = 1e-6
OVERLAP_TOL = 1e-11
BALANCE_TOL = 1e-10


@dataclass(frozen=True)
class ReceiverPulsePlan:
    delay: float
    amplitude_scale: float
    residuals: Tuple[float, float]
    bracket_used: Tuple[float, float] | None
    profile2: PulseProfile
    omega2_over_omega1: float | None = None
    solved: bool = True

    def receiver_params(self, params: SystemParams) -> SystemParams:
        """`params` with omega2 set so that |G2| = g omega2 / |delta| equals the plan's amplitude."""
        return dataclasses.replace(params, omega2=_omega2_for(self.amplitude_scale, params))

    def to_json_dict(self) -> Dict[str, float | None]:
        return {
            "delay_us": self.delay,
            "G2_rad_per_us": self.amplitude_scale,
            "omega2_over_omega1": self.omega2_over_omega1,
            "eta_residual": self.residuals[0],
            "zeta_residual": self.residuals[1],
        }


def _omega2_for(amplitude_scale: float, params: SystemParams) -> float:
    if params.g <= 0.0:
        raise SolverError("atom-cavity coupling g is zero; no drive strength can reach a pi area")
    return amplitude_scale * abs(params.delta) / params.g


def default_template(wavepacket: Wavepacket, T2: float) -> PulseProfile:
    """Gaussian f2 of width T2 centred on the sender pulse (delay zero)."""
    return PulseProfile.gaussian(T2, wavepacket.center)


def _check_nontrivial(wavepacket: Wavepacket) -> None:
    if wavepacket.is_empty():
        raise SolverError("wavepacket is degenerate: it carries no photon amplitude")
    n_I, n_II = wavepacket.photon_numbers()
    if n_I <= MIN_PHOTON_NUMBER or n_II <= MIN_PHOTON_NUMBER:
        raise SolverError(
            f"wavepacket is degenerate: photon numbers ({n_I:.3g}, {n_II:.3g}) must both exceed {MIN_PHOTON_NUMBER:g}"
        )


def overlap_imbalance(wavepacket: Wavepacket, profile2: PulseProfile) -> float:
    """(A - B) / (A + B) with A, B the overlaps of f2^(1/2) with Phi_I, Phi_II."""
    a, b = overlap_integrals(wavepacket, profile2, OVERLAP_TOL)
    if a + b <= 0.0:
        raise SolverError(f"f2 centred at {profile2.center:.6g} us does not overlap the photon wavepacket")
    return (a - b) / (a + b)


def solve_delay(wavepacket: Wavepacket, T2: float, template: PulseProfile | None = None) -> float:
    """Delay t_d of f2 (relative to `template`) at which eta_inf = zeta_inf."""
    _check_nontrivial(wavepacket)
    template = template or default_template(wavepacket, T2)
    lo = -5.0 * T2
    hi = 10.0 * T2 + 5.0 * wavepacket.width

    def imbalance(delay: float) -> float:
        return overlap_imbalance(wavepacket, template.shifted(delay))

    d_lo, d_hi = imbalance(lo), imbalance(hi)
    if abs(d_lo) < BALANCE_TOL and abs(d_hi) < BALANCE_TOL:
        raise SolverError("degenerate wavepacket: Phi_I and Phi_II overlap f2 equally at every delay")
    if d_lo * d_hi > 0.0:
        raise SolverError(
            f"no sign change of the overlap imbalance on [{lo:.6g}, {hi:.6g}] us: "
            f"D({lo:.6g}) = {d_lo:.6g}, D({hi:.6g}) = {d_hi:.6g}"
        )
    delay, info = brentq(imbalance, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200, full_output=True)
    residual = imbalance(delay)
    logger.debug("delay root %.12g after %d iterations, |D|=%.3g", delay, info.iterations, abs(residual))
    if abs(residual) > BALANCE_TOL:
        logger.warning("delay root leaves overlap imbalance %.3g above %.1g", residual, BALANCE_TOL)
    return float(delay)


def solve_amplitude(wavepacket: Wavepacket, T2: float, t_d: float, k: float,
                    template: PulseProfile | None = None) -> float:
    """|G2| = pi sqrt(k) / integral f2^(1/2)(t - t_d) (Phi_I + Phi_II)."""
    template = template or default_template(wavepacket, T2)
    a, b = overlap_integrals(wavepacket, template.shifted(t_d), OVERLAP_TOL)
    if a + b <= 0.0:
        raise SolverError(f"zero overlap between f2 (delay {t_d:.6g} us) and the photon wavepacket")
    return math.pi * math.sqrt(k) / (a + b)


def _residuals(wavepacket: Wavepacket, profile2: PulseProfile, amplitude_scale: float,
               k: float) -> Tuple[float, float]:
    a, b = overlap_integrals(wavepacket, profile2, OVERLAP_TOL)
    kappa0 = amplitude_scale / math.sqrt(k)
    return 2.0 * kappa0 * a - math.pi, kappa0 * (a + b) - math.pi


def _ratio(omega2: float, params: SystemParams) -> float | None:
    return omega2 / params.omega1 if params.omega1 > 0.0 else None


def solve_pulse(wavepacket: Wavepacket, params: SystemParams, T2: float,
                template: PulseProfile | None = None) -> ReceiverPulsePlan:
    template = template or default_template(wavepacket, T2)
    delay = solve_delay(wavepacket, T2, template)
    amplitude = solve_amplitude(wavepacket, T2, delay, params.k, template)
    profile2 = template.shifted(delay)
    plan = ReceiverPulsePlan(
        delay=delay,
        amplitude_scale=amplitude,
        residuals=_residuals(wavepacket, profile2, amplitude, params.k),
        bracket_used=(-5.0 * T2, 10.0 * T2 + 5.0 * wavepacket.width),
        profile2=profile2,
        omega2_over_omega1=_ratio(_omega2_for(amplitude, params), params),
        solved=True,
    )
    logger.info("receiver plan: t_d=%.6g us |G2|=%.6g rad/us Omega2/Omega1=%s residuals=(%.3g, %.3g)",
                plan.delay, plan.amplitude_scale, plan.omega2_over_omega1, *plan.residuals)
    return plan


def explicit_plan(wavepacket: Wavepacket, params: SystemParams, T2: float, delay: float,
                  omega2_over_omega1: float, template: PulseProfile | None = None) -> ReceiverPulsePlan:
    """Plan for a user-fixed delay and drive ratio; residuals are reported, not driven to zero."""
    template = template or default_template(wavepacket, T2)
    profile2 = template.shifted(delay)
    amplitude = params.g * omega2_over_omega1 * params.omega1 / abs(params.delta)
    return ReceiverPulsePlan(
        delay=float(delay),
        amplitude_scale=amplitude,
        residuals=_residuals(wavepacket, profile2, amplitude, params.k),
        bracket_used=None,
        profile2=profile2,
        omega2_over_omega1=float(omega2_over_omega1),
        solved=False,
    )
