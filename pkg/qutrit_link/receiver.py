"""Receiving node: effective pulse areas, closed-form absorption amplitudes
and the final two-atom state.

Receiver amplitudes are labelled gamma[m_bar, j] where m_bar is the
receiving atom's Zeeman state and j the number of photons still in flight.
Sender state m_F maps to receiver state -m_F once absorption is complete.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import entr

from qutrit_link import quadrature
from qutrit_link.core_params import PulseProfile, SystemParams, TimeGrid, raman_coupling
from qutrit_link.errors import ClosedFormUnavailableError, NormalizationError, WavepacketError
from qutrit_link.sender import Wavepacket, ZeemanTriple

logger = logging.getLogger("receiver")

AREA_TOL = 1e-9
COMPLETENESS_TOL = 1e-3
ENTROPY_NORM_TOL = 1e-6
MAX_ENTROPY_BITS = math.log2(3.0)
# photon amplitude at the edge of its grid, relative to the peak, above which
# the wavepacket cannot be zero-extended
EDGE_FRACTION = 1e-4
# f2^(1/2) = exp(-x^2/2) underflows below 1e-195 beyond 30 widths
SQRT_SUPPORT_WIDTHS = 30.0


def receiver_coupling(params: SystemParams) -> float:
    """kappa_0 = |G2| / sqrt(k); the time-dependent coupling is kappa_0 f2^(1/2)(t)."""
    return abs(raman_coupling(params, 2)) / math.sqrt(params.k)


def overlap_integrals(wavepacket: Wavepacket, profile2: PulseProfile,
                      tol: float = AREA_TOL) -> Tuple[float, float]:
    """(integral f2^(1/2) Phi_I, integral f2^(1/2) Phi_II) over the photon grid."""
    lo, hi = wavepacket.grid.start, wavepacket.grid.end
    f_lo, f_hi = profile2.support(widths=SQRT_SUPPORT_WIDTHS)
    lo, hi = max(lo, f_lo), min(hi, f_hi)
    if lo >= hi:
        return 0.0, 0.0
    breakpoints = np.union1d(wavepacket.breakpoints(), profile2.breakpoints())

    def integrand(which: int):
        return lambda s: float(profile2.sqrt_values(s) * wavepacket.amplitudes(s)[which])

    a = quadrature.integrate(integrand(0), lo, hi, breakpoints=breakpoints, epsabs=0.0, epsrel=tol)
    b = quadrature.integrate(integrand(1), lo, hi, breakpoints=breakpoints, epsabs=0.0, epsrel=tol)
    return a, b


@dataclass(frozen=True)
class AreaFunctions:
    grid: TimeGrid
    eta: np.ndarray = field(repr=False)
    zeta: np.ndarray = field(repr=False)
    eta_inf: float = 0.0
    zeta_inf: float = 0.0
    envelope: np.ndarray | None = field(default=None, repr=False)
    coupling: float = 0.0
    profile2: PulseProfile | None = None
    phi2: float = math.pi / 2


def area_grid(wavepacket: Wavepacket, profile2: PulseProfile, extend_widths: float = 5.0) -> TimeGrid:
    """Photon grid extended, at the same step, to cover the support of f2."""
    grid = wavepacket.grid
    f_lo, f_hi = profile2.support(widths=extend_widths)
    if grid.covers(f_lo, f_hi):
        return grid
    start, end = min(grid.start, f_lo), max(grid.end, f_hi)

    total = wavepacket.phi_I + wavepacket.phi_II
    peak = float(total.max())
    if start < grid.start and total[0] > EDGE_FRACTION * peak:
        raise WavepacketError(
            f"photon grid starts at {grid.start:.6g} us with non-negligible amplitude; "
            f"cannot extend it to cover f2 from {start:.6g} us"
        )
    if end > grid.end and total[-1] > EDGE_FRACTION * peak:
        raise WavepacketError(
            f"photon grid ends at {grid.end:.6g} us with non-negligible amplitude; "
            f"cannot extend it to cover f2 up to {end:.6g} us"
        )
    n_points = int(math.ceil((end - start) / grid.step)) + 1
    logger.debug("extended area grid to [%.6g, %.6g] (%d points)", start, end, n_points)
    return TimeGrid(start, end, max(n_points, grid.n_points), grid.adaptive_tol)


def area_functions(wavepacket: Wavepacket, params: SystemParams, profile2: PulseProfile, *,
                   extend_widths: float = 5.0, tol: float = AREA_TOL) -> AreaFunctions:
    """Running pulse areas eta(t), zeta(t) and their asymptotic values."""
    grid = area_grid(wavepacket, profile2, extend_widths)
    t = grid.times()
    kappa0 = receiver_coupling(params)
    root = np.asarray(profile2.sqrt_values(t), dtype=float)
    phi_I, phi_II = wavepacket.amplitudes(t)

    eta = 2.0 * kappa0 * cumulative_trapezoid(root * phi_I, t, initial=0.0)
    # zeta - eta/2 integrates f2^(1/2) Phi_II >= 0
    zeta = 0.5 * eta + kappa0 * cumulative_trapezoid(root * phi_II, t, initial=0.0)

    a, b = overlap_integrals(wavepacket, profile2, tol)
    area = AreaFunctions(
        grid=grid, eta=eta, zeta=zeta,
        eta_inf=2.0 * kappa0 * a, zeta_inf=kappa0 * (a + b),
        envelope=np.asarray(profile2.values(t, strict=False), dtype=float),
        coupling=kappa0, profile2=profile2, phi2=params.phi2,
    )
    logger.debug("areas: eta_inf=%.12g zeta_inf=%.12g", area.eta_inf, area.zeta_inf)
    return area


class GammaAmplitudes(NamedTuple):
    g10: object
    g00: object
    g11: object
    g12: object
    g01: object
    gm10: object

    def one_photon_norm(self):
        return np.square(self.g00) + np.square(self.g11)

    def two_photon_norm(self):
        return np.square(self.g12) + np.square(self.g01) + np.square(self.gm10)


def gammas_from_areas(eta, zeta) -> GammaAmplitudes:
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    cos_zeta = np.cos(zeta)
    return GammaAmplitudes(
        g10=np.ones_like(eta),
        g00=np.sin(0.5 * eta),
        g11=np.cos(0.5 * eta),
        g12=0.5 * (1.0 + cos_zeta),
        g01=np.sin(zeta) / math.sqrt(2.0),
        gm10=0.5 * (1.0 - cos_zeta),
    )


@dataclass(frozen=True)
class ReceiverResult:
    area: AreaFunctions
    absorbed: Tuple[float, float]
    residuals: Tuple[float, float]

    @cached_property
    def gammas(self) -> GammaAmplitudes:
        return gammas_from_areas(self.area.eta, self.area.zeta)

    @cached_property
    def final(self) -> GammaAmplitudes:
        return GammaAmplitudes(*(float(v) for v in gammas_from_areas(self.area.eta_inf, self.area.zeta_inf)))

    @property
    def transfer_factors(self) -> ZeemanTriple:
        """Final amplitude carrying each sender state m_F onto the receiver state -m_F."""
        return ZeemanTriple(1.0, self.final.g00, self.final.gm10)

    def weighted_norm(self, beta: Sequence[float]) -> float:
        """sum_mF beta_mF^2 sum_mbar |gamma|^2 at the final time."""
        b2 = np.square(np.asarray(beta, dtype=float))
        final = self.final
        return float(b2[0] * final.g10 ** 2 + b2[1] * final.one_photon_norm() + b2[2] * final.two_photon_norm())


def has_closed_form(phi2: float) -> bool:
    return math.isclose(phi2, math.pi / 2, rel_tol=0.0, abs_tol=1e-12)


def gamma_closed_form(area: AreaFunctions) -> ReceiverResult:
    if not has_closed_form(area.phi2):
        raise ClosedFormUnavailableError(
            f"closed-form absorption amplitudes exist only for phi2 = pi/2 (got {area.phi2!r}); "
            "integrate the branch equations with the oracle instead"
        )
    absorbed = (
        math.sin(0.5 * area.eta_inf) ** 2,
        (0.5 * (1.0 - math.cos(area.zeta_inf))) ** 2,
    )
    residuals = (abs(area.eta_inf - math.pi), abs(area.zeta_inf - math.pi))
    return ReceiverResult(area=area, absorbed=absorbed, residuals=residuals)


# --- final state ---

def population_entropy(weights: Sequence[float], norm_tol: float = ENTROPY_NORM_TOL) -> float:
    """Shannon entropy in bits of a population vector that must sum to 1 within norm_tol."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise NormalizationError("entropy needs a non-empty 1-D population vector")
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise NormalizationError(f"populations must be finite and non-negative, got {w.tolist()}")
    total = float(w.sum())
    if abs(total - 1.0) > norm_tol:
        raise NormalizationError(f"populations sum to {total:.12g}, outside 1 +/- {norm_tol:g}")
    p = w / total
    bits = float(entr(p).sum() / math.log(2.0))
    return min(max(bits, 0.0), math.log2(w.size))


def entanglement_entropy(beta: Sequence[float], norm_tol: float = ENTROPY_NORM_TOL) -> float:
    """E = -sum beta^2 log2 beta^2 of the Schmidt coefficients beta."""
    return population_entropy(np.square(np.asarray(beta, dtype=float)), norm_tol)


@dataclass(frozen=True)
class JointState:
    """Coefficients of |m_F>_1 |-m_F>_2, ordered m_F = -1, 0, +1."""

    beta: ZeemanTriple
    entropy: float
    is_complete: bool
    absorbed: Tuple[float, float] = (1.0, 1.0)
    residuals: Tuple[float, float] = (0.0, 0.0)

    def populations(self) -> np.ndarray:
        return np.square(self.beta.as_array())

    def to_dict(self) -> dict:
        b2 = self.populations()
        return {
            "beta": [float(v) for v in self.beta],
            "beta2": [float(v) for v in b2],
            "entropy_bits": self.entropy,
            "is_complete": self.is_complete,
            "absorbed": {"gamma_00": self.absorbed[0], "gamma_m10": self.absorbed[1]},
            "residuals": {"eta": self.residuals[0], "zeta": self.residuals[1]},
        }


def final_joint_state(beta: Sequence[float], receiver_result: ReceiverResult,
                      tol: float = COMPLETENESS_TOL) -> JointState:
    beta = ZeemanTriple(*(float(v) for v in beta))
    complete = max(receiver_result.residuals) < tol
    if not complete:
        logger.warning(
            "absorption incomplete: residuals eta=%.3g zeta=%.3g exceed %.3g; absorbed populations %.6g, %.6g",
            *receiver_result.residuals, tol, *receiver_result.absorbed,
        )
    return JointState(
        beta=beta,
        entropy=entanglement_entropy(beta),
        is_complete=complete,
        absorbed=receiver_result.absorbed,
        residuals=receiver_result.residuals,
    )
