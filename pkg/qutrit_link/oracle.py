"""Exact integration of the receiver branch equations.

The closed form assumes f2 overlaps Phi_I and Phi_II symmetrically. Here
the coupled amplitudes are integrated without that assumption:

    two-photon branch   c1 |1; 1_I, 1_II>   c2 |0; 0_I, 1_II>
                        c3 |0; 1_I, 0_II>   c4 |-1; 0, 0>
    one-photon branch   d1 |1; 1_I, 0>      d2 |0; 0, 0>

with coupling kappa(t) = (|G2| / sqrt(k)) f2^(1/2)(t - t_d) and drive
phase phi2. For phi2 = pi/2 and Phi_I = Phi_II the two-photon branch
reduces to the closed form with gamma_01 = (c2 + c3) / sqrt(2).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from qutrit_link import quadrature
from qutrit_link.core_params import PulseProfile, SystemParams, TimeGrid
from qutrit_link.errors import ConfigurationMismatchError, OracleIntegrationError, ParameterError
from qutrit_link.receiver import ReceiverResult, area_grid, gammas_from_areas, receiver_coupling
from qutrit_link.sender import Wavepacket, theta, theta_by_quadrature

logger = logging.getLogger("oracle")

RTOL = 1e-10
ATOL = 1e-12
NORM_DRIFT_LIMIT = 1e-8
STEPS_PER_WIDTH = 20


def coupling_matrix(kappa: float, phi_I: float, phi_II: float, phi2: float) -> np.ndarray:
    """6x6 generator M of dy/dt = M y for y = (c1, c2, c3, c4, d1, d2). M is anti-Hermitian."""
    up = np.exp(1j * phi2)
    down = np.conj(up)
    m = np.zeros((6, 6), dtype=complex)
    m[0, 1], m[1, 0] = up * phi_I, down * phi_I
    m[0, 2], m[2, 0] = up * phi_II, down * phi_II
    m[1, 3], m[3, 1] = up * phi_II, down * phi_II
    m[2, 3], m[3, 2] = up * phi_I, down * phi_I
    m[4, 5], m[5, 4] = up * phi_I, down * phi_I
    return 1j * kappa * m


@lru_cache(maxsize=1)
def check_coupling_matrix() -> bool:
    """Hermiticity of the effective Hamiltonian and recovery of the closed form
    for symmetric photons at phi2 = pi/2."""
    for phi2 in (0.0, 0.7, math.pi / 2):
        m = coupling_matrix(0.9, 0.8, 0.3, phi2)
        if not np.allclose(m, -m.conj().T, atol=1e-14):
            raise OracleIntegrationError(f"coupling matrix is not anti-Hermitian at phi2={phi2}")

    zeta = 1.3
    y0 = np.array([1, 0, 0, 0, 1, 0], dtype=complex)
    # constant unit coupling: zeta = 2 tau and eta = 2 tau
    y = expm(coupling_matrix(1.0, 1.0, 1.0, math.pi / 2) * (zeta / 2.0)) @ y0
    closed = gammas_from_areas(zeta, zeta)
    expected = np.array([closed.g12, closed.g01, closed.gm10, closed.g11, closed.g00], dtype=float)
    got = np.array([y[0].real, (y[1] + y[2]).real / math.sqrt(2.0), y[3].real, y[4].real, y[5].real])
    if not np.allclose(got, expected, atol=1e-12):
        raise OracleIntegrationError(f"coupling matrix does not reproduce the closed form: {got} vs {expected}")
    return True


@dataclass(frozen=True)
class BranchAmplitudes:
    grid: TimeGrid
    two_photon: np.ndarray = field(repr=False)
    one_photon: np.ndarray = field(repr=False)
    coupling: float = 0.0
    profile2: PulseProfile | None = None
    phi2: float = math.pi / 2
    wavepacket: Wavepacket | None = field(default=None, compare=False, repr=False)

    def times(self) -> np.ndarray:
        return self.grid.times()

    def two_photon_populations(self) -> np.ndarray:
        return np.abs(self.two_photon) ** 2

    def one_photon_populations(self) -> np.ndarray:
        return np.abs(self.one_photon) ** 2

    def norms(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.two_photon_populations().sum(axis=0), self.one_photon_populations().sum(axis=0)

    def max_norm_drift(self) -> float:
        two, one = self.norms()
        return float(max(np.max(np.abs(two - 1.0)), np.max(np.abs(one - 1.0))))

    @property
    def absorbed(self) -> Tuple[float, float]:
        """(|d2(inf)|^2, |c4(inf)|^2)."""
        return float(abs(self.one_photon[1, -1]) ** 2), float(abs(self.two_photon[3, -1]) ** 2)


def integrate_branches(wavepacket: Wavepacket, params: SystemParams, profile2: PulseProfile,
                       t_d: float = 0.0, phi2: float | None = None, *,
                       extend_widths: float = 5.0) -> BranchAmplitudes:
    """Integrate both branches from c1 = d1 = 1; `profile2` is shifted by t_d."""
    check_coupling_matrix()
    phi2 = params.phi2 if phi2 is None else float(phi2)
    positioned = profile2.shifted(t_d) if t_d else profile2
    grid = area_grid(wavepacket, positioned, extend_widths)
    kappa0 = receiver_coupling(params)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        phi_I, phi_II = wavepacket.amplitudes(t)
        kappa = kappa0 * float(positioned.sqrt_values(t))
        return coupling_matrix(kappa, float(phi_I), float(phi_II), phi2) @ y

    y0 = np.array([1, 0, 0, 0, 1, 0], dtype=complex)
    max_step = min(wavepacket.width, positioned.duration) / STEPS_PER_WIDTH
    if kappa0 == 0.0:
        y = np.repeat(y0[:, None], grid.n_points, axis=1)
    else:
        sol = solve_ivp(rhs, (grid.start, grid.end), y0, method="DOP853", t_eval=grid.times(),
                        rtol=RTOL, atol=ATOL, max_step=max_step)
        if not sol.success:
            raise OracleIntegrationError(f"branch integration failed: {sol.message}")
        y = sol.y
        logger.debug("oracle: %d rhs evaluations over [%.6g, %.6g]", sol.nfev, grid.start, grid.end)

    result = BranchAmplitudes(grid=grid, two_photon=y[:4], one_photon=y[4:], coupling=kappa0,
                              profile2=positioned, phi2=phi2, wavepacket=wavepacket)
    drift = result.max_norm_drift()
    if drift > NORM_DRIFT_LIMIT:
        raise OracleIntegrationError(f"branch norm drifted by {drift:.3g} (limit {NORM_DRIFT_LIMIT:g})")
    logger.info("oracle: |d2(inf)|^2=%.10g |c4(inf)|^2=%.10g drift=%.2g", *result.absorbed, drift)
    return result


@dataclass(frozen=True)
class ApproximationReport:
    max_deviation: Dict[str, float]
    final_deviation: Dict[str, float]
    overlap_ratio: float
    norm_drift: float

    @property
    def worst_final(self) -> float:
        return max(self.final_deviation.values())

    def to_dict(self) -> dict:
        return {
            "max_deviation": dict(self.max_deviation),
            "final_deviation": dict(self.final_deviation),
            "overlap_ratio": self.overlap_ratio,
            "norm_drift": self.norm_drift,
        }


def _check_same_configuration(oracle: BranchAmplitudes, closed: ReceiverResult) -> None:
    area = closed.area
    problems = []
    if oracle.grid != area.grid:
        problems.append(f"grids differ ({oracle.grid} vs {area.grid})")
    if not math.isclose(oracle.coupling, area.coupling, rel_tol=1e-12, abs_tol=0.0):
        problems.append(f"couplings differ ({oracle.coupling!r} vs {area.coupling!r})")
    if oracle.profile2 != area.profile2:
        problems.append(f"receiver pulses differ ({oracle.profile2} vs {area.profile2})")
    if not math.isclose(oracle.phi2, area.phi2, abs_tol=1e-12):
        problems.append(f"drive phases differ ({oracle.phi2!r} vs {area.phi2!r})")
    if problems:
        raise ConfigurationMismatchError("oracle and closed form describe different runs: " + "; ".join(problems))


def overlap_ratio(wavepacket: Wavepacket, profile2: PulseProfile, grid: TimeGrid) -> float:
    """integral f2^(1/2) |Phi_I - Phi_II| / integral f2^(1/2) (Phi_I + Phi_II)."""
    breakpoints = np.union1d(wavepacket.breakpoints(), profile2.breakpoints())

    def part(sign: float):
        def integrand(s: float) -> float:
            phi_I, phi_II = wavepacket.amplitudes(s)
            return float(profile2.sqrt_values(s) * abs(phi_I + sign * phi_II))
        return quadrature.integrate(integrand, grid.start, grid.end, breakpoints=breakpoints,
                                    epsabs=1e-12, epsrel=1e-9)

    plus = part(1.0)
    return part(-1.0) / plus if plus > 0.0 else 0.0


def approximation_report(oracle: BranchAmplitudes, closed: ReceiverResult) -> ApproximationReport:
    """Deviation of exact branch populations from the closed-form |gamma|^2."""
    _check_same_configuration(oracle, closed)
    g = closed.gammas
    c = oracle.two_photon_populations()
    d = oracle.one_photon_populations()
    pairs = {
        "gamma_00": (d[1], np.square(g.g00)),
        "gamma_11": (d[0], np.square(g.g11)),
        "gamma_12": (c[0], np.square(g.g12)),
        "gamma_01": (c[1] + c[2], np.square(g.g01)),
        "gamma_m10": (c[3], np.square(g.gm10)),
    }
    final = closed.final
    finals = {
        "gamma_00": final.g00 ** 2, "gamma_11": final.g11 ** 2, "gamma_12": final.g12 ** 2,
        "gamma_01": final.g01 ** 2, "gamma_m10": final.gm10 ** 2,
    }
    max_dev = {name: float(np.max(np.abs(exact - approx))) for name, (exact, approx) in pairs.items()}
    final_dev = {name: float(abs(exact[-1] - finals[name])) for name, (exact, _) in pairs.items()}
    ratio = overlap_ratio(oracle.wavepacket, oracle.profile2, oracle.grid) if oracle.wavepacket is not None else math.nan
    return ApproximationReport(max_deviation=max_dev, final_deviation=final_dev, overlap_ratio=ratio,
                               norm_drift=oracle.max_norm_drift())


@dataclass(frozen=True)
class CrosscheckReport:
    max_deviation: float
    n_samples: int
    seed: int

    def to_dict(self) -> dict:
        return {"max_deviation": self.max_deviation, "n_samples": self.n_samples, "seed": self.seed}


def quadrature_crosscheck(params: SystemParams, profile1: PulseProfile, n_samples: int = 100,
                          seed: int = 0) -> CrosscheckReport:
    """Compare the erf closed form of theta with direct quadrature at random times."""
    if profile1.shape != "gaussian":
        raise ParameterError("quadrature crosscheck needs a gaussian sender pulse")
    rng = np.random.default_rng(seed)
    lo, hi = profile1.support(5.0)
    times = np.sort(rng.uniform(lo, hi, size=n_samples))
    closed = np.asarray(theta(times, params, profile1), dtype=float)
    numeric = np.asarray(theta_by_quadrature(times, params, profile1, tol=1e-12), dtype=float)
    deviation = float(np.max(np.abs(closed - numeric))) if n_samples else 0.0
    logger.info("theta crosscheck over %d times: max deviation %.3g", n_samples, deviation)
    return CrosscheckReport(max_deviation=deviation, n_samples=n_samples, seed=seed)
