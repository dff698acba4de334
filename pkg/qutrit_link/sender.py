"""Sending node: Zeeman population dynamics, emitted photon wavepackets and
the asymptotic atom-photon state coefficients.

Spontaneous losses are neglected (cooperativity >> 1), which makes every
quantity a closed-form function of the pulse-energy parameter
theta(t) = alpha1 * integral_{-inf}^{t} f1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq
from scipy.special import erfc, erfinv

from qutrit_link import quadrature
from qutrit_link.core_params import PulseProfile, SystemParams, TimeGrid, photon_generation_rate
from qutrit_link.errors import WavepacketError

logger = logging.getLogger("sender")

NORM_TOL = 1e-6
# lower integration limit for gaussians: f < exp(-144) beyond 12 widths
_GAUSSIAN_TAIL_WIDTHS = 12.0


class ZeemanTriple(NamedTuple):
    """Values indexed by m_F = -1, 0, +1 (in that order)."""

    minus: object
    zero: object
    plus: object

    def squared(self) -> "ZeemanTriple":
        return ZeemanTriple(*(np.square(v) for v in self))

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self])


def _scalar_or_array(values, like):
    return float(values) if np.ndim(like) == 0 else values


def _integration_start(profile: PulseProfile) -> float:
    if profile.shape == "gaussian":
        return profile.center - _GAUSSIAN_TAIL_WIDTHS * profile.duration
    return float(profile.samples[0][0])


def theta(t, params: SystemParams, profile1: PulseProfile):
    """Pulse-energy parameter theta(t); erf closed form for gaussians, exact piecewise integral otherwise."""
    alpha1 = photon_generation_rate(params, 1)
    t_arr = np.asarray(t, dtype=float)
    if profile1.shape == "gaussian":
        x = (t_arr - profile1.center) / profile1.duration
        out = alpha1 * profile1.duration * (math.sqrt(math.pi) / 2.0) * erfc(-x)
    else:
        out = alpha1 * _piecewise_linear_integral(profile1.samples, t_arr)
    return _scalar_or_array(out, t)


def _piecewise_linear_integral(samples, t: np.ndarray) -> np.ndarray:
    """Exact running integral of a linearly interpolated envelope (zero outside its knots)."""
    times, values = samples
    knots = np.concatenate(([0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(times))))
    clipped = np.clip(t, times[0], times[-1])
    idx = np.clip(np.searchsorted(times, clipped, side="right") - 1, 0, times.size - 2)
    h = times[idx + 1] - times[idx]
    dt = clipped - times[idx]
    slope = (values[idx + 1] - values[idx]) / h
    return knots[idx] + values[idx] * dt + 0.5 * slope * dt * dt


def theta_by_quadrature(t, params: SystemParams, profile1: PulseProfile, tol: float = quadrature.DEFAULT_TOL):
    """theta(t) by direct adaptive quadrature, whatever the pulse shape."""
    alpha1 = photon_generation_rate(params, 1)
    t_arr = np.asarray(t, dtype=float)
    out = alpha1 * quadrature.cumulative(
        lambda s: profile1.values(s, strict=False),
        t_arr,
        start=_integration_start(profile1),
        breakpoints=profile1.breakpoints(),
        epsabs=tol,
        epsrel=tol,
    )
    return _scalar_or_array(out, t)


def theta_infinity(params: SystemParams, profile1: PulseProfile) -> float:
    alpha1 = photon_generation_rate(params, 1)
    if profile1.shape == "gaussian":
        return alpha1 * profile1.duration * math.sqrt(math.pi)
    times, values = profile1.samples
    return alpha1 * float(trapezoid(values, times))


def _populations_from_theta(th) -> ZeemanTriple:
    th = np.asarray(th, dtype=float)
    decay = np.exp(-th)
    p_minus = decay
    p_zero = th * decay
    # 1 - e^-x - x e^-x, written to keep precision at small x
    p_plus = np.maximum(-np.expm1(-th) - p_zero, 0.0)
    return ZeemanTriple(p_minus, p_zero, p_plus)


def populations(t, params: SystemParams, profile1: PulseProfile) -> ZeemanTriple:
    """Zeeman populations <sigma_-1>, <sigma_0>, <sigma_+1> of the sending atom at t."""
    triple = _populations_from_theta(theta(t, params, profile1))
    if np.ndim(t) == 0:
        return ZeemanTriple(*(float(v) for v in triple))
    return triple


def beta_from_theta(theta_inf: float) -> ZeemanTriple:
    if theta_inf < 0.0:
        raise ValueError(f"theta_inf must be non-negative, got {theta_inf!r}")
    p = _populations_from_theta(theta_inf)
    return ZeemanTriple(*(math.sqrt(float(v)) for v in p))


def beta_coefficients(params: SystemParams, profile1: PulseProfile) -> ZeemanTriple:
    """Asymptotic amplitudes (beta_-1, beta_0, beta_+1) of the atom-photon state."""
    return beta_from_theta(theta_infinity(params, profile1))


def cumulative_flux(t, params: SystemParams, profile1: PulseProfile):
    """Mean number of photons emitted up to t: integral of alpha1 f1 (<s_-1> + <s_0>).

    The integrand is (1 + theta) e^-theta d(theta), so n_out = 2 - (2 + theta) e^-theta.
    """
    th = np.asarray(theta(t, params, profile1), dtype=float)
    out = -2.0 * np.expm1(-th) - th * np.exp(-th)
    return _scalar_or_array(out, t)


class PeakPopulation(NamedTuple):
    time: float | None
    value: float
    theta: float


def peak_intermediate_population(params: SystemParams, profile1: PulseProfile) -> PeakPopulation:
    """Maximum of <sigma_0(t)>, reached where theta(t) = 1 (value 1/e).

    When the pulse is too weak to reach theta = 1 the population is still
    rising at the end of the pulse; `time` is then None.
    """
    theta_inf = theta_infinity(params, profile1)
    if theta_inf <= 1.0:
        return PeakPopulation(None, theta_inf * math.exp(-theta_inf), theta_inf)
    if profile1.shape == "gaussian":
        t_star = profile1.center + profile1.duration * float(erfinv(2.0 / theta_inf - 1.0))
    else:
        lo, hi = profile1.support()
        t_star = brentq(lambda s: theta(s, params, profile1) - 1.0, lo, hi, xtol=1e-14, rtol=1e-14)
    th = theta(t_star, params, profile1)
    return PeakPopulation(t_star, th * math.exp(-th), th)


# --- photon wavepackets ---

AmplitudeFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class Wavepacket:
    """Real, non-negative photon amplitudes Phi_I(t), Phi_II(t) in us^-1/2.

    `amplitude_fn`, when present, evaluates the amplitudes exactly at any
    time (zero outside the grid); otherwise the samples are linearly
    interpolated.
    """

    grid: TimeGrid
    phi_I: np.ndarray = field(repr=False)
    phi_II: np.ndarray = field(repr=False)
    center: float = 0.0
    width: float = 1.0
    amplitude_fn: AmplitudeFn | None = field(default=None, compare=False, repr=False)
    kinks: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        phi_I = np.array(self.phi_I, dtype=float)
        phi_II = np.array(self.phi_II, dtype=float)
        if phi_I.shape != (self.grid.n_points,) or phi_II.shape != (self.grid.n_points,):
            raise WavepacketError("wavepacket samples must match the grid length")
        if not (np.all(np.isfinite(phi_I)) and np.all(np.isfinite(phi_II))):
            raise WavepacketError("wavepacket samples must be finite")
        if np.any(phi_I < 0.0) or np.any(phi_II < 0.0):
            raise WavepacketError("wavepacket samples must be non-negative (reference phase zero)")
        phi_I.setflags(write=False)
        phi_II.setflags(write=False)
        object.__setattr__(self, "phi_I", phi_I)
        object.__setattr__(self, "phi_II", phi_II)

    @classmethod
    def from_samples(cls, grid: TimeGrid, phi_I, phi_II, *, center: float | None = None,
                     width: float | None = None) -> "Wavepacket":
        t = grid.times()
        total = np.asarray(phi_I, dtype=float) + np.asarray(phi_II, dtype=float)
        if center is None:
            center = float(t[int(np.argmax(total))]) if np.any(total > 0) else 0.5 * (grid.start + grid.end)
        if width is None:
            width = (grid.end - grid.start) / 10.0
        return cls(grid=grid, phi_I=phi_I, phi_II=phi_II, center=center, width=width)

    def times(self) -> np.ndarray:
        return self.grid.times()

    def breakpoints(self) -> np.ndarray:
        if self.amplitude_fn is None:
            return self.times()
        if self.kinks is not None:
            return np.union1d(self.kinks, [self.center])
        return np.array([self.center])

    def amplitudes(self, t):
        t_arr = np.asarray(t, dtype=float)
        if self.amplitude_fn is not None:
            return self.amplitude_fn(t_arr)
        times = self.times()
        return (np.interp(t_arr, times, self.phi_I, left=0.0, right=0.0),
                np.interp(t_arr, times, self.phi_II, left=0.0, right=0.0))

    def photon_numbers(self, tol: float = quadrature.DEFAULT_TOL) -> Tuple[float, float]:
        """(integral |Phi_I|^2, integral |Phi_II|^2) by adaptive quadrature."""
        bp = self.breakpoints()
        n_I = quadrature.integrate(lambda s: float(self.amplitudes(s)[0]) ** 2, self.grid.start, self.grid.end,
                                   breakpoints=bp, epsabs=tol, epsrel=tol)
        n_II = quadrature.integrate(lambda s: float(self.amplitudes(s)[1]) ** 2, self.grid.start, self.grid.end,
                                    breakpoints=bp, epsabs=tol, epsrel=tol)
        return n_I, n_II

    def is_empty(self, floor: float = 0.0) -> bool:
        return float(np.max(self.phi_I + self.phi_II)) <= floor


def _exact_amplitude_fn(params: SystemParams, profile1: PulseProfile, grid: TimeGrid) -> AmplitudeFn:
    alpha1 = photon_generation_rate(params, 1)

    def amplitudes(t: np.ndarray):
        inside = (t >= grid.start) & (t <= grid.end)
        th = np.asarray(theta(t, params, profile1), dtype=float)
        flux = alpha1 * np.asarray(profile1.values(t, strict=False), dtype=float) * np.exp(-th)
        flux = np.where(inside, flux, 0.0)
        return np.sqrt(flux), np.sqrt(flux * th)

    return amplitudes


def photon_wavepackets(params: SystemParams, profile1: PulseProfile, grid: TimeGrid) -> Wavepacket:
    """Emitted photon wave functions Phi_I = (alpha1 f1 e^-theta)^1/2, Phi_II = Phi_I theta^1/2."""
    amplitude_fn = _exact_amplitude_fn(params, profile1, grid)
    phi_I, phi_II = amplitude_fn(grid.times())
    wavepacket = Wavepacket(grid=grid, phi_I=phi_I, phi_II=phi_II, center=profile1.center,
                            width=profile1.duration, amplitude_fn=amplitude_fn,
                            kinks=None if profile1.shape == "gaussian" else profile1.breakpoints())

    beta2 = beta_coefficients(params, profile1).squared()
    n_I, n_II = wavepacket.photon_numbers(tol=grid.adaptive_tol)
    expected_I = float(beta2.zero + beta2.plus)
    expected_II = float(beta2.plus)
    if abs(n_I - expected_I) > NORM_TOL:
        raise WavepacketError(
            f"grid [{grid.start:.6g}, {grid.end:.6g}] too narrow: identity integral|Phi_I|^2 = beta_0^2 + beta_1^2 "
            f"violated ({n_I:.10g} vs {expected_I:.10g})"
        )
    if abs(n_II - expected_II) > NORM_TOL:
        raise WavepacketError(
            f"grid [{grid.start:.6g}, {grid.end:.6g}] too narrow: identity integral|Phi_II|^2 = beta_1^2 "
            f"violated ({n_II:.10g} vs {expected_II:.10g})"
        )
    logger.debug("photon numbers n_I=%.10g n_II=%.10g", n_I, n_II)
    return wavepacket


# --- sender summary ---

@dataclass(frozen=True)
class SenderResult:
    theta_inf: float
    times: np.ndarray = field(repr=False)
    envelope: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    populations: ZeemanTriple = field(repr=False)
    beta: ZeemanTriple

    @property
    def photons_emitted(self) -> float:
        b2 = self.beta.squared()
        return float(b2.zero + 2.0 * b2.plus)


def simulate_sender(params: SystemParams, profile1: PulseProfile, grid: TimeGrid) -> SenderResult:
    t = grid.times()
    th = np.asarray(theta(t, params, profile1), dtype=float)
    theta_inf = theta_infinity(params, profile1)
    result = SenderResult(
        theta_inf=theta_inf,
        times=t,
        envelope=np.asarray(profile1.values(t, strict=False), dtype=float),
        theta=th,
        populations=_populations_from_theta(th),
        beta=beta_from_theta(theta_inf),
    )
    logger.info(
        "sender: T1=%.4g us theta_inf=%.6g beta^2=(%.6g, %.6g, %.6g)",
        profile1.duration, theta_inf, *result.beta.squared(),
    )
    return result
