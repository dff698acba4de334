"""Physical parameters, pulse envelopes, time grids and regime diagnostics.

Internal units: angular frequencies in rad/us, times in us. Inputs quoted as
"2*pi x MHz" are converted exactly once, in `build_params`, by multiplying
by 2*pi (1 MHz = 1 / us).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Tuple

import numpy as np
from scipy.integrate import trapezoid

from qutrit_link.errors import ParameterError

logger = logging.getLogger("core_params")

TWO_PI = 2.0 * math.pi

# "much greater than" is a factor of 10; below a factor of 2 a check is violated
STRONG_MARGIN = 10.0
WEAK_MARGIN = 2.0

_MHZ_FIELDS = ("g", "k", "gamma_sp", "omega1", "omega2", "delta", "delta_b_f", "delta_b_fp")


def _require_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class SystemParams:
    """Rates and detunings of one link, all in rad/us (phi2 in rad)."""

    g: float
    k: float
    gamma_sp: float
    omega1: float
    omega2: float
    delta: float
    delta_b_f: float = 0.0
    delta_b_fp: float = 0.0
    phi2: float = math.pi / 2

    def __post_init__(self):
        for name in _MHZ_FIELDS + ("phi2",):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        for name in ("k", "gamma_sp"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be strictly positive, got {getattr(self, name)!r}")
        # zero coupling / zero drive are admitted as the no-interaction limit
        for name in ("g", "omega1", "omega2"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        if self.delta == 0.0:
            raise ParameterError(
                "delta (one-photon detuning) must be non-zero: the Raman coupling g*Omega/delta is undefined at resonance"
            )

    def to_mhz(self) -> Dict[str, float]:
        """Inverse of `build_params`: rates back in units of 2*pi x MHz."""
        out = {name: getattr(self, name) / TWO_PI for name in _MHZ_FIELDS}
        out["phi2"] = self.phi2
        return out


def build_params(
    g: float,
    k: float,
    gamma_sp: float,
    omega1: float,
    delta: float,
    delta_b_f: float = 0.0,
    delta_b_fp: float = 0.0,
    omega2: float | None = None,
    phi2: float = math.pi / 2,
) -> SystemParams:
    """Build `SystemParams` from values quoted in 2*pi x MHz.

    `omega2` defaults to `omega1`. `phi2` is a phase in radians and is not
    converted.
    """
    if omega2 is None:
        omega2 = omega1
    values = {
        "g": g, "k": k, "gamma_sp": gamma_sp, "omega1": omega1, "omega2": omega2,
        "delta": delta, "delta_b_f": delta_b_f, "delta_b_fp": delta_b_fp,
    }
    converted = {name: _require_finite(name, v) * TWO_PI for name, v in values.items()}
    return SystemParams(phi2=phi2, **converted)


def raman_coupling(params: SystemParams, which_node: int = 1) -> float:
    """Effective Raman atom-photon coupling G = g * Omega / delta (rad/us)."""
    if which_node == 1:
        omega = params.omega1
    elif which_node == 2:
        omega = params.omega2
    else:
        raise ParameterError(f"which_node must be 1 or 2, got {which_node!r}")
    return params.g * omega / params.delta


def photon_generation_rate(params: SystemParams, which_node: int = 1) -> float:
    """Cavity photon generation rate alpha = 4 G^2 / k (rad/us)."""
    coupling = raman_coupling(params, which_node)
    return 4.0 * coupling * coupling / params.k


def cooperativity(params: SystemParams) -> float:
    return 4.0 * params.g * params.g / (params.k * params.gamma_sp)


# --- pulse envelopes ---

@dataclass(frozen=True)
class PulseProfile:
    """Dimensionless drive envelope f(t) with peak value 1.

    Gaussian: f(t) = exp(-((t - center) / duration)^2).
    Tabulated: linear interpolation of (times, values); `duration` is the
    equivalent gaussian width (integral of f divided by sqrt(pi)).
    """

    shape: Literal["gaussian", "tabulated"]
    duration: float
    center: float = 0.0
    samples: Tuple[np.ndarray, np.ndarray] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.shape not in ("gaussian", "tabulated"):
            raise ParameterError(f"unknown pulse shape {self.shape!r}")
        duration = _require_finite("duration", self.duration)
        if duration <= 0.0:
            raise ParameterError(f"pulse duration must be positive, got {duration!r}")
        object.__setattr__(self, "duration", duration)
        object.__setattr__(self, "center", _require_finite("center", self.center))
        if self.shape == "tabulated" and self.samples is None:
            raise ParameterError("tabulated pulse profile requires samples")

    @classmethod
    def gaussian(cls, duration: float, center: float = 0.0) -> "PulseProfile":
        return cls(shape="gaussian", duration=duration, center=center)

    @classmethod
    def tabulated(cls, times, values, *, normalize: bool = True) -> "PulseProfile":
        times = np.array(times, dtype=float)
        values = np.array(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise ParameterError("tabulated profile needs two equal-length 1-D arrays with at least 2 samples")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise ParameterError("tabulated profile samples must be finite")
        if np.any(np.diff(times) <= 0.0):
            raise ParameterError("tabulated profile times must be strictly increasing")
        if np.any(values < 0.0):
            raise ParameterError("tabulated profile values must be non-negative")
        peak = float(values.max())
        if peak <= 0.0:
            raise ParameterError("tabulated profile is identically zero")
        if normalize:
            values = values / peak
        elif peak > 1.0 + 1e-12:
            raise ParameterError(f"tabulated profile exceeds 1 (peak {peak!r})")
        area = float(trapezoid(values, times))
        times.setflags(write=False)
        values.setflags(write=False)
        return cls(
            shape="tabulated",
            duration=area / math.sqrt(math.pi),
            center=float(times[int(np.argmax(values))]),
            samples=(times, values),
        )

    def support(self, widths: float = 5.0) -> Tuple[float, float]:
        """Interval outside of which the envelope is negligible (or zero)."""
        if self.shape == "gaussian":
            return self.center - widths * self.duration, self.center + widths * self.duration
        times = self.samples[0]
        return float(times[0]), float(times[-1])

    def breakpoints(self) -> np.ndarray:
        if self.shape == "gaussian":
            return np.array([self.center])
        return self.samples[0]

    def shifted(self, delay: float) -> "PulseProfile":
        if self.shape == "gaussian":
            return PulseProfile.gaussian(self.duration, self.center + delay)
        times, values = self.samples
        shifted_times = times + delay
        shifted_times.setflags(write=False)
        return PulseProfile(shape="tabulated", duration=self.duration, center=self.center + delay,
                            samples=(shifted_times, values))

    def values(self, t, *, strict: bool = True):
        """Envelope at t. With strict=False a tabulated profile is zero outside its samples."""
        t_arr = np.asarray(t, dtype=float)
        if self.shape == "gaussian":
            x = (t_arr - self.center) / self.duration
            out = np.exp(-x * x)
        else:
            times, vals = self.samples
            if strict and (np.any(t_arr < times[0]) or np.any(t_arr > times[-1])):
                raise ParameterError(
                    f"time outside tabulated profile range [{times[0]!r}, {times[-1]!r}]"
                )
            out = np.interp(t_arr, times, vals, left=0.0, right=0.0)
        return float(out) if out.ndim == 0 else out

    def sqrt_values(self, t, *, strict: bool = False):
        return np.sqrt(self.values(t, strict=strict))

    def sqrt_derivative(self, t):
        """d f^(1/2) / dt; exact for gaussians, finite differences for tabulated shapes."""
        t_arr = np.asarray(t, dtype=float)
        if self.shape == "gaussian":
            x = t_arr - self.center
            return -(x / (self.duration * self.duration)) * self.sqrt_values(t_arr)
        return np.gradient(self.sqrt_values(t_arr), t_arr)


def envelope_eval(profile: PulseProfile, t):
    return profile.values(t, strict=True)


# --- time grids ---

@dataclass(frozen=True)
class TimeGrid:
    start: float
    end: float
    n_points: int = 2000
    adaptive_tol: float = 1e-10

    def __post_init__(self):
        start = _require_finite("start", self.start)
        end = _require_finite("end", self.end)
        if not start < end:
            raise ParameterError(f"time grid needs start < end, got [{start!r}, {end!r}]")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ParameterError(f"time grid needs at least 2 points, got {self.n_points!r}")
        if not self.adaptive_tol > 0.0:
            raise ParameterError(f"adaptive_tol must be positive, got {self.adaptive_tol!r}")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def around(cls, profile: PulseProfile, widths: float = 5.0, n_points: int = 2000,
               adaptive_tol: float = 1e-10) -> "TimeGrid":
        lo, hi = profile.support(widths)
        return cls(lo, hi, n_points, adaptive_tol)

    @property
    def step(self) -> float:
        return (self.end - self.start) / (self.n_points - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.start, self.end, self.n_points)

    def covers(self, lo: float, hi: float) -> bool:
        return self.start <= lo and self.end >= hi


# --- regime diagnostics ---

@dataclass(frozen=True)
class Check:
    """One "lhs >> rhs" comparison. ratio = lhs / rhs."""

    name: str
    lhs: float
    rhs: float
    ratio: float
    threshold: float
    floor: float

    @property
    def passed(self) -> bool:
        return self.ratio >= self.threshold

    @property
    def status(self) -> str:
        if self.passed:
            return "pass"
        if self.ratio >= self.floor:
            return "marginal"
        return "violated"

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name, "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
            "threshold": self.threshold, "floor": self.floor, "passed": self.passed, "status": self.status,
        }


@dataclass(frozen=True)
class DiagnosticsReport:
    checks: Tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def violated(self) -> List[Check]:
        return [c for c in self.checks if c.status == "violated"]

    def by_name(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> Dict[str, object]:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _make_check(name: str, lhs: float, rhs: float, threshold: float, floor: float) -> Check:
    ratio = lhs / rhs if rhs > 0.0 else math.inf
    return Check(name=name, lhs=float(lhs), rhs=float(rhs), ratio=float(ratio), threshold=threshold, floor=floor)


def validate_regime(params: SystemParams, profile: PulseProfile, grid: TimeGrid) -> DiagnosticsReport:
    """Validity conditions of the sending node. Shortfalls are reported, never raised."""
    g1 = abs(raman_coupling(params, 1))
    checks = [
        _make_check("raman_below_leakage", params.k, g1, 1.0, 1.0),
        _make_check("cooperativity", cooperativity(params), 1.0, STRONG_MARGIN, WEAK_MARGIN),
        _make_check(
            "detuning_hierarchy",
            abs(params.delta),
            max(params.k, params.gamma_sp, params.omega1, abs(params.delta_b_f), abs(params.delta_b_fp)),
            STRONG_MARGIN,
            WEAK_MARGIN,
        ),
        _make_check("adiabatic_limit", params.k * profile.duration, 1.0, STRONG_MARGIN, WEAK_MARGIN),
    ]

    t = grid.times()
    f = profile.values(t, strict=False)
    mask = f > 1e-6
    root = np.sqrt(f[mask])
    slope = np.abs(profile.sqrt_derivative(t)[mask])
    moving = slope > 0.0
    if np.any(moving):
        local = abs(params.delta) * root[moving] / slope[moving]
        worst = int(np.argmin(local))
        checks.append(_make_check("slow_variation", abs(params.delta) * root[moving][worst],
                                  slope[moving][worst], STRONG_MARGIN, WEAK_MARGIN))
    else:
        checks.append(_make_check("slow_variation", abs(params.delta), 0.0, STRONG_MARGIN, WEAK_MARGIN))

    report = DiagnosticsReport(checks=tuple(checks))
    for check in report.checks:
        if check.status != "pass":
            logger.warning("regime check %s is %s (ratio %.4g, threshold %.4g)",
                           check.name, check.status, check.ratio, check.threshold)
    return report
