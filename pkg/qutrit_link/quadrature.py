"""Adaptive quadrature helpers on top of `scipy.integrate.quad`.

Piecewise-linear integrands (tabulated envelopes, sampled wavepackets) are
split at their knots so that QUADPACK never straddles a kink.
"""
import logging
import warnings
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

logger = logging.getLogger("quadrature")

DEFAULT_TOL = 1e-10
_MAX_POINTS_PER_CALL = 40


def _quad(func: Callable[[float], float], a: float, b: float, points, epsabs: float, epsrel: float, limit: int) -> float:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, abserr = quad(func, a, b, points=points, epsabs=epsabs, epsrel=epsrel, limit=limit)
    for w in caught:
        logger.warning("quad on [%.6g, %.6g]: %s (abserr=%.3g)", a, b, w.message, abserr)
    return float(value)


def integrate(
    func: Callable[[float], float],
    a: float,
    b: float,
    *,
    breakpoints: Iterable[float] | None = None,
    epsabs: float = DEFAULT_TOL,
    epsrel: float = DEFAULT_TOL,
    limit: int = 200,
) -> float:
    if a == b:
        return 0.0
    if a > b:
        return -integrate(func, b, a, breakpoints=breakpoints, epsabs=epsabs, epsrel=epsrel, limit=limit)

    pts = np.array([] if breakpoints is None else list(breakpoints), dtype=float)
    pts = np.unique(pts[(pts > a) & (pts < b)])
    if pts.size <= _MAX_POINTS_PER_CALL:
        return _quad(func, a, b, pts if pts.size else None, epsabs, epsrel, max(limit, 2 * pts.size + 50))

    edges = np.concatenate(([a], pts[_MAX_POINTS_PER_CALL - 1::_MAX_POINTS_PER_CALL], [b]))
    edges = np.unique(edges)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        inner = pts[(pts > lo) & (pts < hi)]
        total += _quad(func, float(lo), float(hi), inner if inner.size else None, epsabs, epsrel,
                       max(limit, 2 * inner.size + 50))
    return total


def cumulative(
    func: Callable[[float], float],
    times: np.ndarray,
    *,
    start: float,
    breakpoints: Iterable[float] | None = None,
    epsabs: float = DEFAULT_TOL,
    epsrel: float = DEFAULT_TOL,
) -> np.ndarray:
    """Integral of func from `start` to each of `times` (any order)."""
    times = np.asarray(times, dtype=float)
    flat = times.ravel()
    order = np.argsort(flat, kind="stable")
    bp = None if breakpoints is None else np.asarray(list(breakpoints), dtype=float)
    out = np.empty_like(flat)
    running = 0.0
    previous = start
    for idx in order:
        t = flat[idx]
        if t > previous:
            running += integrate(func, previous, t, breakpoints=bp, epsabs=epsabs, epsrel=epsrel)
            previous = t
        out[idx] = running if t > start else 0.0
    return out.reshape(times.shape)
