"""Monte Carlo readout of the Zeeman states.

A receiving atom in m_bar = +1 (-1) emits a sigma+ (sigma-) photon that
clicks D2 (D1); m_bar = 0 stays silent and is read out by a second pulse
whose photon is detected without polarization discrimination.

Trials are processed in blocks of BLOCK_SIZE. Block b of stream s draws from
Philox keyed by SeedSequence(seed, spawn_key=(s, b)), so counts do not
depend on the number of worker threads.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from qutrit_link.errors import DetectionError
from qutrit_link.receiver import JointState

logger = logging.getLogger("detection")

BLOCK_SIZE = 65_536
DISTRIBUTION_TOL = 1e-6
# -ln(0.05): one-sided 95% Poisson bound for zero observed events
ZERO_COUNT_BOUND = 2.995732273553991
Z_95 = 1.959963984540054

# per-node outcome codes
SIGMA_PLUS = 1
SIGMA_MINUS = -1
SECOND_STAGE = 0
LOST = 2

READOUT_STREAM = 0
CORRELATION_STREAM = 1


@dataclass(frozen=True)
class DetectorModel:
    efficiency: float = 1.0
    dark_prob: float = 0.0
    seed: int = 20240101

    def __post_init__(self):
        for name in ("efficiency", "dark_prob"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
                raise DetectionError(f"{name} must be a probability in [0, 1], got {value!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2 ** 64:
            raise DetectionError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class CountRecord:
    n_plus: int
    n_minus: int
    n_silent: int
    n_second_stage: int
    n_trials: int
    efficiency: float = 1.0

    def __post_init__(self):
        if self.n_plus + self.n_minus + self.n_silent != self.n_trials:
            raise DetectionError("n_plus + n_minus + n_silent must equal n_trials")
        if self.n_second_stage > self.n_silent:
            raise DetectionError("second-stage clicks cannot exceed silent first-stage trials")

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials, "n_plus": self.n_plus, "n_minus": self.n_minus,
            "n_silent": self.n_silent, "n_second_stage": self.n_second_stage,
        }


@dataclass(frozen=True)
class CoincidenceRecord:
    outcomes_a: np.ndarray = field(repr=False)
    outcomes_b: np.ndarray = field(repr=False)
    n_trials: int = 0
    violation_count: int = 0
    n_coincidences: int = 0
    n_lost: int = 0

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials, "violation_count": self.violation_count,
            "n_coincidences": self.n_coincidences, "n_lost": self.n_lost,
        }


@dataclass(frozen=True)
class RatioEstimate:
    ratio: float
    se: float
    lower: float
    upper: float


@dataclass(frozen=True)
class FidelityEstimate:
    fidelity: float
    se: float
    p_hat: float


# --- sampling ---

def _distribution(joint_or_beta2) -> np.ndarray:
    if isinstance(joint_or_beta2, JointState):
        weights = joint_or_beta2.populations()
    else:
        weights = np.asarray(joint_or_beta2, dtype=float)
    if weights.shape != (3,) or not np.all(np.isfinite(weights)) or np.any(weights < 0.0):
        raise DetectionError(f"beta^2 must be three finite non-negative weights, got {np.asarray(weights).tolist()}")
    total = float(weights.sum())
    if abs(total - 1.0) > DISTRIBUTION_TOL:
        raise DetectionError(f"beta^2 sums to {total:.9g}, not 1")
    return weights / total


def _check_trials(n_trials) -> int:
    if isinstance(n_trials, bool) or int(n_trials) != n_trials or n_trials < 1:
        raise DetectionError(f"n_trials must be a positive integer, got {n_trials!r}")
    return int(n_trials)


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, block))))


def _sample_m_f(rng: np.random.Generator, weights: np.ndarray, size: int) -> np.ndarray:
    """Sender Zeeman state m_F in {-1, 0, +1} for each trial."""
    edges = np.cumsum(weights)[:2]
    return np.searchsorted(edges, rng.random(size), side="right").astype(np.int8) - 1


def _node_readout(rng: np.random.Generator, m_bar: np.ndarray, detector: DetectorModel) -> np.ndarray:
    """Outcome code per trial for atoms in Zeeman state m_bar. Every array is drawn each call."""
    size = m_bar.size
    eta, dark = detector.efficiency, detector.dark_prob
    detected = rng.random(size) < eta
    dark_d1 = rng.random(size) < dark
    dark_d2 = rng.random(size) < dark
    coin = rng.random(size) < 0.5
    detected_second = rng.random(size) < eta
    dark_second = (rng.random(size) < dark) | (rng.random(size) < dark)

    click_plus = ((m_bar == 1) & detected) | dark_d2
    click_minus = ((m_bar == -1) & detected) | dark_d1
    both = click_plus & click_minus

    out = np.full(size, LOST, dtype=np.int8)
    out[click_plus & ~click_minus] = SIGMA_PLUS
    out[click_minus & ~click_plus] = SIGMA_MINUS
    out[both & coin] = SIGMA_PLUS
    out[both & ~coin] = SIGMA_MINUS
    silent = ~(click_plus | click_minus)
    second = silent & (((m_bar == 0) & detected_second) | dark_second)
    out[second] = SECOND_STAGE
    return out


def _block_sizes(n_trials: int) -> List[int]:
    full, rest = divmod(n_trials, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _run_blocks(fn: Callable[[int, int], object], n_trials: int, workers: int) -> list:
    sizes = _block_sizes(n_trials)
    if workers <= 1 or len(sizes) == 1:
        return [fn(b, size) for b, size in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))


def simulate_readout(joint_or_beta2, detector: DetectorModel, n_trials: int, *, workers: int = 1) -> CountRecord:
    """Click statistics of the receiving node; beta^2 is ordered m_F = -1, 0, +1 at the sender."""
    weights = _distribution(joint_or_beta2)
    n_trials = _check_trials(n_trials)

    def run_block(block: int, size: int) -> Tuple[int, int, int, int]:
        rng = block_rng(detector.seed, READOUT_STREAM, block)
        m_bar = -_sample_m_f(rng, weights, size)
        out = _node_readout(rng, m_bar, detector)
        n_plus = int(np.count_nonzero(out == SIGMA_PLUS))
        n_minus = int(np.count_nonzero(out == SIGMA_MINUS))
        n_second = int(np.count_nonzero(out == SECOND_STAGE))
        return n_plus, n_minus, size - n_plus - n_minus, n_second

    totals = np.sum(np.array(_run_blocks(run_block, n_trials, workers), dtype=np.int64), axis=0)
    record = CountRecord(
        n_plus=int(totals[0]), n_minus=int(totals[1]), n_silent=int(totals[2]),
        n_second_stage=int(totals[3]), n_trials=n_trials, efficiency=detector.efficiency,
    )
    logger.info("readout: %d trials, n_plus=%d n_minus=%d silent=%d second=%d",
                n_trials, record.n_plus, record.n_minus, record.n_silent, record.n_second_stage)
    return record


def estimate_ratio(record: CountRecord) -> RatioEstimate:
    """n_plus / n_minus with multinomial error propagation.

    Var(r) = r^2 [(1 - p+)/n+ + (1 - p-)/n- + 2/N], p+- = n+- / N. With no
    sigma+ clicks the ratio is 0 and `upper` is the one-sided 95% bound
    2.996 / n-.
    """
    if record.n_minus == 0:
        raise DetectionError("no sigma- clicks: the ratio n_plus / n_minus is undefined")
    n = record.n_trials
    ratio = record.n_plus / record.n_minus
    if record.n_plus == 0:
        return RatioEstimate(ratio=0.0, se=0.0, lower=0.0, upper=ZERO_COUNT_BOUND / record.n_minus)
    p_plus = record.n_plus / n
    p_minus = record.n_minus / n
    var = ratio * ratio * ((1.0 - p_plus) / record.n_plus + (1.0 - p_minus) / record.n_minus + 2.0 / n)
    se = math.sqrt(var)
    return RatioEstimate(ratio=ratio, se=se, lower=max(ratio - Z_95 * se, 0.0), upper=ratio + Z_95 * se)


def expected_ratio(beta2: Sequence[float]) -> float | None:
    """beta_-1^2 / beta_+1^2, the large-sample limit of n_plus / n_minus."""
    return float(beta2[0]) / float(beta2[2]) if beta2[2] > 0.0 else None


def simulate_two_node_correlation(joint_state: JointState, detector: DetectorModel, n_trials: int, *,
                                  workers: int = 1) -> CoincidenceRecord:
    """Joint readout of both atoms. Node A holds m_F, node B holds -m_F."""
    if not joint_state.is_complete:
        raise DetectionError("two-node correlation needs a complete joint state (absorption incomplete)")
    weights = _distribution(joint_state)
    n_trials = _check_trials(n_trials)

    def run_block(block: int, size: int) -> Tuple[np.ndarray, np.ndarray]:
        rng = block_rng(detector.seed, CORRELATION_STREAM, block)
        m_f = _sample_m_f(rng, weights, size)
        return _node_readout(rng, m_f, detector), _node_readout(rng, -m_f, detector)

    blocks = _run_blocks(run_block, n_trials, workers)
    a = np.concatenate([blk[0] for blk in blocks])
    b = np.concatenate([blk[1] for blk in blocks])
    definite = (a != LOST) & (b != LOST)
    violations = definite & (a.astype(np.int16) + b.astype(np.int16) != 0)
    record = CoincidenceRecord(
        outcomes_a=a, outcomes_b=b, n_trials=n_trials,
        violation_count=int(np.count_nonzero(violations)),
        n_coincidences=int(np.count_nonzero(definite)),
        n_lost=int(np.count_nonzero(~definite)),
    )
    if record.violation_count:
        logger.warning("%d of %d trials broke the A/B anticorrelation", record.violation_count, n_trials)
    return record


def fidelity_estimate(record: CountRecord, target_state_index: int = -1) -> FidelityEstimate:
    """F = p_hat^2 for the receiver diagonal element <m_bar|rho|m_bar>, p_hat = clicks / (N eta)."""
    counts = {1: record.n_plus, -1: record.n_minus, 0: record.n_second_stage}
    if target_state_index not in counts:
        raise DetectionError(f"target state must be -1, 0 or +1, got {target_state_index!r}")
    usable = record.n_plus + record.n_minus + record.n_second_stage
    if usable == 0 or record.efficiency <= 0.0:
        raise DetectionError("no usable clicks to estimate the fidelity from")
    n = record.n_trials
    q = counts[target_state_index] / n
    p_hat = min(q / record.efficiency, 1.0)
    se_p = math.sqrt(q * (1.0 - q) / n) / record.efficiency
    return FidelityEstimate(fidelity=p_hat * p_hat, se=2.0 * p_hat * se_p, p_hat=p_hat)
