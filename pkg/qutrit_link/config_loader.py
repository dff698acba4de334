"""Run configuration: JSON documents with params / sender / receiver /
detection / output / table1 / robustness blocks.

Rates in `params` are quoted in units of 2*pi x MHz, times in us.
"""
from __future__ import annotations

import difflib
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Dict, List, Tuple

from qutrit_link.core_params import PulseProfile, SystemParams, TimeGrid, build_params
from qutrit_link.errors import ConfigError, ParameterError

logger = logging.getLogger("config_loader")

_REQUIRED = object()


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}", key=key)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {value!r}", key=key)
    return float(value)


def _optional_number(key: str, value: Any) -> float | None:
    return None if value is None else _number(key, value)


def _positive(key: str, value: Any) -> float:
    value = _number(key, value)
    if value <= 0.0:
        raise ConfigError(f"{key}: must be positive, got {value!r}", key=key)
    return value


def _optional_positive(key: str, value: Any) -> float | None:
    return None if value is None else _positive(key, value)


def _probability(key: str, value: Any) -> float:
    value = _number(key, value)
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{key}: must lie in [0, 1], got {value!r}", key=key)
    return value


def _integer(minimum: int) -> Callable[[str, Any], int]:
    def check(key: str, value: Any) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}", key=key)
        if value < minimum:
            raise ConfigError(f"{key}: must be at least {minimum}, got {value!r}", key=key)
        return value
    return check


def _optional_integer(minimum: int) -> Callable[[str, Any], int | None]:
    check = _integer(minimum)
    return lambda key, value: None if value is None else check(key, value)


def _seed(key: str, value: Any) -> int:
    value = _integer(0)(key, value)
    if value >= 2 ** 64:
        raise ConfigError(f"{key}: must fit in 64 bits, got {value!r}", key=key)
    return value


def _boolean(key: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{key}: expected true or false, got {value!r}", key=key)
    return value


def _choice(*options: str) -> Callable[[str, Any], str]:
    def check(key: str, value: Any) -> str:
        if value not in options:
            raise ConfigError(f"{key}: expected one of {', '.join(options)}, got {value!r}", key=key)
        return value
    return check


def _optional_string(key: str, value: Any) -> str | None:
    if value is not None and not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}", key=key)
    return value


def _target(key: str, value: Any) -> int:
    if value not in (-1, 0, 1) or isinstance(value, bool):
        raise ConfigError(f"{key}: expected -1, 0 or 1, got {value!r}", key=key)
    return int(value)


def _positive_list(key: str, value: Any) -> Tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a non-empty list of numbers", key=key)
    return tuple(_positive(f"{key}[{i}]", v) for i, v in enumerate(value))


def _optional_beta2(key: str, value: Any) -> Tuple[float, float, float] | None:
    if value is None:
        return None
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(f"{key}: expected three populations [m_F=-1, 0, +1]", key=key)
    return tuple(_probability(f"{key}[{i}]", v) for i, v in enumerate(value))


@dataclass(frozen=True)
class ParamsConfig:
    g: float
    k: float
    gamma_sp: float
    omega1: float
    delta: float
    omega2: float | None = None
    delta_b_f: float = 0.0
    delta_b_fp: float = 0.0
    phi2: float = math.pi / 2


@dataclass(frozen=True)
class SenderConfig:
    T1: float
    t0: float = 0.0
    n_points: int = 2000
    span_widths: float = 5.0
    adaptive_tol: float = 1e-10


@dataclass(frozen=True)
class ReceiverConfig:
    T2: float | None = None
    solve: bool = True
    delay_us: float | None = None
    omega2_over_omega1: float | None = None
    tol: float = 1e-3
    extend_widths: float = 5.0

    @property
    def explicit_plan(self) -> bool:
        return self.delay_us is not None and self.omega2_over_omega1 is not None


@dataclass(frozen=True)
class DetectionConfig:
    n_trials: int = 100_000
    efficiency: float = 1.0
    dark_prob: float = 0.0
    seed: int = 20240101
    target: int = -1
    workers: int | None = None
    beta2: Tuple[float, float, float] | None = None


@dataclass(frozen=True)
class OutputConfig:
    dir: str | None = None
    format: str = "json"


@dataclass(frozen=True)
class Table1Config:
    durations: Tuple[float, ...] = (0.75, 0.22, 0.12)


@dataclass(frozen=True)
class RobustnessConfig:
    energy_spread: float = 0.05
    n_points: int = 11


_SCHEMA: Dict[str, Tuple[type, Dict[str, Tuple[Callable, Any]]]] = {
    "params": (ParamsConfig, {
        "g": (_number, _REQUIRED),
        "k": (_number, _REQUIRED),
        "gamma_sp": (_number, _REQUIRED),
        "omega1": (_number, _REQUIRED),
        "omega2": (_optional_number, None),
        "delta": (_number, _REQUIRED),
        "delta_b_f": (_number, 0.0),
        "delta_b_fp": (_number, 0.0),
        "phi2": (_number, math.pi / 2),
    }),
    "sender": (SenderConfig, {
        "T1": (_positive, _REQUIRED),
        "t0": (_number, 0.0),
        "n_points": (_integer(2), 2000),
        "span_widths": (_positive, 5.0),
        "adaptive_tol": (_positive, 1e-10),
    }),
    "receiver": (ReceiverConfig, {
        "T2": (_optional_positive, None),
        "solve": (_boolean, True),
        "delay_us": (_optional_number, None),
        "omega2_over_omega1": (_optional_positive, None),
        "tol": (_positive, 1e-3),
        "extend_widths": (_positive, 5.0),
    }),
    "detection": (DetectionConfig, {
        "n_trials": (_integer(1), 100_000),
        "efficiency": (_probability, 1.0),
        "dark_prob": (_probability, 0.0),
        "seed": (_seed, 20240101),
        "target": (_target, -1),
        "workers": (_optional_integer(1), None),
        "beta2": (_optional_beta2, None),
    }),
    "output": (OutputConfig, {
        "dir": (_optional_string, None),
        "format": (_choice("json", "csv", "xlsx"), "json"),
    }),
    "table1": (Table1Config, {
        "durations": (_positive_list, (0.75, 0.22, 0.12)),
    }),
    "robustness": (RobustnessConfig, {
        "energy_spread": (_number, 0.05),
        "n_points": (_integer(1), 11),
    }),
}
_REQUIRED_BLOCKS = ("params", "sender")


@dataclass(frozen=True)
class RunConfig:
    params: ParamsConfig
    sender: SenderConfig
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    table1: Table1Config = field(default_factory=Table1Config)
    robustness: RobustnessConfig = field(default_factory=RobustnessConfig)
    source: str | None = field(default=None, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        """Resolved configuration, defaults included; echoed into every output."""
        out = {}
        for block in _SCHEMA:
            values = asdict(getattr(self, block))
            out[block] = {key: list(v) if isinstance(v, tuple) else v for key, v in values.items()}
        out["params"]["omega2"] = self.omega2_mhz
        out["receiver"]["T2"] = self.T2
        return out

    @property
    def omega2_mhz(self) -> float:
        p = self.params
        return 4.0 * p.omega1 if p.omega2 is None else p.omega2

    @property
    def T2(self) -> float:
        return self.sender.T1 if self.receiver.T2 is None else self.receiver.T2

    def system_params(self) -> SystemParams:
        p = self.params
        try:
            return build_params(
                g=p.g, k=p.k, gamma_sp=p.gamma_sp, omega1=p.omega1, delta=p.delta,
                delta_b_f=p.delta_b_f, delta_b_fp=p.delta_b_fp, omega2=self.omega2_mhz, phi2=p.phi2,
            )
        except ParameterError as exc:
            name = str(exc).split(" ", 1)[0]
            raise ConfigError(f"params.{name}: {exc}", key=f"params.{name}") from exc

    def sender_profile(self, T1: float | None = None) -> PulseProfile:
        return PulseProfile.gaussian(self.sender.T1 if T1 is None else T1, self.sender.t0)

    def time_grid(self, profile: PulseProfile) -> TimeGrid:
        s = self.sender
        return TimeGrid.around(profile, widths=s.span_widths, n_points=s.n_points, adaptive_tol=s.adaptive_tol)

    def with_seed(self, seed: int | None) -> "RunConfig":
        if seed is None:
            return self
        return replace(self, detection=replace(self.detection, seed=_seed("detection.seed", seed)))


def _reject_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    seen: Dict[str, Any] = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", key=key)
        seen[key] = value
    return seen


def _unknown_key_error(key: str, allowed, prefix: str = "") -> ConfigError:
    full = f"{prefix}{key}"
    matches = difflib.get_close_matches(key, list(allowed), n=1)
    hint = f" (did you mean {prefix + matches[0]!r}?)" if matches else ""
    return ConfigError(f"unknown key {full!r}{hint}", key=full)


def _build_block(name: str, raw: Any):
    cls, fields_ = _SCHEMA[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object", key=name)
    for key in raw:
        if key not in fields_:
            raise _unknown_key_error(key, fields_, prefix=f"{name}.")
    values = {}
    for key, (check, default) in fields_.items():
        full = f"{name}.{key}"
        if key not in raw:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {full!r}", key=full)
            values[key] = default
        else:
            values[key] = check(full, raw[key])
    return cls(**values)


def parse_config(document: Dict[str, Any], source: str | None = None) -> RunConfig:
    if not isinstance(document, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in document:
        if key not in _SCHEMA:
            raise _unknown_key_error(key, _SCHEMA)
    for block in _REQUIRED_BLOCKS:
        if block not in document:
            raise ConfigError(f"missing required block {block!r}", key=block)
    blocks = {name: _build_block(name, document[name]) for name in _SCHEMA if name in document}
    config = RunConfig(source=source, **blocks)

    receiver = config.receiver
    if (receiver.delay_us is None) != (receiver.omega2_over_omega1 is None):
        raise ConfigError(
            "receiver.delay_us and receiver.omega2_over_omega1 must be given together",
            key="receiver.delay_us" if receiver.delay_us is None else "receiver.omega2_over_omega1",
        )
    if not receiver.solve and not receiver.explicit_plan:
        raise ConfigError("receiver.solve is false but no explicit delay_us / omega2_over_omega1 is given",
                          key="receiver.solve")
    config.system_params()
    return config


def load_config(path: str) -> RunConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        document = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc.msg} at line {exc.lineno} column {exc.colno}",
                          line=exc.lineno, column=exc.colno) from exc
    config = parse_config(document, source=path)
    logger.debug("loaded config %s", path)
    return config
