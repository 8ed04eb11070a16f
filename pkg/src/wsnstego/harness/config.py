"""Experiment configuration: a flat ``key = value`` text file.

Recognised keys (defaults in brackets)::

    seed                master seed for field, noise, keys and classifier [0]
    side_length         sensors per axis [256]
    zone_counts         temperature,pressure,humidity zones [50,40,10]
    modality_fractions  [0.5,0.4,0.1]
    drift_rates         [0.005,0.01,0.001]
    base_mean           [40]
    std_dev             [5]
    ticks               snapshot times, may be empty [50,75,90,100]
    quality             JPEG quality of the sink view [80]
    algorithm           nsf5 | f5 | lsb [nsf5]
    rate                bpac for nsf5/f5, bpp for lsb [0.1]
    key                 stego key for the simulate/attack commands [20140601]
    message_file        raw bytes embedded by the attack command; empty means a
                        keyed random message filling the capacity []
    block_size          wet paper block length [256]
    lsb_rate            payload of the LSB contrast experiment, bpp [1.0]
    pairs               cover/stego pairs in the classifier dataset [400]
    train_fraction      share of pairs used for training [0.5]
    learners            ensemble size L [100]
    d_sub               subspace dimension, 0 = ceil(d / 4) [0]
    d_sub_sweep         subspace dimensions for the sweep report [16,31,62,124,248]
    out                 output directory [out]
    workers             worker processes [1]

Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from ..fieldsim import FieldConfig

__all__ = ["ALGORITHMS", "ExperimentConfig", "load_config", "parse_config_text"]

ALGORITHMS = ("nsf5", "f5", "lsb")

# Keys that change where or how fast results are produced, not what they are.
_RUNTIME_KEYS = ("out", "workers")


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(" ", "").split(",") if v)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    side_length: int = 256
    zone_counts: tuple[int, ...] = (50, 40, 10)
    modality_fractions: tuple[float, ...] = (0.5, 0.4, 0.1)
    drift_rates: tuple[float, ...] = (0.005, 0.01, 0.001)
    base_mean: float = 40.0
    std_dev: float = 5.0
    ticks: tuple[int, ...] = (50, 75, 90, 100)
    quality: int = 80
    algorithm: str = "nsf5"
    rate: float = 0.1
    key: int = 20140601
    message_file: str = ""
    block_size: int = 256
    lsb_rate: float = 1.0
    pairs: int = 400
    train_fraction: float = 0.5
    learners: int = 100
    d_sub: int = 0
    d_sub_sweep: tuple[int, ...] = (16, 31, 62, 124, 248)
    out: str = "out"
    workers: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.n_train < 10:
            raise ValueError(f"need at least 10 training pairs, config gives {self.n_train}")
        if self.pairs - self.n_train < 1:
            raise ValueError("the test split is empty")
        if not 1 <= self.quality <= 100:
            raise ValueError("quality must be in [1, 100]")
        if not 0 <= self.rate <= 1 or not 0 <= self.lsb_rate <= 1:
            raise ValueError("rates must be in [0, 1]")
        if self.learners < 1 or self.workers < 1 or self.block_size < 1:
            raise ValueError("learners, workers and block_size must be positive")
        if any(t < 0 for t in self.ticks):
            raise ValueError("ticks must be non-negative")
        self.field_config()  # validates the field keys

    @property
    def n_train(self) -> int:
        return int(self.pairs * self.train_fraction)

    def field_config(self, seed: int | None = None) -> FieldConfig:
        return FieldConfig(
            side_length=self.side_length,
            zone_counts=tuple(self.zone_counts),
            modality_fractions=tuple(self.modality_fractions),
            drift_rates=tuple(self.drift_rates),
            base_mean=self.base_mean,
            std_dev=self.std_dev,
            seed=self.seed if seed is None else seed,
        )

    def items(self) -> list[tuple[str, str]]:
        pairs = []
        for f in fields(self):
            value = getattr(self, f.name)
            text = ",".join(repr(v) for v in value) if isinstance(value, tuple) else repr(value)
            pairs.append((f.name, text.strip("'")))
        return pairs

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.items())

    def config_hash(self) -> str:
        canonical = "".join(f"{k}={v}\n" for k, v in self.items() if k not in _RUNTIME_KEYS)
        return hashlib.sha256(canonical.encode()).hexdigest()

    def with_overrides(self, values: dict[str, str]) -> "ExperimentConfig":
        return replace(self, **_convert(values))


_CONVERTERS = {
    "zone_counts": _ints,
    "ticks": _ints,
    "d_sub_sweep": _ints,
    "modality_fractions": _floats,
    "drift_rates": _floats,
    "algorithm": lambda s: s.strip().lower(),
    "out": str.strip,
    "message_file": str.strip,
}


def _convert(values: dict[str, str]) -> dict:
    known = {f.name: f for f in fields(ExperimentConfig)}
    converted = {}
    for key, raw in values.items():
        if key not in known:
            raise KeyError(f"unknown config key {key!r}")
        if key in _CONVERTERS:
            converted[key] = _CONVERTERS[key](raw)
        elif known[key].type in ("int", int):
            converted[key] = int(raw, 0)
        elif known[key].type in ("float", float):
            converted[key] = float(raw)
        else:
            converted[key] = raw
    return converted


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    values = parse_config_text(Path(path).read_text()) if path else {}
    values.update(overrides or {})
    return ExperimentConfig().with_overrides(values)
