"""Experiment configuration: a versioned, JSON-compatible key/value document."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from ..errors import ConfigError
from ..train.bptt import LOSS_KINDS, TrainConfig

SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    backbone: str = "8c3-2p-0.1d"  # output layer is appended per decoder
    padding: str = "valid"
    decoders: list[str] = field(default_factory=lambda: ["rate", "latency", "hdc"])
    n_classes: int = 3
    dims: int = 64  # hypervector width / HDC output-layer size
    beta: float = 0.9
    delta: float | None = None
    seeds: list[int] = field(default_factory=lambda: [0])
    codebook_seed: int | None = None  # default: derived from the run seed
    known_classes: list[int] | None = None  # train on a subset, rest is "unknown"
    dataset: str = "synthetic"  # or a directory produced by the converter
    dataset_seed: int = 1234
    dt_us: int = 1000
    clip_us: int = 100_000
    sensor_size: int = 16
    downsample_to: int | None = None
    train_per_class: int = 40
    test_per_class: int = 20
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    surrogate_slope: float = 2.0
    grad_clip_norm: float | None = 10.0
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema version {self.schema_version}")
        for d in self.decoders:
            if d not in LOSS_KINDS:
                raise ConfigError(f"unknown decoder {d!r}")
        if not self.decoders:
            raise ConfigError("at least one decoder required")
        if "hdc" in self.decoders and self.dims < 1:
            raise ConfigError("hdc decoding requires dims >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must be in [0, 1], got {self.beta}")
        if self.delta is not None and not 0.0 < self.delta <= 0.5:
            raise ConfigError(f"delta must be in (0, 0.5], got {self.delta}")
        if not self.seeds:
            raise ConfigError("at least one seed required")
        if self.n_classes < 2:
            raise ConfigError("need at least 2 classes")
        if self.known_classes is not None:
            bad = [c for c in self.known_classes if not 0 <= c < self.n_classes]
            if bad or len(set(self.known_classes)) < 2:
                raise ConfigError(f"known_classes must name >= 2 distinct classes, got {self.known_classes}")

    def arch_for(self, decoder: str) -> str:
        width = self.dims if decoder == "hdc" else self.n_classes
        return f"{self.backbone}-{width}"

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            seed=seed,
            surrogate_slope=self.surrogate_slope,
            grad_clip_norm=self.grad_clip_norm,
        )

    def codebook_seed_for(self, seed: int) -> int:
        return self.codebook_seed if self.codebook_seed is not None else seed + 7919

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        known = {f for f in cls.__dataclass_fields__}
        extra = set(payload) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**payload)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_json(f.read())

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_json())
