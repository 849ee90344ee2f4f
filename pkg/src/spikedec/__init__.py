"""Event-driven spiking network simulation with rate, latency and hypervector decoding."""

from . import decoders, events, hdc, snn, train
from .errors import (
    ConfigError,
    FormatError,
    MathError,
    ShapeError,
    SpikedecError,
    TrainingError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FormatError",
    "MathError",
    "ShapeError",
    "SpikedecError",
    "TrainingError",
    "ValidationError",
    "decoders",
    "events",
    "hdc",
    "snn",
    "train",
]
