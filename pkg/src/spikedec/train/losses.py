"""Losses for the three decoders, differentiable through the spike trains.

All three return a scalar torch tensor; gradients reach the network through
the surrogate-gradient spike outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from ..errors import ShapeError, ValidationError
from ..hdc import BinaryHypervector


@dataclass(frozen=True)
class RateTarget:
    """Target fractions of timesteps each output neuron should fire."""

    correct_rate: float = 0.8
    incorrect_rate: float = 0.2

    def __post_init__(self):
        if not (0.0 <= self.correct_rate <= 1.0 and 0.0 <= self.incorrect_rate <= 1.0):
            raise ValidationError("rate targets must be fractions in [0, 1]")


@dataclass(frozen=True)
class LatencyTarget:
    """Normalized first-spike targets: fire immediately vs never."""

    correct: float = 0.0
    incorrect: float = 1.0


def _check_train(output_train: torch.Tensor, min_units: int = 2) -> torch.Tensor:
    if output_train.dim() != 2:
        raise ShapeError(f"expected a [T, units] train, got {tuple(output_train.shape)}")
    if output_train.shape[1] < min_units:
        raise ShapeError(f"need at least {min_units} output neurons")
    return output_train


def rate_loss(
    output_train: torch.Tensor,
    true_class: int,
    target: RateTarget = RateTarget(),
) -> torch.Tensor:
    """MSE between per-neuron firing fractions and the 0.8 / 0.2 targets."""
    train = _check_train(output_train)
    timesteps, units = train.shape
    rates = train.sum(dim=0) / timesteps
    wanted = torch.full((units,), target.incorrect_rate, dtype=train.dtype, device=train.device)
    wanted[true_class] = target.correct_rate
    return torch.mean((rates - wanted) ** 2)


def first_spike_times(output_train: torch.Tensor) -> torch.Tensor:
    """Normalized first-spike time per neuron; silent neurons map to 1.0.

    Computed as (sum_t prod_{t'<t}(1 - s[t']) - 1) / (T - 1): for 0/1 spikes
    this is exactly first-spike-index / (T-1), and for soft spikes it is a
    smooth relaxation, so gradients flow through the spike values at and
    before the first spike.
    """
    train = _check_train(output_train, min_units=1)
    timesteps = train.shape[0]
    if timesteps < 2:
        raise ShapeError("latency loss needs at least 2 timesteps")
    survive = torch.cumprod(1.0 - train, dim=0)
    alive_before = torch.cat(
        [torch.ones((1, train.shape[1]), dtype=train.dtype, device=train.device), survive[:-1]]
    )
    return (alive_before.sum(dim=0) - 1.0) / (timesteps - 1)


def latency_loss(
    output_train: torch.Tensor,
    true_class: int,
    target: LatencyTarget = LatencyTarget(),
) -> torch.Tensor:
    """MSE between normalized first-spike times and earliest/latest targets."""
    train = _check_train(output_train)
    times = first_spike_times(train)
    wanted = torch.full_like(times, target.incorrect)
    wanted[true_class] = target.correct
    return torch.mean((times - wanted) ** 2)


def hdc_loss(output_train: torch.Tensor, target: BinaryHypervector) -> torch.Tensor:
    """MSE between per-neuron spike counts and the target hypervector.

    Counts on target-on dimensions are clamped to 1, so surplus spikes there
    are free; every spike on a target-off dimension is penalized quadratically.
    """
    train = _check_train(output_train, min_units=1)
    if train.shape[1] != target.dims:
        raise ShapeError(f"train width {train.shape[1]} != target dims {target.dims}")
    counts = train.sum(dim=0)
    bits = torch.from_numpy(target.to_bits()).to(dtype=train.dtype, device=train.device)
    clamped = torch.where(bits > 0, torch.clamp(counts, max=1.0), counts)
    return torch.mean((clamped - bits) ** 2)
