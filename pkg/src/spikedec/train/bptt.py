"""Surrogate-gradient training through time, and its finite-difference audit."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import torch

from ..errors import ConfigError, TrainingError
from ..hdc import ClassCodebook
from ..snn.network import Network
from ..snn.simulate import DEFAULT_SURROGATE_SLOPE, simulate
from .losses import hdc_loss, latency_loss, rate_loss

LOSS_KINDS = ("rate", "latency", "hdc")


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    seed: int = 0
    surrogate_slope: float = DEFAULT_SURROGATE_SLOPE
    gradient_mode: str = "hard"  # hard threshold w/ surrogate backward, or fully soft
    grad_clip_norm: float | None = 10.0  # BPTT over long windows; None disables

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.surrogate_slope <= 0:
            raise ConfigError("surrogate slope must be positive")
        if self.gradient_mode not in ("hard", "soft"):
            raise ConfigError(f"gradient_mode must be hard or soft, got {self.gradient_mode!r}")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    train_accuracy: float
    test_accuracy: float | None
    wall_time_s: float


def sample_loss(kind: str, output_train: torch.Tensor, label: int, codebook: ClassCodebook | None):
    if kind == "rate":
        return rate_loss(output_train, label)
    if kind == "latency":
        return latency_loss(output_train, label)
    if kind == "hdc":
        return hdc_loss(output_train, codebook[label])
    raise ConfigError(f"unknown loss kind {kind!r}")


def predict(output_train: np.ndarray, kind: str, codebook: ClassCodebook | None) -> int | None:
    """Decode one output train with the decoder matching the loss."""
    from .. import decoders

    if kind == "rate":
        return decoders.rate_decode(output_train).predicted_class
    if kind == "latency":
        return decoders.latency_decode(output_train).predicted_class
    hv, _ = decoders.hdc_accumulate(output_train)
    return decoders.hdc_classify(hv, codebook).predicted_class


def _stack_frames(samples, device=None) -> torch.Tensor:
    arrays = [np.asarray(s[0].frames if hasattr(s[0], "frames") else s[0]) for s in samples]
    return torch.from_numpy(np.stack(arrays)).to(torch.float32)


def evaluate_accuracy(
    net: Network,
    data,
    kind: str,
    codebook: ClassCodebook | None = None,
    batch_size: int = 32,
) -> float:
    hits = 0
    with torch.no_grad():
        for start in range(0, len(data), batch_size):
            chunk = data[start : start + batch_size]
            out, _, _ = simulate(net, _stack_frames(chunk), mode="eval")
            for b, (_, label) in enumerate(chunk):
                if predict(out[b].numpy(), kind, codebook) == label:
                    hits += 1
    return hits / len(data)


def bptt_train(
    net: Network,
    data,
    cfg: TrainConfig,
    loss_kind: str,
    codebook: ClassCodebook | None = None,
    eval_data=None,
) -> tuple[Network, list[EpochStats]]:
    """Train in place; returns the network and per-epoch history.

    ``data`` is a sequence of (frames, label) pairs with identical shapes.
    The whole trajectory is determined by (seed, data, config).
    """
    if loss_kind not in LOSS_KINDS:
        raise ConfigError(f"loss must be one of {LOSS_KINDS}, got {loss_kind!r}")
    if loss_kind == "hdc" and codebook is None:
        raise ConfigError("hdc loss needs a class codebook")
    if not data:
        raise ConfigError("training data is empty")

    gen = torch.Generator().manual_seed(cfg.seed)
    params = [p for p in net.parameters() if p.numel() > 0]
    optimizer = torch.optim.Adam(
        params, lr=cfg.learning_rate, betas=cfg.adam_betas, eps=cfg.adam_eps
    )
    soft = cfg.gradient_mode == "soft"
    history: list[EpochStats] = []

    for epoch in range(cfg.epochs):
        started = time.perf_counter()
        order = torch.randperm(len(data), generator=gen).tolist()
        epoch_loss = 0.0
        hits = 0
        for start in range(0, len(order), cfg.batch_size):
            batch = [data[i] for i in order[start : start + cfg.batch_size]]
            frames = _stack_frames(batch)
            out, _, _ = simulate(
                net, frames, mode="train", soft=soft, slope=cfg.surrogate_slope, generator=gen
            )
            losses = [
                sample_loss(loss_kind, out[b], label, codebook)
                for b, (_, label) in enumerate(batch)
            ]
            loss = torch.stack(losses).mean()
            if not torch.isfinite(loss):
                raise TrainingError(f"loss diverged at epoch {epoch}")
            optimizer.zero_grad()
            loss.backward()
            if cfg.grad_clip_norm is not None:
                torch.nn.utils.clip_grad_norm_(params, cfg.grad_clip_norm)
            optimizer.step()
            epoch_loss += float(loss.detach()) * len(batch)
            detached = out.detach()
            for b, (_, label) in enumerate(batch):
                if predict(detached[b].numpy(), loss_kind, codebook) == label:
                    hits += 1
        test_acc = (
            evaluate_accuracy(net, eval_data, loss_kind, codebook, cfg.batch_size)
            if eval_data
            else None
        )
        history.append(
            EpochStats(
                epoch=epoch,
                train_loss=epoch_loss / len(data),
                train_accuracy=hits / len(data),
                test_accuracy=test_acc,
                wall_time_s=time.perf_counter() - started,
            )
        )
    return net, history


def soft_gradient_check(
    net: Network,
    loss_kind: str,
    sample,
    codebook: ClassCodebook | None = None,
    step: float = 1e-5,
    slope: float = DEFAULT_SURROGATE_SLOPE,
) -> float:
    """Max relative error between BPTT gradients and central finite differences.

    Runs the fully smooth forward in float64 so the comparison is limited by
    truncation error, not threshold discontinuities.  Intended for networks
    small enough to difference every parameter.
    """
    net = net.double()
    frames_np = np.asarray(sample[0].frames if hasattr(sample[0], "frames") else sample[0])
    label = sample[1]
    frames = torch.from_numpy(np.stack([frames_np])).to(torch.float64)
    params = [p for p in net.parameters() if p.numel() > 0]
    n_params = sum(p.numel() for p in params)
    if n_params >= 500:
        raise ConfigError(f"gradient check is for toy nets (<500 params), got {n_params}")

    def loss_value() -> torch.Tensor:
        out, _, _ = simulate(net, frames, mode="eval", soft=True, slope=slope)
        return sample_loss(loss_kind, out[0], label, codebook)

    loss = loss_value()
    grads = torch.autograd.grad(loss, params, allow_unused=True)

    worst = 0.0
    for p, g in zip(params, grads):
        auto = torch.zeros_like(p) if g is None else g
        flat = p.detach().reshape(-1)
        for j in range(flat.numel()):
            original = float(flat[j])
            with torch.no_grad():
                flat[j] = original + step
                plus = float(loss_value())
                flat[j] = original - step
                minus = float(loss_value())
                flat[j] = original
            fd = (plus - minus) / (2 * step)
            a = float(auto.reshape(-1)[j])
            err = abs(a - fd) / max(abs(a), abs(fd), 1e-6)
            worst = max(worst, err)
    return worst
