"""Timestep simulation of LIF networks with one-step spike propagation delay.

Membrane update per population: M[t] = beta * M[t-1] + (W x[t] + I), with a
spike and reset to 0 whenever M reaches 1.  A spike crossing threshold at
timestep t is delivered to the next population at t + 1, so recorded spike
trains are arrival-time trains: row t holds the crossings of t - 1, and a
crossing at the final timestep falls outside the T-row trace.

``soft=True`` replaces the hard threshold by the arctan surrogate's smooth
primitive (and scales the reset by the soft spike value), giving a fully
differentiable forward used by the finite-difference gradient check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import torch

from ..errors import MathError, ShapeError
from .network import Network

DEFAULT_SURROGATE_SLOPE = 2.0
BN_MOMENTUM = 0.1
BN_EPS = 1e-5


class _SurrogateSpike(torch.autograd.Function):
    """Exact 0/1 threshold forward, arctan surrogate derivative backward."""

    @staticmethod
    def forward(ctx, v, slope):
        ctx.save_for_backward(v)
        ctx.slope = slope
        return (v >= 1.0).to(v.dtype)

    @staticmethod
    def backward(ctx, grad_out):
        (v,) = ctx.saved_tensors
        k = ctx.slope
        g = (k / 2.0) / (1.0 + (math.pi / 2.0 * k * (v - 1.0)) ** 2)
        return grad_out * g, None


def surrogate_spike(v: torch.Tensor, slope: float = DEFAULT_SURROGATE_SLOPE) -> torch.Tensor:
    """Hard threshold on (v - 1) with an arctan surrogate gradient (slope k)."""
    return _SurrogateSpike.apply(v, slope)


def soft_spike(v: torch.Tensor, slope: float = DEFAULT_SURROGATE_SLOPE) -> torch.Tensor:
    """Smooth primitive of the arctan surrogate: 1/pi * atan(pi/2 * k * (v-1)) + 1/2."""
    return torch.atan(math.pi / 2.0 * slope * (v - 1.0)) / math.pi + 0.5


def lif_step(state: np.ndarray, drive: np.ndarray, beta: float):
    """Reference membrane update: returns (new state, 0/1 spikes).

    Pure numpy contract function; the simulator applies the same rule in torch.
    """
    state = np.asarray(state, dtype=np.float64)
    drive = np.asarray(drive, dtype=np.float64)
    if state.shape != drive.shape:
        raise ShapeError(f"state shape {state.shape} != drive shape {drive.shape}")
    if not np.all(np.isfinite(drive)):
        raise MathError("non-finite synaptic drive")
    m = beta * state + drive
    spikes = (m >= 1.0).astype(np.float64)
    return m * (1.0 - spikes), spikes


@dataclass
class RunTrace:
    """Per-layer activity of one simulated sample.

    layer_spikes[k]   -- [T, *lif_shape] uint8 arrival-time spike train of LIF block k
    layer_arrivals[k] -- [T, *in_shape] what actually entered connective block k
                         (index 0 is the input frame counts)
    """

    dt_us: int
    layer_spikes: list[np.ndarray]
    layer_arrivals: list[np.ndarray]
    spike_totals: list[int] = field(default_factory=list)
    sop_counts: list[int] | None = None

    def __post_init__(self):
        if not self.spike_totals:
            self.spike_totals = [int(s.sum()) for s in self.layer_spikes]

    @property
    def timesteps(self) -> int:
        return self.layer_spikes[0].shape[0]

    @property
    def output_train(self) -> np.ndarray:
        """[T, out_units] spike train of the final layer."""
        last = self.layer_spikes[-1]
        return last.reshape(last.shape[0], -1)

    @property
    def total_spikes(self) -> int:
        return int(sum(self.spike_totals))


def _drive(net: Network, i: int, x: torch.Tensor) -> torch.Tensor:
    block = net.blocks[i]
    if block.spec.kind == "conv":
        pad = 0 if net.padding == "valid" else block.spec.kernel // 2
        return torch.nn.functional.conv2d(x, net.weights[i], net.biases[i], padding=pad)
    return torch.nn.functional.linear(x.reshape(x.shape[0], -1), net.weights[i], net.biases[i])


def _batchnorm(net: Network, i: int, drive: torch.Tensor, train: bool) -> torch.Tensor:
    gamma, beta = net.bn_gamma[i], net.bn_beta[i]
    mean_run, var_run = net.bn_running(i)
    if train:
        dims = (0, 2, 3)
        mean = drive.mean(dim=dims)
        var = drive.var(dim=dims, correction=0)
        with torch.no_grad():
            n = drive.numel() / drive.shape[1]
            unbiased = var.detach() * (n / max(n - 1, 1))
            mean_run.mul_(1 - BN_MOMENTUM).add_(BN_MOMENTUM * mean.detach())
            var_run.mul_(1 - BN_MOMENTUM).add_(BN_MOMENTUM * unbiased)
    else:
        mean, var = mean_run, var_run
    shape = (1, -1, 1, 1)
    normed = (drive - mean.reshape(shape)) / torch.sqrt(var.reshape(shape) + BN_EPS)
    return normed * gamma.reshape(shape) + beta.reshape(shape)


def _pool_spikes(spikes: torch.Tensor, window: int) -> torch.Tensor:
    # a pooling window fires if any unit inside it fired (OR over the window)
    return torch.nn.functional.max_pool2d(spikes, kernel_size=window, stride=window)


def simulate(
    net: Network,
    frames: torch.Tensor,
    mode: str = "eval",
    soft: bool = False,
    slope: float = DEFAULT_SURROGATE_SLOPE,
    record: bool = False,
    generator: torch.Generator | None = None,
):
    """Run the batched time loop.

    frames: [B, T, C, H, W] float tensor of input counts.
    Returns (output_train [B, T, out_units], spikes per LIF block, arrivals per
    block) -- the latter two only when ``record`` is set.
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be train or eval, got {mode!r}")
    if frames.dim() != 5 or tuple(frames.shape[2:]) != net.input_shape:
        raise ShapeError(
            f"input shape {tuple(frames.shape)} does not match network input {net.input_shape}"
        )
    train = mode == "train"
    batch, timesteps = frames.shape[0], frames.shape[1]
    dtype = net.weights[0].dtype
    beta = net.beta
    fire = (lambda v: soft_spike(v, slope)) if soft else (lambda v: surrogate_spike(v, slope))

    blocks = net.blocks
    membranes = [
        torch.zeros((batch, *b.lif_shape), dtype=dtype, device=frames.device) for b in blocks
    ]
    buffers = [
        torch.zeros((batch, *b.out_shape), dtype=dtype, device=frames.device) for b in blocks
    ]
    masks: list[torch.Tensor | None] = []
    for b in blocks:
        if train and b.dropout is not None and b.dropout.rate > 0:
            keep = 1.0 - b.dropout.rate
            m = torch.empty((batch, *b.out_shape), dtype=dtype, device=frames.device)
            m.bernoulli_(keep, generator=generator).div_(keep)  # per-sample mask
            masks.append(m)
        else:
            masks.append(None)

    out_units = net.out_units
    rec_spikes = [np.zeros((batch, timesteps, *b.lif_shape), dtype=np.uint8) for b in blocks] if record else None
    rec_arrivals = (
        [np.zeros((batch, timesteps, *b.in_shape), dtype=np.float32) for b in blocks] if record else None
    )

    # arrival-time convention: index t+1 holds the crossings of timestep t
    out_steps = [torch.zeros((batch, out_units), dtype=dtype, device=frames.device)]
    for t in range(timesteps):
        arriving = frames[:, t].to(dtype)
        new_buffers = []
        for i, block in enumerate(blocks):
            if record:
                rec_arrivals[i][:, t] = arriving.detach().numpy().reshape(batch, *block.in_shape)
            d = _drive(net, i, arriving)
            if block.batchnorm:
                d = _batchnorm(net, i, d, train)
            m = beta * membranes[i] + d
            spikes = fire(m)
            membranes[i] = m * (1.0 - spikes)
            if record and t + 1 < timesteps:
                rec_spikes[i][:, t + 1] = (spikes.detach().numpy() >= 0.5).astype(np.uint8)
            out = spikes
            if block.pool is not None:
                out = _pool_spikes(out, block.pool.window)
            if masks[i] is not None:
                out = out * masks[i]
            new_buffers.append(out)
            arriving = buffers[i]  # previous timestep's spikes: one-step delay
        if t + 1 < timesteps:
            out_steps.append(new_buffers[-1].reshape(batch, -1))
        buffers = new_buffers

    output = torch.stack(out_steps, dim=1)
    return output, rec_spikes, rec_arrivals


def forward(net: Network, frames, mode: str = "eval") -> RunTrace:
    """Simulate one sample and return its instrumented trace.

    ``frames`` is a FrameSequence or a [T, C, H, W] count array.
    """
    from .instrument import count_sops  # cycle-free late import

    dt_us = getattr(frames, "dt_us", 1000)
    array = frames.frames if hasattr(frames, "frames") else np.asarray(frames)
    if array.ndim != 4:
        raise ShapeError(f"expected [T, C, H, W] input, got shape {array.shape}")
    tensor = torch.tensor(array, dtype=torch.float32).unsqueeze(0)
    with torch.no_grad():
        _, spikes, arrivals = simulate(net, tensor, mode=mode, record=True)
    layer_spikes = [s[0] for s in spikes]
    layer_arrivals = [a[0] for a in arrivals]
    layer_arrivals[0] = np.ascontiguousarray(array)  # keep integer input counts
    trace = RunTrace(dt_us=dt_us, layer_spikes=layer_spikes, layer_arrivals=layer_arrivals)
    trace.sop_counts = count_sops(trace, net)
    return trace
