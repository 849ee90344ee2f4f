"""Network architecture: layer grammar, shape inference, counting, checkpoints.

Architectures use the compact bracket grammar, e.g.

    16c5-bn-2p-0.2d-32c5-bn-2p-0.2d-1024

where ``<n>c<k>`` is a conv layer with n output channels and a k x k kernel,
``bn`` batch normalization, ``<w>p`` a w x w maxpool, ``<r>d`` dropout with
rate r, and a bare integer (or ``<n>fc``) a fully connected layer of n LIF
neurons.  Padding mode (valid/same) is a global flag.  Every conv and dense
stage drives its own LIF population.
"""

from __future__ import annotations

import hashlib
import math
import re
import struct
from dataclasses import dataclass, field

import numpy as np
import torch

from ..errors import ConfigError, FormatError, ValidationError

CHECKPOINT_MAGIC = b"SNNC"
CHECKPOINT_VERSION = 1

LIF_THRESHOLD = 1.0
LIF_RESET = 0.0


@dataclass(frozen=True)
class LIFParams:
    """Leaky integrate-and-fire constants; threshold and reset are fixed."""

    beta: float
    threshold: float = LIF_THRESHOLD
    reset_value: float = LIF_RESET

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValidationError(f"beta must be in [0, 1], got {self.beta}")
        if self.threshold != LIF_THRESHOLD or self.reset_value != LIF_RESET:
            raise ValidationError("threshold is fixed at 1 and reset at 0")


@dataclass(frozen=True)
class LayerSpec:
    kind: str  # conv | maxpool | batchnorm | dropout | dense
    out_channels: int = 0
    kernel: int = 0
    stride: int = 1
    window: int = 0
    rate: float = 0.0
    units: int = 0
    lif: bool = False  # conv and dense stages own LIF populations


_CONV_RE = re.compile(r"^(\d+)c(\d+)$")
_POOL_RE = re.compile(r"^(\d+)p$")
_DROP_RE = re.compile(r"^(0?\.\d+|\d+\.\d*)d$")
_DENSE_RE = re.compile(r"^(\d+)(?:fc)?$")


def parse_architecture(text: str) -> list[LayerSpec]:
    """Parse the dash-separated grammar into an ordered LayerSpec list."""
    layers: list[LayerSpec] = []
    for token in text.strip().split("-"):
        token = token.strip()
        if not token:
            raise ConfigError(f"empty token in architecture {text!r}")
        if token == "bn":
            layers.append(LayerSpec(kind="batchnorm"))
            continue
        m = _CONV_RE.match(token)
        if m:
            layers.append(LayerSpec(kind="conv", out_channels=int(m.group(1)), kernel=int(m.group(2)), lif=True))
            continue
        m = _POOL_RE.match(token)
        if m:
            layers.append(LayerSpec(kind="maxpool", window=int(m.group(1))))
            continue
        m = _DROP_RE.match(token)
        if m:
            layers.append(LayerSpec(kind="dropout", rate=float(m.group(1))))
            continue
        m = _DENSE_RE.match(token)
        if m:
            layers.append(LayerSpec(kind="dense", units=int(m.group(1)), lif=True))
            continue
        raise ConfigError(f"cannot parse architecture token {token!r}")
    if not any(s.kind in ("conv", "dense") for s in layers):
        raise ConfigError(f"architecture {text!r} has no connective layers")
    _group_blocks(layers)  # reject transforms that precede or mismatch their stage
    return layers


def format_architecture(layers: list[LayerSpec]) -> str:
    parts = []
    for s in layers:
        if s.kind == "conv":
            parts.append(f"{s.out_channels}c{s.kernel}")
        elif s.kind == "batchnorm":
            parts.append("bn")
        elif s.kind == "maxpool":
            parts.append(f"{s.window}p")
        elif s.kind == "dropout":
            parts.append(f"{s.rate:g}d")
        elif s.kind == "dense":
            parts.append(f"{s.units}fc")
    return "-".join(parts)


@dataclass
class Block:
    """One LIF population: a connective stage plus its attached transforms."""

    spec: LayerSpec
    batchnorm: bool = False
    pool: LayerSpec | None = None
    dropout: LayerSpec | None = None
    in_shape: tuple[int, ...] = ()
    lif_shape: tuple[int, ...] = ()  # resolution of the membrane state
    out_shape: tuple[int, ...] = ()  # after pooling, what the next block sees

    @property
    def lif_size(self) -> int:
        return int(np.prod(self.lif_shape))

    @property
    def counted_neurons(self) -> int:
        # convention: conv populations are counted at post-pool resolution
        return int(np.prod(self.out_shape)) if self.spec.kind == "conv" else self.spec.units


def _group_blocks(layers: list[LayerSpec]) -> list[Block]:
    blocks: list[Block] = []
    for s in layers:
        if s.kind in ("conv", "dense"):
            blocks.append(Block(spec=s))
        elif not blocks:
            raise ConfigError(f"{s.kind} cannot precede the first conv/dense stage")
        elif s.kind == "batchnorm":
            if blocks[-1].spec.kind != "conv":
                raise ConfigError("batchnorm only attaches to conv stages")
            blocks[-1].batchnorm = True
        elif s.kind == "maxpool":
            if blocks[-1].spec.kind != "conv":
                raise ConfigError("maxpool only attaches to conv stages")
            blocks[-1].pool = s
        elif s.kind == "dropout":
            blocks[-1].dropout = s
    return blocks


def _conv_out(size: int, kernel: int, padding: str) -> int:
    if padding == "valid":
        out = size - kernel + 1
        if out <= 0:
            raise ConfigError(f"kernel {kernel} does not fit input extent {size} (valid padding)")
        return out
    if padding == "same":
        return size
    raise ConfigError(f"unknown padding mode {padding!r}")


class Network(torch.nn.Module):
    """Ordered conv/dense LIF blocks with shared decay beta.

    Weights are immutable during forward; training owns them exclusively.
    """

    def __init__(
        self,
        layers: list[LayerSpec],
        input_shape: tuple[int, int, int],
        beta: float,
        padding: str = "valid",
        seed: int = 0,
        dtype: torch.dtype = torch.float32,
    ):
        super().__init__()
        self.layer_specs = list(layers)
        self.input_shape = tuple(input_shape)
        self.lif = LIFParams(beta=beta)
        self.padding = padding
        self.seed = seed
        self.blocks = _group_blocks(self.layer_specs)
        self._infer_shapes()
        self._build_params(dtype)

    # -- construction ---------------------------------------------------------

    def _infer_shapes(self) -> None:
        shape = self.input_shape
        for block in self.blocks:
            block.in_shape = shape
            s = block.spec
            if s.kind == "conv":
                if len(shape) != 3:
                    raise ConfigError("conv stage needs a [C, H, W] input")
                c, h, w = shape
                oh, ow = _conv_out(h, s.kernel, self.padding), _conv_out(w, s.kernel, self.padding)
                block.lif_shape = (s.out_channels, oh, ow)
                if block.pool is not None:
                    win = block.pool.window
                    if oh % win or ow % win:
                        raise ConfigError(f"pool window {win} does not tile {oh}x{ow}")
                    block.out_shape = (s.out_channels, oh // win, ow // win)
                else:
                    block.out_shape = block.lif_shape
            else:  # dense
                block.lif_shape = (s.units,)
                block.out_shape = (s.units,)
            shape = block.out_shape

    def _build_params(self, dtype: torch.dtype) -> None:
        gen = torch.Generator().manual_seed(self.seed)
        self.weights = torch.nn.ParameterList()
        self.biases = torch.nn.ParameterList()
        self.bn_gamma = torch.nn.ParameterList()
        self.bn_beta = torch.nn.ParameterList()
        bn_mean, bn_var = [], []
        for i, block in enumerate(self.blocks):
            s = block.spec
            if s.kind == "conv":
                c_in = block.in_shape[0]
                w = torch.empty(s.out_channels, c_in, s.kernel, s.kernel, dtype=dtype)
                fan_in = c_in * s.kernel * s.kernel
                b = torch.zeros(s.out_channels, dtype=dtype)
            else:
                fan_in = int(np.prod(block.in_shape))
                w = torch.empty(s.units, fan_in, dtype=dtype)
                b = torch.zeros(s.units, dtype=dtype)
            bound = 1.0 / math.sqrt(fan_in)  # Kaiming-style uniform fan-in scaling
            w.uniform_(-bound, bound, generator=gen)
            self.weights.append(torch.nn.Parameter(w))
            self.biases.append(torch.nn.Parameter(b))
            if block.batchnorm:
                ch = block.lif_shape[0]
                self.bn_gamma.append(torch.nn.Parameter(torch.ones(ch, dtype=dtype)))
                self.bn_beta.append(torch.nn.Parameter(torch.zeros(ch, dtype=dtype)))
                bn_mean.append(torch.zeros(ch, dtype=dtype))
                bn_var.append(torch.ones(ch, dtype=dtype))
            else:
                self.bn_gamma.append(torch.nn.Parameter(torch.empty(0, dtype=dtype)))
                self.bn_beta.append(torch.nn.Parameter(torch.empty(0, dtype=dtype)))
                bn_mean.append(torch.empty(0, dtype=dtype))
                bn_var.append(torch.empty(0, dtype=dtype))
            self.register_buffer(f"bn_mean_{i}", bn_mean[i])
            self.register_buffer(f"bn_var_{i}", bn_var[i])

    def bn_running(self, i: int) -> tuple[torch.Tensor, torch.Tensor]:
        return getattr(self, f"bn_mean_{i}"), getattr(self, f"bn_var_{i}")

    @property
    def beta(self) -> float:
        return self.lif.beta

    @property
    def out_units(self) -> int:
        return int(np.prod(self.blocks[-1].out_shape))

    def arch_string(self) -> str:
        return format_architecture(self.layer_specs)

    def arch_hash(self) -> bytes:
        canon = f"{self.arch_string()}|in={self.input_shape}|pad={self.padding}"
        return hashlib.sha256(canon.encode()).digest()[:8]

    # -- bookkeeping ------------------------------------------------------------

    def count_neurons(self) -> int:
        """LIF population total; conv populations counted at post-pool resolution."""
        return sum(b.counted_neurons for b in self.blocks)

    def per_layer_neurons(self) -> list[int]:
        return [b.counted_neurons for b in self.blocks]

    def count_parameters(self) -> int:
        """Weight + bias elements of connective layers (batchnorm excluded)."""
        return sum(w.numel() + b.numel() for w, b in zip(self.weights, self.biases))


# module-level wrappers mirroring the operation names


def count_neurons(net: Network) -> int:
    return net.count_neurons()


def count_parameters(net: Network) -> int:
    return net.count_parameters()


# -- checkpoint format --------------------------------------------------------
#
# magic "SNNC" | u32 version | 8-byte arch hash | f32 beta | u64 seed |
# u32 tensor count | tensors in parameter-then-buffer order as raw f32 LE.


def _state_tensors(net: Network) -> list[torch.Tensor]:
    tensors: list[torch.Tensor] = []
    for i in range(len(net.blocks)):
        tensors += [net.weights[i], net.biases[i], net.bn_gamma[i], net.bn_beta[i]]
        mean, var = net.bn_running(i)
        tensors += [mean, var]
    return tensors


def save_checkpoint(net: Network, path) -> None:
    tensors = _state_tensors(net)
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<I", CHECKPOINT_VERSION))
        f.write(net.arch_hash())
        f.write(struct.pack("<f", net.beta))
        f.write(struct.pack("<Q", net.seed))
        f.write(struct.pack("<I", len(tensors)))
        for t in tensors:
            f.write(t.detach().to(torch.float32).numpy().astype("<f4").tobytes())


def load_checkpoint(net: Network, path) -> Network:
    """Load weights saved for exactly this architecture (hash-checked)."""
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"{path}: not a checkpoint file")
    version = struct.unpack_from("<I", raw, 4)[0]
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    if raw[8:16] != net.arch_hash():
        raise FormatError(f"{path}: checkpoint was saved for a different architecture")
    beta = struct.unpack_from("<f", raw, 16)[0]
    if abs(beta - net.beta) > 1e-6:
        raise FormatError(f"{path}: checkpoint beta {beta} != network beta {net.beta}")
    tensors = _state_tensors(net)
    declared = struct.unpack_from("<I", raw, 28)[0]
    offset = 32  # end of header
    if declared != len(tensors):
        raise FormatError(f"{path}: expected {len(tensors)} tensors, header says {declared}")
    with torch.no_grad():
        for t in tensors:
            n = t.numel()
            vals = np.frombuffer(raw, "<f4", n, offset)
            t.copy_(torch.from_numpy(vals.copy()).reshape(t.shape).to(t.dtype))
            offset += 4 * n
    if offset != len(raw):
        raise FormatError(f"{path}: {len(raw) - offset} trailing bytes")
    return net
