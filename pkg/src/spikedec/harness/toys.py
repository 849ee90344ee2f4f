"""Tiny randomized nets and samples for gradient auditing."""

from __future__ import annotations

import numpy as np

from ..hdc import ClassCodebook
from ..snn.network import Network, parse_architecture

TOY_SENSOR = 6
TOY_CLASSES = 4
TOY_DIMS = 8


def toy_net_and_sample(loss_kind: str, seed: int, timesteps: int = 12):
    """A <500-parameter conv+dense net, one random sample, and a codebook."""
    width = TOY_DIMS if loss_kind == "hdc" else TOY_CLASSES
    arch = parse_architecture(f"2c3-2p-{width}")
    net = Network(arch, (2, TOY_SENSOR, TOY_SENSOR), beta=0.8, padding="valid", seed=seed)
    rng = np.random.default_rng(seed + 100)
    frames = rng.poisson(0.5, size=(timesteps, 2, TOY_SENSOR, TOY_SENSOR)).astype(np.int32)
    label = int(rng.integers(0, TOY_CLASSES if loss_kind != "hdc" else TOY_DIMS // 2))
    codebook = ClassCodebook.generate(TOY_DIMS // 2, TOY_DIMS, seed + 200) if loss_kind == "hdc" else None
    return net, (frames, label), codebook
