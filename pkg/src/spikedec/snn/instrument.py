"""Activity accounting: synaptic operations, energy estimates, firing rates.

A synaptic operation (SOP) is one spike traversing one nonzero synapse; SOPs
are attributed to the layer that receives them.  Input-frame events count as
source spikes into the first layer, weighted by their integer counts.  Pooling
and the LIF leak/reset are free: no synapse, no SOP.
"""

from __future__ import annotations

import numpy as np
import torch

from ..errors import ShapeError
from .network import Network
from .simulate import RunTrace

JOULES_PER_SOP = 26e-12  # TrueNorth-style per-operation budget


def fanout_map(net: Network, i: int) -> np.ndarray:
    """Per-source-unit count of nonzero synapses into connective block i.

    Conv fan-out is exact per source position, including the smaller fan-out of
    border pixels under valid padding.
    """
    block = net.blocks[i]
    w = net.weights[i].detach()
    nonzero = (w != 0).to(torch.float64)
    if block.spec.kind == "conv":
        out_c, _, kh, kw = w.shape
        _, oh, ow = block.lif_shape
        ones = torch.ones((1, out_c, oh, ow), dtype=torch.float64)
        pad = 0 if net.padding == "valid" else block.spec.kernel // 2
        fan = torch.nn.functional.conv_transpose2d(ones, nonzero, padding=pad)
        return fan[0].numpy()
    return nonzero.sum(dim=0).numpy().reshape(block.in_shape)


def count_sops(trace: RunTrace, net: Network) -> list[int]:
    """Per-layer SOP totals for a recorded trace."""
    if len(trace.layer_arrivals) != len(net.blocks):
        raise ShapeError(
            f"trace has {len(trace.layer_arrivals)} layers, network has {len(net.blocks)}"
        )
    counts = []
    for i, arrivals in enumerate(trace.layer_arrivals):
        fan = fanout_map(net, i)
        totals = arrivals.reshape(arrivals.shape[0], -1).sum(axis=0, dtype=np.float64)
        counts.append(int(round(float(totals @ fan.reshape(-1)))))
    return counts


def estimate_energy(sop_counts) -> tuple[list[float], float]:
    """Joules per layer and total: SOPs x 26 pJ, exactly."""
    per_layer = [c * JOULES_PER_SOP for c in sop_counts]
    return per_layer, float(sum(per_layer))


def firing_rate(trace: RunTrace, net: Network, duration_s: float) -> tuple[list[float], float]:
    """Hz per layer and overall: spikes / (counted neurons x duration)."""
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    neurons = net.per_layer_neurons()
    per_layer = [s / (n * duration_s) for s, n in zip(trace.spike_totals, neurons)]
    overall = trace.total_spikes / (net.count_neurons() * duration_s)
    return per_layer, overall
