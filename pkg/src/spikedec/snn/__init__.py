from .network import (
    LayerSpec,
    LIFParams,
    Network,
    count_neurons,
    count_parameters,
    format_architecture,
    load_checkpoint,
    parse_architecture,
    save_checkpoint,
)
from .simulate import RunTrace, forward, lif_step, simulate, soft_spike, surrogate_spike
from .instrument import (
    JOULES_PER_SOP,
    count_sops,
    estimate_energy,
    fanout_map,
    firing_rate,
)

__all__ = [
    "LayerSpec",
    "LIFParams",
    "Network",
    "RunTrace",
    "JOULES_PER_SOP",
    "count_neurons",
    "count_parameters",
    "count_sops",
    "estimate_energy",
    "fanout_map",
    "firing_rate",
    "format_architecture",
    "forward",
    "lif_step",
    "load_checkpoint",
    "parse_architecture",
    "save_checkpoint",
    "simulate",
    "soft_spike",
    "surrogate_spike",
]
