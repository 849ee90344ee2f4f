from .losses import (
    LatencyTarget,
    RateTarget,
    first_spike_times,
    hdc_loss,
    latency_loss,
    rate_loss,
)
from .bptt import (
    LOSS_KINDS,
    EpochStats,
    TrainConfig,
    bptt_train,
    evaluate_accuracy,
    predict,
    sample_loss,
    soft_gradient_check,
)
from .splits import kfold_split

__all__ = [
    "LOSS_KINDS",
    "EpochStats",
    "LatencyTarget",
    "RateTarget",
    "TrainConfig",
    "bptt_train",
    "evaluate_accuracy",
    "first_spike_times",
    "hdc_loss",
    "kfold_split",
    "latency_loss",
    "predict",
    "rate_loss",
    "sample_loss",
    "soft_gradient_check",
]
