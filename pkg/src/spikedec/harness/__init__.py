from .config import ExperimentConfig
from .report import MetricsReport, ModelMetrics, SampleRecord
from .runners import (
    DeltaRow,
    capacity_table,
    evaluate_model,
    prepare_data,
    run_experiment,
    sweep_delta,
    train_one,
)
from .synth import SynthConfig, make_dataset, make_sample, to_frames

__all__ = [
    "DeltaRow",
    "ExperimentConfig",
    "MetricsReport",
    "ModelMetrics",
    "SampleRecord",
    "SynthConfig",
    "capacity_table",
    "evaluate_model",
    "make_dataset",
    "make_sample",
    "prepare_data",
    "run_experiment",
    "sweep_delta",
    "to_frames",
    "train_one",
]
