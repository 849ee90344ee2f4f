"""Experiment orchestration: train/evaluate models, delta sweeps, capacity tables."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .. import decoders as dec
from ..errors import ConfigError
from ..events import FrameSequence, bin_to_frames, downsample, load_events
from ..hdc import ClassCodebook, capacity, crossover_dimension, orthogonality_probability
from ..snn.instrument import count_sops, estimate_energy
from ..snn.network import Network, parse_architecture
from ..snn.simulate import forward
from ..train.bptt import bptt_train
from .config import ExperimentConfig
from .report import MetricsReport, ModelMetrics, SampleRecord
from .synth import SynthConfig, make_dataset, to_frames


@dataclass
class PreparedData:
    train: list[tuple[FrameSequence, int]]
    test: list[tuple[FrameSequence, int]]


def prepare_data(cfg: ExperimentConfig) -> PreparedData:
    """Materialize (frames, label) pairs for the configured dataset."""
    if cfg.dataset == "synthetic":
        synth = SynthConfig(sensor_size=cfg.sensor_size, duration_ms=cfg.clip_us // cfg.dt_us)
        train_streams = make_dataset(cfg.train_per_class, cfg.dataset_seed, synth)
        test_streams = make_dataset(cfg.test_per_class, cfg.dataset_seed + 1, synth)
        return PreparedData(train=to_frames(train_streams, synth), test=to_frames(test_streams, synth))
    return _load_dataset_dir(cfg)


def _load_dataset_dir(cfg: ExperimentConfig) -> PreparedData:
    """Read a converter-produced directory: manifest.csv plus EVS1 files."""
    root = Path(cfg.dataset)
    manifest = root / "manifest.csv"
    if not manifest.exists():
        raise ConfigError(f"{root}: no manifest.csv; not a converted dataset directory")
    split: dict[str, list[tuple[FrameSequence, int]]] = {"train": [], "test": []}
    with open(manifest, newline="") as f:
        for row in csv.DictReader(f):
            if not row.get("file") or row.get("status", "ok") != "ok":
                continue  # converter-annotated skip rows carry no file
            stream = load_events(root / row["file"])
            frames = bin_to_frames(stream, cfg.dt_us, cfg.clip_us)
            if cfg.downsample_to:
                frames = downsample(frames, (cfg.downsample_to, cfg.downsample_to))
            label = int(row["label"])
            split.setdefault(row["split"], []).append((frames, label))
    if not split["train"] or not split["test"]:
        raise ConfigError(f"{root}: manifest has no train/test rows")
    return PreparedData(train=split["train"], test=split["test"])


def _filter_classes(pairs, classes) -> list[tuple[FrameSequence, int]]:
    keep = set(classes)
    return [(f, label) for f, label in pairs if label in keep]


def build_network(cfg: ExperimentConfig, decoder: str, seed: int) -> Network:
    sensor = cfg.downsample_to or cfg.sensor_size
    n_out_classes = len(cfg.known_classes) if cfg.known_classes else cfg.n_classes
    width = cfg.dims if decoder == "hdc" else n_out_classes
    arch = parse_architecture(f"{cfg.backbone}-{width}")
    return Network(arch, (2, sensor, sensor), beta=cfg.beta, padding=cfg.padding, seed=seed)


def train_one(cfg: ExperimentConfig, decoder: str, seed: int, data: PreparedData):
    """Train one (decoder, seed) model; returns (net, codebook, history)."""
    torch.manual_seed(seed)
    codebook = None
    train_pairs = data.train
    if cfg.known_classes:
        train_pairs = _filter_classes(train_pairs, cfg.known_classes)
        remap = {c: i for i, c in enumerate(sorted(cfg.known_classes))}
        train_pairs = [(f, remap[label]) for f, label in train_pairs]
    if decoder == "hdc":
        n = len(cfg.known_classes) if cfg.known_classes else cfg.n_classes
        codebook = ClassCodebook.generate(n, cfg.dims, cfg.codebook_seed_for(seed))
    net = build_network(cfg, decoder, seed)
    net, history = bptt_train(net, train_pairs, cfg.train_config(seed), decoder, codebook)
    return net, codebook, history


def evaluate_model(
    cfg: ExperimentConfig,
    decoder: str,
    seed: int,
    net: Network,
    codebook: ClassCodebook | None,
    test_pairs,
) -> tuple[float, list[SampleRecord], np.ndarray]:
    """Per-sample decoding of the test set; returns (accuracy, records, layer sops)."""
    dt_ms = cfg.dt_us / 1000.0
    records: list[SampleRecord] = []
    hits = 0
    layer_sops = None
    policy = dec.UnknownPolicy(cfg.delta) if cfg.delta is not None else None
    for sample_id, (frames, label) in enumerate(test_pairs):
        trace = forward(net, frames, mode="eval")
        train_out = trace.output_train
        if decoder == "rate":
            out = dec.rate_decode(train_out, dt_ms)
            min_distance = None
        elif decoder == "latency":
            out = dec.latency_decode(train_out, dt_ms)
            min_distance = None
        else:
            out = dec.hdc_decode(train_out, codebook, policy, dt_ms)
            min_distance = float(out.distances.min())
        sops = trace.sop_counts
        layer_sops = np.array(sops, dtype=np.float64) if layer_sops is None else layer_sops + sops
        records.append(
            SampleRecord(
                sample_id=sample_id,
                seed=seed,
                decoder=decoder,
                true_class=label,
                predicted_class=out.predicted_class,
                latency_ms=out.decision_latency_ms,
                min_distance=min_distance,
                spikes=trace.total_spikes,
                sops=int(sum(sops)),
            )
        )
        if out.predicted_class == label:
            hits += 1
    return hits / len(test_pairs), records, layer_sops / len(test_pairs)


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> MetricsReport:
    """Train and evaluate every (decoder, seed); aggregate into a MetricsReport."""
    data = prepare_data(cfg)
    test_pairs = data.test
    if cfg.known_classes:
        # evaluation stays on the known subset here; sweep_delta sees the rest
        remap = {c: i for i, c in enumerate(sorted(cfg.known_classes))}
        test_pairs = [(f, remap[label]) for f, label in _filter_classes(test_pairs, cfg.known_classes)]
    rows = []
    all_records: list[SampleRecord] = []
    for decoder in cfg.decoders:
        accuracy_by_seed = []
        spikes, sops_total = [], []
        layer_sops_runs = []
        latencies: list[float] = []
        undecided = 0
        for seed in cfg.seeds:
            net, codebook, _ = train_one(cfg, decoder, seed, data)
            acc, records, layer_sops = evaluate_model(cfg, decoder, seed, net, codebook, test_pairs)
            accuracy_by_seed.append(acc)
            layer_sops_runs.append(layer_sops)
            all_records.extend(records)
            for r in records:
                spikes.append(r.spikes)
                sops_total.append(r.sops)
                if r.latency_ms is None:
                    undecided += 1
                else:
                    latencies.append(r.latency_ms)
        lat_mean = sum(latencies) / len(latencies) if latencies else None
        lat_sd = (
            math.sqrt(sum((v - lat_mean) ** 2 for v in latencies) / len(latencies))
            if latencies
            else None
        )
        rows.append(
            ModelMetrics(
                decoder=decoder,
                accuracy_by_seed=accuracy_by_seed,
                spikes_mean=float(np.mean(spikes)),
                sops_mean=float(np.mean(sops_total)),
                layer_sops_mean=list(np.mean(layer_sops_runs, axis=0)),
                latency_mean_ms=lat_mean,
                latency_sd_ms=lat_sd,
                latency_none_count=undecided,
            )
        )
    report = MetricsReport(rows=rows, samples=all_records)
    report.audit()
    if out_dir is not None:
        report.write(out_dir, cfg.seeds)
    return report


@dataclass
class DeltaRow:
    delta: float
    full_accuracy: float
    known_accuracy: float
    unknown_accuracy: float


def sweep_delta(cfg: ExperimentConfig, deltas, seed: int | None = None) -> list[DeltaRow]:
    """Unknown-class detection sweep for an HDC model trained on a class subset.

    A known-class prediction is correct only if the class matches and the
    nearest codeword is closer than delta; an unknown-class sample is correct
    only if every codeword is at least delta away.
    """
    if not cfg.known_classes:
        raise ConfigError("sweep_delta needs known_classes set in the config")
    if "hdc" not in cfg.decoders:
        raise ConfigError("sweep_delta needs the hdc decoder")
    seed = cfg.seeds[0] if seed is None else seed
    data = prepare_data(cfg)
    net, codebook, _ = train_one(cfg, "hdc", seed, data)
    remap = {c: i for i, c in enumerate(sorted(cfg.known_classes))}

    # one pass to collect (min distance, nearest class, true class) per sample
    outcomes = []
    for frames, label in data.test:
        trace = forward(net, frames, mode="eval")
        hv, _ = dec.hdc_accumulate(trace.output_train)
        distances = codebook.distances(hv)
        outcomes.append((float(distances.min()), int(np.argmin(distances)), label))

    rows = []
    for delta in deltas:
        full = known = unknown = 0
        n_known = n_unknown = 0
        for min_dist, nearest, label in outcomes:
            if label in remap:
                n_known += 1
                ok = min_dist < delta and nearest == remap[label]
                known += ok
            else:
                n_unknown += 1
                ok = min_dist >= delta
                unknown += ok
            full += ok
        rows.append(
            DeltaRow(
                delta=delta,
                full_accuracy=full / len(outcomes),
                known_accuracy=known / n_known if n_known else 0.0,
                unknown_accuracy=unknown / n_unknown if n_unknown else 0.0,
            )
        )
    return rows


def delta_rows_csv(rows: list[DeltaRow]) -> str:
    from .report import fmt

    lines = ["delta,full_dataset,known_classes,unknown_class"]
    for r in rows:
        lines.append(f"{fmt(r.delta)},{fmt(r.full_accuracy)},{fmt(r.known_accuracy)},{fmt(r.unknown_accuracy)}")
    return "\n".join(lines) + "\n"


def capacity_table(d_values) -> tuple[list[tuple[int, float, int]], int]:
    """(D, P, N) rows plus the crossover dimension."""
    rows = [(int(d), orthogonality_probability(int(d)), capacity(int(d))) for d in d_values]
    return rows, crossover_dimension()


def capacity_table_csv(rows, crossover: int) -> str:
    from .report import fmt

    lines = ["dims,orthogonality_probability,capacity"]
    for d, p, n in rows:
        lines.append(f"{d},{fmt(p, 9)},{n}")
    lines.append(f"# crossover_dimension,{crossover},")
    return "\n".join(lines) + "\n"
