"""Command-line interface for experiments, sweeps, and data generation."""

from __future__ import annotations

import csv
from pathlib import Path

import click
import numpy as np

from ..errors import SpikedecError
from ..events import write_events
from ..hdc import ClassCodebook
from ..snn.network import save_checkpoint
from ..train.bptt import soft_gradient_check
from .config import ExperimentConfig
from .report import fmt
from .runners import (
    capacity_table,
    capacity_table_csv,
    delta_rows_csv,
    prepare_data,
    run_experiment,
    sweep_delta,
    train_one,
    evaluate_model,
)
from .synth import SynthConfig, make_dataset


def _load_config(config_path, **overrides) -> ExperimentConfig:
    cfg = ExperimentConfig.load(config_path) if config_path else ExperimentConfig()
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


@click.group()
def main():
    """Spiking-network decoding toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None, help="Override: single training seed.")
@click.option("--decoder", type=click.Choice(["rate", "latency", "hdc"]), default=None)
@click.option("--beta", type=float, default=None)
@click.option("--dims", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def train(config_path, seed, decoder, beta, dims, out_dir):
    """Train one model and write checkpoint, codebook, and history CSV."""
    cfg = _load_config(config_path, beta=beta, dims=dims)
    decoder = decoder or cfg.decoders[0]
    seed = cfg.seeds[0] if seed is None else seed
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = prepare_data(cfg)
    net, codebook, history = train_one(cfg, decoder, seed, data)
    save_checkpoint(net, out / f"{decoder}_seed{seed}.ckpt")
    if codebook is not None:
        codebook.save(out / f"{decoder}_seed{seed}.codebook")
    with open(out / f"history_{decoder}_seed{seed}.csv", "w") as f:
        f.write("epoch,train_loss,train_accuracy,test_accuracy,wall_time_s\n")
        for row in history:
            f.write(
                f"{row.epoch},{fmt(row.train_loss)},{fmt(row.train_accuracy)},"
                f"{fmt(row.test_accuracy)},{fmt(row.wall_time_s)}\n"
            )
    click.echo(f"trained {decoder} (seed {seed}); final loss {history[-1].train_loss:.6g}")


@main.command("eval")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--codebook", "codebook_path", type=click.Path(exists=True), default=None)
@click.option("--decoder", type=click.Choice(["rate", "latency", "hdc"]), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--delta", type=float, default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def eval_cmd(config_path, checkpoint, codebook_path, decoder, seed, delta, out_dir):
    """Evaluate a trained checkpoint on the test split."""
    from ..snn.network import load_checkpoint
    from .report import MetricsReport, ModelMetrics

    cfg = _load_config(config_path, delta=delta)
    seed = cfg.seeds[0] if seed is None else seed
    from .runners import build_network

    net = build_network(cfg, decoder, seed)
    load_checkpoint(net, checkpoint)
    codebook = ClassCodebook.load(codebook_path) if codebook_path else None
    if decoder == "hdc" and codebook is None:
        raise click.UsageError("hdc evaluation needs --codebook")
    data = prepare_data(cfg)
    test_pairs = data.test
    if cfg.known_classes:
        remap = {c: i for i, c in enumerate(sorted(cfg.known_classes))}
        test_pairs = [(f, remap[l]) for f, l in test_pairs if l in remap]
    acc, records, layer_sops = evaluate_model(cfg, decoder, seed, net, codebook, test_pairs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    latencies = [r.latency_ms for r in records if r.latency_ms is not None]
    report = MetricsReport(
        rows=[
            ModelMetrics(
                decoder=decoder,
                accuracy_by_seed=[acc],
                spikes_mean=float(np.mean([r.spikes for r in records])),
                sops_mean=float(np.mean([r.sops for r in records])),
                layer_sops_mean=list(layer_sops),
                latency_mean_ms=float(np.mean(latencies)) if latencies else None,
                latency_sd_ms=float(np.std(latencies)) if latencies else None,
                latency_none_count=len(records) - len(latencies),
            )
        ],
        samples=records,
    )
    report.write(out, [seed])
    click.echo(f"accuracy {acc:.4f} over {len(records)} samples -> {out}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def report(config_path, out_dir):
    """Full experiment: train and evaluate every configured (decoder, seed)."""
    cfg = _load_config(config_path)
    result = run_experiment(cfg, out_dir)
    click.echo(result.text_table())


@main.command("sweep-delta")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--delta", "deltas", type=float, multiple=True,
              help="Thresholds to sweep; defaults to 0.1..0.4 in steps of 0.05.")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def sweep_delta_cmd(config_path, deltas, seed, out_dir):
    """Unknown-class detection sweep for a subset-trained HDC model."""
    cfg = _load_config(config_path)
    deltas = list(deltas) or [round(0.1 + 0.05 * i, 2) for i in range(7)]
    rows = sweep_delta(cfg, deltas, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "delta_sweep.csv").write_text(delta_rows_csv(rows))
    for r in rows:
        click.echo(
            f"delta={r.delta:g}  full={100 * r.full_accuracy:.2f}%  "
            f"known={100 * r.known_accuracy:.2f}%  unknown={100 * r.unknown_accuracy:.2f}%"
        )


@main.command()
@click.option("--dims", "dims", type=int, multiple=True,
              help="Dimensions to tabulate; default 500..5000 step 500.")
@click.option("--out", "out_dir", type=click.Path(), default=None)
def capacity(dims, out_dir):
    """Pseudo-orthogonal capacity table and the crossover dimension."""
    values = list(dims) or list(range(500, 5001, 500))
    rows, crossover = capacity_table(values)
    text = capacity_table_csv(rows, crossover)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "capacity.csv").write_text(text)
    click.echo(text.rstrip("\n"))
    click.echo(f"crossover dimension ~= {crossover}")


@main.command("synth-data")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--train-per-class", type=int, default=40)
@click.option("--test-per-class", type=int, default=20)
@click.option("--seed", type=int, default=1234)
@click.option("--sensor", type=int, default=16)
@click.option("--duration-ms", type=int, default=100)
def synth_data(out_dir, train_per_class, test_per_class, seed, sensor, duration_ms):
    """Write the synthetic dataset as EVS1 files plus a manifest."""
    out = Path(out_dir)
    (out / "train").mkdir(parents=True, exist_ok=True)
    (out / "test").mkdir(parents=True, exist_ok=True)
    synth_cfg = SynthConfig(sensor_size=sensor, duration_ms=duration_ms)
    rows = []
    for split, per_class, split_seed in (
        ("train", train_per_class, seed),
        ("test", test_per_class, seed + 1),
    ):
        streams = make_dataset(per_class, split_seed, synth_cfg)
        for i, stream in enumerate(streams):
            rel = f"{split}/sample_{i:04d}_class{stream.label}.evs"
            write_events(stream, out / rel)
            rows.append({"file": rel, "label": stream.label, "split": split, "signer": ""})
    with open(out / "manifest.csv", "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["file", "label", "split", "signer"])
        writer.writeheader()
        writer.writerows(rows)
    click.echo(f"wrote {len(rows)} EVS1 samples to {out}")


@main.command()
@click.option("--seeds", type=int, default=3, help="Number of random toy nets per loss.")
@click.option("--timesteps", type=int, default=12)
def gradcheck(seeds, timesteps):
    """Compare BPTT gradients against central finite differences on toy nets."""
    from .toys import toy_net_and_sample

    worst_overall = 0.0
    for loss_kind in ("rate", "latency", "hdc"):
        for seed in range(seeds):
            net, sample, codebook = toy_net_and_sample(loss_kind, seed, timesteps)
            err = soft_gradient_check(net, loss_kind, sample, codebook)
            worst_overall = max(worst_overall, err)
            click.echo(f"{loss_kind:8s} seed {seed}: max relative error {err:.3e}")
    click.echo(f"worst overall: {worst_overall:.3e}")
    if worst_overall > 1e-4:
        raise SystemExit(1)


def run():
    try:
        main()
    except SpikedecError as e:  # uniform, non-traceback CLI errors
        raise SystemExit(f"error: {e}")


if __name__ == "__main__":
    run()
