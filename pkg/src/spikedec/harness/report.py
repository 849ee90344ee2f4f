"""Metric aggregation and byte-deterministic report emission."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..snn.instrument import JOULES_PER_SOP


def fmt(value, digits: int = 6) -> str:
    """Stable scalar formatting for CSV/report output."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}g}"


@dataclass
class SampleRecord:
    sample_id: int
    seed: int
    decoder: str
    true_class: int
    predicted_class: int | None
    latency_ms: float | None
    min_distance: float | None
    spikes: int
    sops: int


@dataclass
class ModelMetrics:
    """Aggregate metrics of one decoder across seeds."""

    decoder: str
    accuracy_by_seed: list[float]
    spikes_mean: float
    sops_mean: float
    layer_sops_mean: list[float]
    latency_mean_ms: float | None
    latency_sd_ms: float | None
    latency_none_count: int

    @property
    def accuracy_mean(self) -> float:
        return sum(self.accuracy_by_seed) / len(self.accuracy_by_seed)

    @property
    def accuracy_sd(self) -> float:
        mu = self.accuracy_mean
        return math.sqrt(sum((a - mu) ** 2 for a in self.accuracy_by_seed) / len(self.accuracy_by_seed))

    @property
    def accuracy_range(self) -> float:
        """Max deviation from the mean across seeds."""
        mu = self.accuracy_mean
        return max(abs(a - mu) for a in self.accuracy_by_seed)

    @property
    def energy_mean_j(self) -> float:
        return self.sops_mean * JOULES_PER_SOP

    @property
    def layer_energy_mean_j(self) -> list[float]:
        return [s * JOULES_PER_SOP for s in self.layer_sops_mean]


@dataclass
class MetricsReport:
    rows: list[ModelMetrics]
    samples: list[SampleRecord] = field(default_factory=list)

    def row(self, decoder: str) -> ModelMetrics:
        for r in self.rows:
            if r.decoder == decoder:
                return r
        raise KeyError(decoder)

    def relative_to_hdc(self, row: ModelMetrics) -> dict[str, float | None]:
        """Relative columns normalized to the HDC row (empty if no HDC row)."""
        try:
            base = self.row("hdc")
        except KeyError:
            return {"rel_spikes": None, "rel_energy": None, "rel_latency": None}
        rel_latency = None
        if row.latency_mean_ms is not None and base.latency_mean_ms:
            rel_latency = row.latency_mean_ms / base.latency_mean_ms
        return {
            "rel_spikes": row.spikes_mean / base.spikes_mean if base.spikes_mean else None,
            "rel_energy": row.energy_mean_j / base.energy_mean_j if base.energy_mean_j else None,
            "rel_latency": rel_latency,
        }

    def audit(self) -> None:
        """Relative and energy columns must recompute exactly from absolutes."""
        for row in self.rows:
            assert row.energy_mean_j == row.sops_mean * JOULES_PER_SOP
            rel = self.relative_to_hdc(row)
            if rel["rel_spikes"] is not None:
                base = self.row("hdc")
                assert rel["rel_spikes"] == row.spikes_mean / base.spikes_mean
                assert rel["rel_energy"] == row.energy_mean_j / base.energy_mean_j

    # -- emission ---------------------------------------------------------------

    def metrics_csv(self) -> str:
        n_layers = max((len(r.layer_sops_mean) for r in self.rows), default=0)
        header = [
            "decoder", "accuracy_mean", "accuracy_sd", "accuracy_range",
            "spikes_mean", "sops_mean", "energy_j",
            "latency_mean_ms", "latency_sd_ms", "latency_undecided",
            "rel_spikes", "rel_energy", "rel_latency",
        ]
        header += [f"sops_layer_{i + 1}" for i in range(n_layers)]
        header += [f"energy_j_layer_{i + 1}" for i in range(n_layers)]
        lines = [",".join(header)]
        for r in self.rows:
            rel = self.relative_to_hdc(r)
            cells = [
                r.decoder, fmt(r.accuracy_mean), fmt(r.accuracy_sd), fmt(r.accuracy_range),
                fmt(r.spikes_mean), fmt(r.sops_mean), fmt(r.energy_mean_j, 9),
                fmt(r.latency_mean_ms), fmt(r.latency_sd_ms), str(r.latency_none_count),
                fmt(rel["rel_spikes"]), fmt(rel["rel_energy"]), fmt(rel["rel_latency"]),
            ]
            cells += [fmt(s) for s in r.layer_sops_mean] + [""] * (n_layers - len(r.layer_sops_mean))
            cells += [fmt(e, 9) for e in r.layer_energy_mean_j] + [""] * (n_layers - len(r.layer_sops_mean))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def per_sample_csv(self) -> str:
        lines = ["sample_id,seed,decoder,true_class,predicted_class,latency_ms,min_distance,spikes,sops"]
        for s in self.samples:
            predicted = "unknown" if s.predicted_class is None else str(s.predicted_class)
            lines.append(
                ",".join(
                    [
                        str(s.sample_id), str(s.seed), s.decoder, str(s.true_class), predicted,
                        fmt(s.latency_ms), fmt(s.min_distance), str(s.spikes), str(s.sops),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def text_table(self) -> str:
        cols = ["decoder", "accuracy", "spikes", "energy (mJ)", "latency (ms)", "rel spikes", "rel energy", "rel latency"]
        lines = ["  ".join(f"{c:>14}" for c in cols)]
        for r in self.rows:
            rel = self.relative_to_hdc(r)
            acc = f"{100 * r.accuracy_mean:.2f}% +-{100 * r.accuracy_range:.2f}"
            lat = "-" if r.latency_mean_ms is None else f"{r.latency_mean_ms:.1f}+-{r.latency_sd_ms:.1f}"
            row = [
                r.decoder, acc, f"{r.spikes_mean:.3g}", f"{r.energy_mean_j * 1e3:.4g}", lat,
                *(("-" if rel[k] is None else f"{rel[k]:.2f}x") for k in ("rel_spikes", "rel_energy", "rel_latency")),
            ]
            lines.append("  ".join(f"{c:>14}" for c in row))
        return "\n".join(lines) + "\n"

    def series_csv(self, kind: str) -> str:
        """Plot-ready long-format series: one (decoder, layer, value) row per line."""
        pick = {"sops": lambda r: r.layer_sops_mean, "energy": lambda r: r.layer_energy_mean_j}[kind]
        lines = [f"decoder,layer,{kind}"]
        for r in self.rows:
            for i, v in enumerate(pick(r)):
                lines.append(f"{r.decoder},{i + 1},{fmt(v, 9)}")
        return "\n".join(lines) + "\n"

    def accuracy_by_seed_csv(self, seeds: list[int]) -> str:
        lines = ["decoder,seed,accuracy"]
        for r in self.rows:
            for seed, acc in zip(seeds, r.accuracy_by_seed):
                lines.append(f"{r.decoder},{seed},{fmt(acc)}")
        return "\n".join(lines) + "\n"

    def write(self, out_dir, seeds: list[int]) -> None:
        from pathlib import Path

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.audit()
        (out / "metrics.csv").write_text(self.metrics_csv())
        (out / "per_sample.csv").write_text(self.per_sample_csv())
        (out / "report.txt").write_text(self.text_table())
        (out / "series_layer_sops.csv").write_text(self.series_csv("sops"))
        (out / "series_layer_energy.csv").write_text(self.series_csv("energy"))
        (out / "series_accuracy_by_seed.csv").write_text(self.accuracy_by_seed_csv(seeds))
