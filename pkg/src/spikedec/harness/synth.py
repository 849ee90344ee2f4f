"""Built-in synthetic event dataset: moving-bar and blink classes over noise.

Three spatiotemporal gesture surrogates on a small sensor, emitted as genuine
event streams so the whole pipeline (EVS1 files, binning, downsampling,
training, decoding) runs with zero external downloads:

    class 0 -- horizontal bar sweeping down the top-left quadrant (on-polarity)
    class 1 -- vertical bar sweeping across the bottom-right quadrant (on-polarity)
    class 2 -- centre block blinking, on events at onsets, off events at offsets

plus uniform Poisson background noise on both polarities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..events import EventStream, FrameSequence, US_PER_MS, bin_to_frames, make_stream

N_CLASSES = 3


@dataclass(frozen=True)
class SynthConfig:
    sensor_size: int = 16
    duration_ms: int = 100
    signal_rate: float = 0.6  # expected events per active pixel per ms
    noise_rate: float = 0.008  # expected events per pixel per polarity per ms
    blink_period_ms: int = 20
    bar_width: int = 2
    block_half: int = 3


def _active_pixels(cls: int, t_ms: int, cfg: SynthConfig) -> tuple[np.ndarray, np.ndarray, int]:
    """(ys, xs, polarity) of signal pixels active during millisecond t."""
    n = cfg.sensor_size
    half = n // 2
    span = np.arange(half)
    if cls == 0:  # horizontal bar marching down the top-left quadrant
        row = (t_ms * half) // cfg.duration_ms
        rows = np.arange(row, min(row + cfg.bar_width, half))
        ys = np.repeat(rows, half)
        xs = np.tile(span, len(rows))
        return ys, xs, 1
    if cls == 1:  # vertical bar marching across the bottom-right quadrant
        col = half + (t_ms * half) // cfg.duration_ms
        cols = np.arange(col, min(col + cfg.bar_width, n))
        ys = np.tile(half + span, len(cols))
        xs = np.repeat(cols, half)
        return ys, xs, 1
    if cls == 2:  # blinking centre block
        phase = (t_ms // cfg.blink_period_ms) % 2
        edge = t_ms % cfg.blink_period_ms < 2  # events only near transitions
        if not edge:
            return np.empty(0, dtype=int), np.empty(0, dtype=int), 1
        lo, hi = half - cfg.block_half, half + cfg.block_half
        block = np.arange(lo, hi)
        ys = np.repeat(block, hi - lo)
        xs = np.tile(block, hi - lo)
        return ys, xs, 1 if phase == 0 else 0
    raise ValueError(f"unknown class {cls}")


def make_sample(cls: int, cfg: SynthConfig, rng: np.random.Generator) -> EventStream:
    """One labeled event stream of the requested class."""
    ts, xs, ys, ps = [], [], [], []
    n = cfg.sensor_size
    for t_ms in range(cfg.duration_ms):
        sy, sx, pol = _active_pixels(cls, t_ms, cfg)
        if sy.size:
            counts = rng.poisson(cfg.signal_rate, size=sy.size)
            reps = np.repeat(np.arange(sy.size), counts)
            k = reps.size
            if k:
                ts.append(t_ms * US_PER_MS + rng.integers(0, US_PER_MS, size=k))
                xs.append(sx[reps])
                ys.append(sy[reps])
                ps.append(np.full(k, pol, dtype=np.uint8))
        for pol in (0, 1):
            k = rng.poisson(cfg.noise_rate * n * n)
            if k:
                ts.append(t_ms * US_PER_MS + rng.integers(0, US_PER_MS, size=k))
                xs.append(rng.integers(0, n, size=k))
                ys.append(rng.integers(0, n, size=k))
                ps.append(np.full(k, pol, dtype=np.uint8))
    if ts:
        t = np.concatenate(ts)
        x = np.concatenate(xs)
        y = np.concatenate(ys)
        p = np.concatenate(ps)
    else:
        t = x = y = p = np.empty(0, dtype=np.uint64)
    return make_stream(n, n, t, x, y, p, label=cls)


def make_dataset(
    n_per_class: int,
    seed: int,
    cfg: SynthConfig = SynthConfig(),
    classes: tuple[int, ...] = tuple(range(N_CLASSES)),
) -> list[EventStream]:
    """n_per_class streams of each requested class, deterministically from seed."""
    rng = np.random.default_rng(seed)
    streams = []
    for cls in classes:
        for _ in range(n_per_class):
            streams.append(make_sample(cls, cfg, rng))
    return streams


def to_frames(streams, cfg: SynthConfig = SynthConfig()) -> list[tuple[FrameSequence, int]]:
    """Bin streams at 1 ms into (frames, label) training pairs."""
    clip_us = cfg.duration_ms * US_PER_MS
    return [(bin_to_frames(s, US_PER_MS, clip_us), s.label) for s in streams]
