"""Event streams, the EVS1 file format, and frame binning.

EVS1 layout (little-endian throughout):

    magic "EVS1" | u16 sensor_width | u16 sensor_height | u32 label | u64 record_count
    then record_count x { u64 t_microseconds, u16 x, u16 y, u8 polarity, u8 reserved=0 }

label 0xFFFFFFFF means unlabeled.  The format is the converter's output
contract and must stay bit-exact across implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ShapeError, ValidationError

EVS1_MAGIC = b"EVS1"
UNLABELED = 0xFFFFFFFF
HEADER_BYTES = 20
RECORD_DTYPE = np.dtype(
    [("t", "<u8"), ("x", "<u2"), ("y", "<u2"), ("polarity", "u1"), ("reserved", "u1")]
)
RECORD_BYTES = RECORD_DTYPE.itemsize  # 14

US_PER_MS = 1_000
DEFAULT_DT_US = 1_000
DEFAULT_CLIP_US = 1_500_000


@dataclass(frozen=True, eq=False)
class EventStream:
    """A t-ordered sequence of sensor events with optional class label."""

    sensor_width: int
    sensor_height: int
    events: np.ndarray  # structured RECORD_DTYPE, sorted by t
    label: int | None = None

    def __post_init__(self):
        if self.sensor_width <= 0 or self.sensor_height <= 0:
            raise ValidationError("sensor dimensions must be positive")
        self.events.setflags(write=False)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Dense [T, 2, H, W] event-count tensor; channel 0 = off, channel 1 = on."""

    frames: np.ndarray
    dt_us: int

    def __post_init__(self):
        if self.frames.ndim != 4 or self.frames.shape[1] != 2:
            raise ShapeError(f"frames must be [T, 2, H, W], got {self.frames.shape}")
        self.frames.setflags(write=False)

    @property
    def timesteps(self) -> int:
        return self.frames.shape[0]

    @property
    def spatial(self) -> tuple[int, int]:
        return self.frames.shape[2], self.frames.shape[3]


def make_stream(
    sensor_width: int,
    sensor_height: int,
    t: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    polarity: np.ndarray,
    label: int | None = None,
) -> EventStream:
    """Build a validated, t-sorted stream from parallel coordinate arrays."""
    n = len(t)
    rec = np.zeros(n, dtype=RECORD_DTYPE)
    rec["t"] = t
    rec["x"] = x
    rec["y"] = y
    rec["polarity"] = polarity
    _validate_records(rec, sensor_width, sensor_height)
    rec = rec[np.argsort(rec["t"], kind="stable")]
    return EventStream(sensor_width, sensor_height, rec, label)


def _validate_records(rec: np.ndarray, width: int, height: int) -> None:
    bad = np.nonzero((rec["x"] >= width) | (rec["y"] >= height) | (rec["polarity"] > 1))[0]
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"record {i} out of bounds: x={rec['x'][i]} y={rec['y'][i]} "
            f"polarity={rec['polarity'][i]} for {width}x{height} sensor"
        )


def load_events(path) -> EventStream:
    """Parse an EVS1 file; events come back sorted by t."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < HEADER_BYTES or raw[:4] != EVS1_MAGIC:
        raise FormatError(f"{path}: missing EVS1 magic header")
    width = int(np.frombuffer(raw, "<u2", 1, 4)[0])
    height = int(np.frombuffer(raw, "<u2", 1, 6)[0])
    label_raw = int(np.frombuffer(raw, "<u4", 1, 8)[0])
    count = int(np.frombuffer(raw, "<u8", 1, 12)[0])
    body = raw[HEADER_BYTES:]
    if len(body) != count * RECORD_BYTES:
        raise FormatError(
            f"{path}: header declares {count} records ({count * RECORD_BYTES} bytes), "
            f"body has {len(body)} bytes"
        )
    rec = np.frombuffer(body, dtype=RECORD_DTYPE).copy()
    if width <= 0 or height <= 0:
        raise ValidationError(f"{path}: sensor dimensions must be positive, got {width}x{height}")
    _validate_records(rec, width, height)
    rec = rec[np.argsort(rec["t"], kind="stable")]
    label = None if label_raw == UNLABELED else label_raw
    return EventStream(width, height, rec, label)


def write_events(stream: EventStream, path) -> None:
    """Serialize a stream to EVS1; round-trips byte-for-byte on sorted input."""
    with open(path, "wb") as f:
        f.write(EVS1_MAGIC)
        f.write(np.uint16(stream.sensor_width).tobytes())
        f.write(np.uint16(stream.sensor_height).tobytes())
        f.write(np.uint32(UNLABELED if stream.label is None else stream.label).tobytes())
        f.write(np.uint64(len(stream.events)).tobytes())
        f.write(stream.events.tobytes())


def bin_to_frames(
    stream: EventStream,
    dt_us: int = DEFAULT_DT_US,
    clip_us: int = DEFAULT_CLIP_US,
) -> FrameSequence:
    """Accumulate events into [T, 2, H, W] counts; the clip window is [0, clip)."""
    if dt_us <= 0 or clip_us <= 0:
        raise ValidationError("dt and clip must be positive")
    timesteps = math.ceil(clip_us / dt_us)
    h, w = stream.sensor_height, stream.sensor_width
    rec = stream.events
    keep = rec["t"] < clip_us
    t_idx = (rec["t"][keep] // dt_us).astype(np.int64)
    flat = ((t_idx * 2 + rec["polarity"][keep]) * h + rec["y"][keep]) * w + rec["x"][keep]
    counts = np.bincount(flat, minlength=timesteps * 2 * h * w)
    frames = counts.reshape(timesteps, 2, h, w).astype(np.int32)
    return FrameSequence(frames, dt_us)


def downsample(seq: FrameSequence, target: tuple[int, int]) -> FrameSequence:
    """Block-sum counts down to target (H', W'); totals are conserved."""
    th, tw = target
    t, c, h, w = seq.frames.shape
    if th <= 0 or tw <= 0 or h % th or w % tw:
        raise ShapeError(f"cannot downsample {h}x{w} to {th}x{tw}: non-divisible blocks")
    blocks = seq.frames.reshape(t, c, th, h // th, tw, w // tw)
    return FrameSequence(blocks.sum(axis=(3, 5), dtype=np.int64).astype(np.int32), seq.dt_us)
