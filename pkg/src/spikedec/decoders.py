"""Turn output spike trains into classifications: rate, latency, hypervector.

Latency is reported as the end of the deciding timestep, i.e. dt * (1 + t):
a decision made from frame t's spikes is only available once that millisecond
has elapsed.  All argmax/argmin ties break to the lowest class index.  A
prediction of None means Unknown.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError
from .hdc import BinaryHypervector, ClassCodebook

RATE_SOFTMAX_CONFIDENCE = 0.99


@dataclass(frozen=True)
class UnknownPolicy:
    """Reject as Unknown when no class is within normalized Hamming delta."""

    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta <= 0.5:
            raise ValidationError(f"delta must be in (0, 0.5], got {self.delta}")


@dataclass
class DecoderOutput:
    predicted_class: int | None
    decision_latency_ms: float | None
    per_timestep_prediction: list[int | None] | None = None
    hypervector: BinaryHypervector | None = None
    distances: np.ndarray | None = None  # per-class normalized Hamming


def _as_train(output_train) -> np.ndarray:
    train = np.asarray(output_train)
    if train.ndim != 2:
        raise ShapeError(f"expected a [T, units] train, got shape {train.shape}")
    return train


def rate_decode(output_train, dt_ms: float = 1.0) -> DecoderOutput:
    """Most-spikes-wins; latency when the cumulative-count softmax reaches 0.99."""
    train = _as_train(output_train)
    if train.shape[1] < 2:
        raise ShapeError("rate decoding needs at least 2 output neurons")
    cum = np.cumsum(train, axis=0, dtype=np.float64)
    per_step = [int(np.argmax(row)) for row in cum]
    # softmax max >= p  <=>  sum(exp(c - c_max)) <= 1/p, on raw counts
    spread = np.exp(cum - cum.max(axis=1, keepdims=True)).sum(axis=1)
    confident = np.nonzero(spread <= 1.0 / RATE_SOFTMAX_CONFIDENCE)[0]
    latency = dt_ms * (1 + int(confident[0])) if confident.size else None
    return DecoderOutput(
        predicted_class=int(np.argmax(cum[-1])),
        decision_latency_ms=latency,
        per_timestep_prediction=per_step,
    )


def latency_decode(output_train, dt_ms: float = 1.0) -> DecoderOutput:
    """First spike wins; a silent train decodes to Unknown."""
    train = _as_train(output_train)
    if train.shape[1] < 2:
        raise ShapeError("latency decoding needs at least 2 output neurons")
    times, units = np.nonzero(train)
    if times.size == 0:
        return DecoderOutput(
            predicted_class=None,
            decision_latency_ms=None,
            per_timestep_prediction=[None] * train.shape[0],
        )
    t0 = int(times[0])  # nonzero scans row-major: earliest timestep first
    winner = int(units[times == t0].min())
    per_step: list[int | None] = [None] * t0 + [winner] * (train.shape[0] - t0)
    return DecoderOutput(
        predicted_class=winner,
        decision_latency_ms=dt_ms * (1 + t0),
        per_timestep_prediction=per_step,
    )


def hdc_accumulate(output_train) -> tuple[BinaryHypervector, np.ndarray]:
    """Fold spikes into a hypervector: bit i set once neuron i has ever fired.

    Returns the final vector and the [T, D] 0/1 partial-vector history
    (monotone under bitwise OR).
    """
    train = _as_train(output_train)
    partials = np.logical_or.accumulate(train != 0, axis=0).astype(np.uint8)
    return BinaryHypervector.from_bits(partials[-1]), partials


def hdc_classify(
    hv: BinaryHypervector,
    codebook: ClassCodebook,
    policy: UnknownPolicy | None = None,
) -> DecoderOutput:
    """Nearest codeword by normalized Hamming; Unknown if no codeword is within delta."""
    distances = codebook.distances(hv)
    predicted: int | None = int(np.argmin(distances))
    if policy is not None and distances[predicted] >= policy.delta:
        predicted = None
    return DecoderOutput(
        predicted_class=predicted,
        decision_latency_ms=None,
        hypervector=hv,
        distances=distances,
    )


def hdc_latency(per_timestep_prediction, dt_ms: float = 1.0) -> float:
    """Settle time: when the prediction last changed to its final value."""
    seq = list(per_timestep_prediction)
    if not seq:
        raise ValidationError("prediction sequence is empty")
    settle = len(seq) - 1
    while settle > 0 and seq[settle - 1] == seq[-1]:
        settle -= 1
    return dt_ms * (1 + settle)


def hdc_decode(
    output_train,
    codebook: ClassCodebook,
    policy: UnknownPolicy | None = None,
    dt_ms: float = 1.0,
) -> DecoderOutput:
    """Accumulate, classify per timestep, and report the settle-time latency."""
    train = _as_train(output_train)
    if train.shape[1] != codebook.dims:
        raise ShapeError(f"train width {train.shape[1]} != codebook dims {codebook.dims}")
    hv, partials = hdc_accumulate(train)
    book = codebook.bit_matrix()  # [K, D]
    dist = (partials[:, None, :] != book[None, :, :]).sum(axis=2) / codebook.dims  # [T, K]
    nearest = np.argmin(dist, axis=1)
    per_step: list[int | None] = []
    for t, k in enumerate(nearest):
        if policy is not None and dist[t, k] >= policy.delta:
            per_step.append(None)
        else:
            per_step.append(int(k))
    final = hdc_classify(hv, codebook, policy)
    final.per_timestep_prediction = per_step
    final.decision_latency_ms = hdc_latency(per_step, dt_ms)
    return final
