import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikedec import decoders, hdc
from spikedec.errors import ShapeError, ValidationError


def train_from_counts(counts, timesteps):
    """Spread per-neuron totals over a train, earliest-first."""
    counts = list(counts)
    train = np.zeros((timesteps, len(counts)), dtype=np.uint8)
    for unit, c in enumerate(counts):
        train[:c, unit] = 1
    return train


class TestRateDecode:
    def test_argmax_of_totals(self):
        train = train_from_counts([3, 10, 1], timesteps=12)
        assert decoders.rate_decode(train).predicted_class == 1

    def test_all_zero_train_ties_to_class_zero(self):
        out = decoders.rate_decode(np.zeros((5, 3), dtype=np.uint8))
        assert out.predicted_class == 0
        assert out.decision_latency_ms is None

    def test_softmax_confidence_latency(self):
        # one of 11 neurons firing every step: confident once its count hits 7
        train = np.zeros((12, 11), dtype=np.uint8)
        train[:, 4] = 1
        out = decoders.rate_decode(train, dt_ms=1.0)
        assert out.predicted_class == 4
        assert out.decision_latency_ms == pytest.approx(7.0)
        assert 7 > math.log(0.99 * 10 / 0.01) > 6

    def test_latency_never_reached_is_none(self):
        train = np.zeros((5, 11), dtype=np.uint8)
        train[0, 2] = 1
        train[1, 3] = 1
        assert decoders.rate_decode(train).decision_latency_ms is None

    def test_prediction_invariant_to_timing_permutation(self):
        rng = np.random.default_rng(0)
        train = (rng.random((30, 4)) < 0.3).astype(np.uint8)
        base = decoders.rate_decode(train).predicted_class
        for _ in range(5):
            shuffled = train[rng.permutation(30)]
            assert decoders.rate_decode(shuffled).predicted_class == base

    def test_per_timestep_length(self):
        train = train_from_counts([1, 2], timesteps=9)
        assert len(decoders.rate_decode(train).per_timestep_prediction) == 9


class TestLatencyDecode:
    def test_first_spike_wins(self):
        train = np.zeros((12, 6), dtype=np.uint8)
        train[7, 4] = 1
        train[9, 2] = 1
        out = decoders.latency_decode(train, dt_ms=1.0)
        assert out.predicted_class == 4
        assert out.decision_latency_ms == pytest.approx(8.0)

    def test_same_timestep_tie_breaks_low(self):
        train = np.zeros((8, 5), dtype=np.uint8)
        train[5, 3] = 1
        train[5, 1] = 1
        assert decoders.latency_decode(train).predicted_class == 1

    def test_silent_train_is_unknown(self):
        out = decoders.latency_decode(np.zeros((6, 4), dtype=np.uint8))
        assert out.predicted_class is None
        assert out.decision_latency_ms is None

    def test_later_spikes_are_ignored(self):
        rng = np.random.default_rng(3)
        train = np.zeros((20, 5), dtype=np.uint8)
        train[4, 2] = 1
        noisy = train.copy()
        noisy[5:] = (rng.random((15, 5)) < 0.5).astype(np.uint8)
        a, b = decoders.latency_decode(train), decoders.latency_decode(noisy)
        assert (a.predicted_class, a.decision_latency_ms) == (b.predicted_class, b.decision_latency_ms)


class TestHdcAccumulate:
    def test_silent_train_gives_zero_vector(self):
        hv, partials = decoders.hdc_accumulate(np.zeros((5, 8), dtype=np.uint8))
        assert hv.popcount() == 0
        assert partials.shape == (5, 8)

    def test_repeat_spikes_equal_single_spike(self):
        a = np.zeros((12, 6), dtype=np.uint8)
        a[2, 3] = 1
        b = a.copy()
        b[9, 3] = 1
        hv_a, _ = decoders.hdc_accumulate(a)
        hv_b, _ = decoders.hdc_accumulate(b)
        assert hv_a == hv_b

    @given(st.integers(0, 2**31))
    @settings(max_examples=30, deadline=None)
    def test_partials_are_or_monotone(self, seed):
        rng = np.random.default_rng(seed)
        train = (rng.random((15, 10)) < 0.2).astype(np.uint8)
        _, partials = decoders.hdc_accumulate(train)
        for t in range(14):
            assert (np.bitwise_or(partials[t], partials[t + 1]) == partials[t + 1]).all()


class TestHdcClassify:
    def test_exact_codeword_match(self):
        book = hdc.ClassCodebook.generate(4, 64, seed=2)
        out = decoders.hdc_classify(book[2], book)
        assert out.predicted_class == 2
        assert out.distances[2] == 0.0

    def test_zero_vector_is_far_from_random_codebook(self):
        book = hdc.ClassCodebook.generate(8, 1024, seed=3)
        zero = hdc.BinaryHypervector.from_bits(np.zeros(1024, dtype=np.uint8))
        out = decoders.hdc_classify(zero, book, decoders.UnknownPolicy(0.25))
        assert out.predicted_class is None
        # expected distance of the zero vector to Bernoulli(0.5) codewords ~ 0.5
        assert out.distances.min() == pytest.approx(0.5, abs=0.06)

    def test_policy_monotone_in_delta(self):
        book = hdc.ClassCodebook.generate(4, 256, seed=5)
        probe = hdc.generate(256, seed=99)
        known_at = [
            delta
            for delta in np.linspace(0.01, 0.5, 50)
            if decoders.hdc_classify(probe, book, decoders.UnknownPolicy(float(delta))).predicted_class
            is not None
        ]
        if known_at:  # known at delta implies known at every larger delta
            threshold = min(known_at)
            assert all(d >= threshold - 1e-12 for d in known_at)
            assert len(known_at) == sum(1 for d in np.linspace(0.01, 0.5, 50) if d >= threshold - 1e-12)

    def test_delta_half_accepts_random_vectors_at_orthogonality_mass(self):
        # P(min distance < 0.5) over random probes ~ mass below 0.5 per codeword
        book = hdc.ClassCodebook.generate(1, 1024, seed=8)
        rng = np.random.default_rng(8)
        probes = hdc.random_bits(10_000, 1024, rng)
        dist = (probes != book[0].to_bits()).sum(axis=1) / 1024
        accepted = (dist < 0.5).mean()
        assert accepted == pytest.approx(0.5, abs=0.02)

    def test_dimension_mismatch_raises(self):
        book = hdc.ClassCodebook.generate(3, 64, seed=1)
        with pytest.raises(ShapeError):
            decoders.hdc_classify(hdc.generate(32, 0), book)

    def test_invalid_delta_rejected(self):
        with pytest.raises(ValidationError):
            decoders.UnknownPolicy(0.0)
        with pytest.raises(ValidationError):
            decoders.UnknownPolicy(0.7)


class TestHdcLatency:
    def test_constant_sequence_settles_immediately(self):
        assert decoders.hdc_latency([3, 3, 3, 3], dt_ms=1.0) == pytest.approx(1.0)

    def test_last_change_point(self):
        assert decoders.hdc_latency([0, 0, 1, 2, 2, 2], dt_ms=1.0) == pytest.approx(4.0)

    @given(st.lists(st.integers(0, 3), min_size=1, max_size=30), st.integers(1, 10))
    @settings(max_examples=50, deadline=None)
    def test_settle_invariant_to_appending_final_value(self, seq, extra):
        base = decoders.hdc_latency(seq)
        assert decoders.hdc_latency(seq + [seq[-1]] * extra) == base

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValidationError):
            decoders.hdc_latency([])


class TestHdcDecode:
    def test_end_to_end_with_codebook_target(self):
        book = hdc.ClassCodebook.generate(3, 32, seed=4)
        bits = book[1].to_bits()
        train = np.zeros((10, 32), dtype=np.uint8)
        on = np.nonzero(bits)[0]
        for i, unit in enumerate(on):  # drip the codeword out over time
            train[i % 10, unit] = 1
        out = decoders.hdc_decode(train, book)
        assert out.predicted_class == 1
        assert out.distances[1] == 0.0
        assert len(out.per_timestep_prediction) == 10
        assert out.decision_latency_ms is not None
