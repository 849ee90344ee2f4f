import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikedec import events
from spikedec.errors import FormatError, ShapeError, ValidationError


def write_raw(path, width, height, label, records):
    """Hand-rolled EVS1 writer so the reader is tested against independent bytes."""
    blob = b"EVS1"
    blob += np.uint16(width).tobytes() + np.uint16(height).tobytes()
    blob += np.uint32(label).tobytes() + np.uint64(len(records)).tobytes()
    for t, x, y, p in records:
        blob += np.uint64(t).tobytes() + np.uint16(x).tobytes() + np.uint16(y).tobytes()
        blob += bytes([p, 0])
    path.write_bytes(blob)
    return blob


class TestLoadEvents:
    def test_empty_file_gives_empty_stream(self, tmp_path):
        p = tmp_path / "empty.evs"
        write_raw(p, 4, 4, 0xFFFFFFFF, [])
        stream = events.load_events(p)
        assert len(stream) == 0
        assert stream.label is None
        assert (stream.sensor_width, stream.sensor_height) == (4, 4)

    def test_loads_sorted_by_t(self, tmp_path):
        p = tmp_path / "unsorted.evs"
        write_raw(p, 4, 4, 2, [(5, 1, 2, 1), (3, 0, 0, 0)])
        stream = events.load_events(p)
        assert list(stream.events["t"]) == [3, 5]
        assert stream.events["x"][0] == 0
        assert stream.label == 2

    def test_bad_magic_raises(self, tmp_path):
        p = tmp_path / "bad.evs"
        p.write_bytes(b"NOPE" + bytes(16))
        with pytest.raises(FormatError):
            events.load_events(p)

    def test_truncated_body_raises(self, tmp_path):
        p = tmp_path / "short.evs"
        blob = write_raw(p, 4, 4, 0, [(1, 0, 0, 1)])
        p.write_bytes(blob[:-3])
        with pytest.raises(FormatError):
            events.load_events(p)

    def test_out_of_bounds_coordinate_names_record(self, tmp_path):
        p = tmp_path / "oob.evs"
        write_raw(p, 4, 4, 0, [(1, 0, 0, 1), (2, 9, 0, 1)])
        with pytest.raises(ValidationError, match="record 1"):
            events.load_events(p)

    def test_round_trip_is_byte_exact_for_sorted_input(self, tmp_path):
        src = tmp_path / "src.evs"
        blob = write_raw(src, 8, 8, 3, [(1, 0, 0, 0), (1, 7, 7, 1), (9, 3, 2, 1)])
        out = tmp_path / "copy.evs"
        events.write_events(events.load_events(src), out)
        assert out.read_bytes() == blob


class TestBinToFrames:
    def test_same_bin_counts_accumulate(self):
        s = events.make_stream(4, 4, t=[0, 999], x=[2, 2], y=[1, 1], polarity=[1, 1])
        seq = events.bin_to_frames(s, dt_us=1000, clip_us=3000)
        assert seq.frames[0, 1, 1, 2] == 2
        assert seq.frames.sum() == 2

    def test_clip_window_is_half_open(self):
        s = events.make_stream(4, 4, t=[1_500_000], x=[0], y=[0], polarity=[1])
        seq = events.bin_to_frames(s, dt_us=1000, clip_us=1_500_000)
        assert seq.timesteps == 1500
        assert seq.frames.sum() == 0

    def test_polarity_channels_are_separate(self):
        s = events.make_stream(2, 2, t=[0, 0], x=[0, 0], y=[0, 0], polarity=[0, 1])
        seq = events.bin_to_frames(s, dt_us=1000, clip_us=1000)
        assert seq.frames[0, 0, 0, 0] == 1
        assert seq.frames[0, 1, 0, 0] == 1

    @given(st.integers(0, 4000))
    @settings(max_examples=30, deadline=None)
    def test_frame_index_is_floor_t_over_dt(self, t_us):
        s = events.make_stream(2, 2, t=[t_us], x=[0], y=[0], polarity=[1])
        seq = events.bin_to_frames(s, dt_us=1000, clip_us=5000)
        assert seq.frames[t_us // 1000, 1, 0, 0] == 1

    @given(st.data())
    @settings(max_examples=25, deadline=None)
    def test_count_conservation_on_random_streams(self, data):
        n = data.draw(st.integers(0, 200))
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        t = rng.integers(0, 6000, size=n)
        s = events.make_stream(
            8, 8, t=t, x=rng.integers(0, 8, n), y=rng.integers(0, 8, n),
            polarity=rng.integers(0, 2, n),
        )
        clip = 3000
        seq = events.bin_to_frames(s, dt_us=1000, clip_us=clip)
        assert seq.frames.sum() == int((t < clip).sum())

    def test_zero_event_stream_is_legal(self):
        s = events.make_stream(4, 4, t=[], x=[], y=[], polarity=[])
        seq = events.bin_to_frames(s, dt_us=1000, clip_us=2000)
        assert seq.timesteps == 2
        assert seq.frames.sum() == 0


class TestDownsample:
    def test_uniform_block_sum(self):
        frames = events.FrameSequence(np.ones((2, 2, 128, 128), dtype=np.int32), 1000)
        small = events.downsample(frames, (32, 32))
        assert small.frames.shape == (2, 2, 32, 32)
        assert (small.frames == 16).all()

    def test_single_event_lands_in_origin_block(self):
        raw = np.zeros((1, 2, 128, 128), dtype=np.int32)
        raw[0, 1, 0, 0] = 1
        small = events.downsample(events.FrameSequence(raw, 1000), (32, 32))
        assert small.frames[0, 1, 0, 0] == 1
        assert small.frames.sum() == 1

    def test_non_divisible_target_raises(self):
        frames = events.FrameSequence(np.zeros((1, 2, 10, 10), dtype=np.int32), 1000)
        with pytest.raises(ShapeError):
            events.downsample(frames, (3, 3))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_total_count_preserved(self, seed):
        rng = np.random.default_rng(seed)
        raw = rng.integers(0, 5, size=(3, 2, 16, 16)).astype(np.int32)
        small = events.downsample(events.FrameSequence(raw, 1000), (4, 4))
        assert small.frames.sum() == raw.sum()


class TestOrderingInvariants:
    def test_binning_invariant_to_input_order(self):
        rng = np.random.default_rng(7)
        n = 50
        t = rng.integers(0, 3000, n)
        x = rng.integers(0, 4, n)
        y = rng.integers(0, 4, n)
        p = rng.integers(0, 2, n)
        a = events.make_stream(4, 4, t, x, y, p)
        perm = rng.permutation(n)
        b = events.make_stream(4, 4, t[perm], x[perm], y[perm], p[perm])
        fa = events.bin_to_frames(a, 1000, 3000)
        fb = events.bin_to_frames(b, 1000, 3000)
        assert (fa.frames == fb.frames).all()

    def test_load_write_preserves_multiset(self, tmp_path):
        rng = np.random.default_rng(3)
        n = 40
        s = events.make_stream(
            8, 8, rng.integers(0, 999, n), rng.integers(0, 8, n),
            rng.integers(0, 8, n), rng.integers(0, 2, n), label=1,
        )
        p = tmp_path / "s.evs"
        events.write_events(s, p)
        loaded = events.load_events(p)
        assert sorted(map(tuple, loaded.events.tolist())) == sorted(map(tuple, s.events.tolist()))
        assert (np.diff(loaded.events["t"].astype(np.int64)) >= 0).all()
