import numpy as np
import pytest
import torch

from spikedec import snn
from spikedec.errors import MathError, ShapeError


def identity_two_layer(beta=0.0):
    """Two 2-unit dense LIF layers with strong diagonal weights."""
    net = snn.Network(snn.parse_architecture("2fc-2fc"), (2, 1, 1), beta=beta, padding="valid", seed=0)
    with torch.no_grad():
        for w, b in zip(net.weights, net.biases):
            w.copy_(torch.eye(2) * 2.0)
            b.zero_()
    return net


class TestLifStep:
    def test_subthreshold_integration(self):
        state, spikes = snn.lif_step(np.array([0.0]), np.array([0.5]), beta=0.9)
        assert state[0] == pytest.approx(0.5)
        assert spikes[0] == 0

    def test_threshold_crossing_resets(self):
        state, spikes = snn.lif_step(np.array([0.6]), np.array([0.5]), beta=0.9)
        # 0.9 * 0.6 + 0.5 = 1.04 >= 1 -> spike, reset to 0
        assert spikes[0] == 1
        assert state[0] == 0.0

    def test_full_decay_passes_drive_through(self):
        state, spikes = snn.lif_step(np.array([0.7, 0.2]), np.array([0.3, 0.9]), beta=0.0)
        assert state == pytest.approx([0.3, 0.9])
        assert (spikes == 0).all()

    def test_non_finite_drive_raises(self):
        with pytest.raises(MathError):
            snn.lif_step(np.array([0.0]), np.array([np.inf]), beta=0.5)

    def test_shape_mismatch_raises(self):
        with pytest.raises(ShapeError):
            snn.lif_step(np.zeros(2), np.zeros(3), beta=0.5)


class TestForwardContract:
    def test_quiescence(self):
        net = snn.Network(
            snn.parse_architecture("4c3-2p-6"), (2, 8, 8), beta=0.9, padding="valid", seed=3
        )
        trace = snn.forward(net, np.zeros((12, 2, 8, 8), dtype=np.int32))
        assert trace.total_spikes == 0
        assert all(c == 0 for c in trace.sop_counts)

    def test_one_step_delay_per_lif_layer(self):
        net = identity_two_layer()
        frames = np.zeros((6, 2, 1, 1), dtype=np.int32)
        frames[0, 1, 0, 0] = 1  # single input spike at t=0
        trace = snn.forward(net, frames)
        out = trace.output_train
        assert out[0].sum() == 0 and out[1].sum() == 0
        assert out[2, 1] == 1  # earliest possible output arrives at timestep 2
        assert trace.layer_spikes[0].reshape(6, 2)[1, 1] == 1

    def test_trace_has_exactly_t_rows(self):
        net = identity_two_layer()
        trace = snn.forward(net, np.zeros((9, 2, 1, 1), dtype=np.int32))
        assert all(train.shape[0] == 9 for train in trace.layer_spikes)
        assert trace.output_train.shape == (9, 2)

    def test_final_timestep_crossing_is_outside_trace(self):
        net = identity_two_layer()
        frames = np.zeros((3, 2, 1, 1), dtype=np.int32)
        frames[2, 0, 0, 0] = 1  # crossing at the last step arrives after the window
        trace = snn.forward(net, frames)
        assert trace.layer_spikes[0].sum() == 0

    def test_membranes_stay_below_threshold(self):
        rng = np.random.default_rng(0)
        net = snn.Network(
            snn.parse_architecture("3c3-4"), (2, 6, 6), beta=0.9, padding="valid", seed=7
        )
        frames = torch.tensor(
            rng.poisson(1.0, size=(1, 15, 2, 6, 6)), dtype=torch.float32
        )
        # step the simulator manually to observe membranes after each timestep
        from spikedec.snn.simulate import simulate

        out, _, _ = simulate(net, frames, mode="eval")
        # the public contract is spikes; membranes are internal, so assert via
        # a dense single-unit net where the membrane is observable from spikes:
        # a unit driven at +0.6 per step with beta=0 must never spike
        sub = snn.Network(snn.parse_architecture("1fc"), (2, 1, 1), beta=0.0, padding="valid", seed=0)
        with torch.no_grad():
            sub.weights[0].copy_(torch.tensor([[0.3, 0.3]]))
            sub.biases[0].zero_()
        frames2 = np.ones((10, 2, 1, 1), dtype=np.int32)
        trace = snn.forward(sub, frames2)
        assert trace.total_spikes == 0

    def test_beta_integration_accumulates_to_spike(self):
        # drive 0.4/step at beta=0.9: crosses 1 on the third step (0.4, 0.76, 1.084)
        net = snn.Network(snn.parse_architecture("1fc"), (2, 1, 1), beta=0.9, padding="valid", seed=0)
        with torch.no_grad():
            net.weights[0].copy_(torch.tensor([[0.2, 0.2]]))
            net.biases[0].zero_()
        frames = np.ones((6, 2, 1, 1), dtype=np.int32)
        trace = snn.forward(net, frames)
        train = trace.output_train[:, 0]
        assert list(train[:4]) == [0, 0, 0, 1]  # crossing at t=2, recorded at t=3

    def test_eval_forward_is_bit_deterministic(self):
        rng = np.random.default_rng(1)
        net = snn.Network(
            snn.parse_architecture("4c3-bn-2p-0.2d-6"), (2, 8, 8), beta=0.7, padding="valid", seed=2
        )
        frames = rng.poisson(0.8, size=(20, 2, 8, 8)).astype(np.int32)
        a = snn.forward(net, frames, mode="eval")
        b = snn.forward(net, frames, mode="eval")
        for ta, tb in zip(a.layer_spikes, b.layer_spikes):
            assert (ta == tb).all()
        assert a.sop_counts == b.sop_counts

    def test_shape_mismatch_raises(self):
        net = identity_two_layer()
        with pytest.raises(ShapeError):
            snn.forward(net, np.zeros((5, 2, 3, 3), dtype=np.int32))

    def test_dropout_only_active_in_train_mode(self):
        rng = np.random.default_rng(4)
        net = snn.Network(
            snn.parse_architecture("4c3-2p-0.5d-6"), (2, 8, 8), beta=0.9, padding="valid", seed=9
        )
        frames = rng.poisson(1.5, size=(15, 2, 8, 8)).astype(np.int32)
        eval_a = snn.forward(net, frames, mode="eval")
        eval_b = snn.forward(net, frames, mode="eval")
        assert (eval_a.layer_arrivals[1] == eval_b.layer_arrivals[1]).all()
        # train mode masks half the pooled spikes on average (per-sample mask)
        from spikedec.snn.simulate import simulate

        t = torch.tensor(frames, dtype=torch.float32).unsqueeze(0)
        g1 = torch.Generator().manual_seed(1)
        g2 = torch.Generator().manual_seed(2)
        _, _, arr1 = simulate(net, t, mode="train", record=True, generator=g1)
        _, _, arr2 = simulate(net, t, mode="train", record=True, generator=g2)
        assert not (arr1[1] == arr2[1]).all()
