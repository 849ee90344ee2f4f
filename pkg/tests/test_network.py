import numpy as np
import pytest
import torch

from spikedec import snn
from spikedec.errors import ConfigError, FormatError, ValidationError
from spikedec.snn.network import LIFParams

# published reference architectures: gesture models use valid padding,
# sign-language models use same padding (forced by their parameter counts)
GESTURE_BACKBONE = "16c5-bn-2p-0.2d-32c5-bn-2p-0.2d"
ANIMALS_BACKBONE = "8c5-2p-16c5-2p-32c5-2p-25fc"


def build(arch, padding, beta=0.9, seed=0, input_shape=(2, 32, 32)):
    return snn.Network(snn.parse_architecture(arch), input_shape, beta=beta, padding=padding, seed=seed)


class TestGrammar:
    def test_parse_round_trip(self):
        text = "16c5-bn-2p-0.2d-32c5-bn-2p-0.2d-1024"
        layers = snn.parse_architecture(text)
        assert snn.format_architecture(layers) == "16c5-bn-2p-0.2d-32c5-bn-2p-0.2d-1024fc"
        kinds = [s.kind for s in layers]
        assert kinds == ["conv", "batchnorm", "maxpool", "dropout"] * 2 + ["dense"]

    def test_fc_suffix_accepted(self):
        layers = snn.parse_architecture("8c5-2p-25fc-19")
        assert layers[-2].units == 25 and layers[-1].units == 19

    def test_garbage_token_rejected(self):
        with pytest.raises(ConfigError):
            snn.parse_architecture("16c5-wat-11")

    def test_transform_before_connective_rejected(self):
        with pytest.raises(ConfigError):
            snn.parse_architecture("bn-16c5-11")

    def test_beta_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            LIFParams(beta=1.5)


class TestNeuronCounting:
    @pytest.mark.parametrize(
        "suffix,expected",
        [("1024", 4960), ("11", 3947), ("1024-11", 4971)],
    )
    def test_gesture_model_neuron_counts(self, suffix, expected):
        net = build(f"{GESTURE_BACKBONE}-{suffix}", "valid")
        assert net.count_neurons() == expected

    def test_single_dense_layer(self):
        net = build("11", "valid", input_shape=(2, 4, 4))
        assert net.count_neurons() == 11

    def test_per_layer_breakdown_sums(self):
        net = build(f"{GESTURE_BACKBONE}-1024", "valid")
        per = net.per_layer_neurons()
        assert per == [3136, 800, 1024]
        assert sum(per) == net.count_neurons()


class TestParameterCounting:
    @pytest.mark.parametrize(
        "suffix,expected",
        [("11", 22_459), ("1024", 833_872), ("1024-11", 845_147)],
    )
    def test_gesture_model_parameter_counts(self, suffix, expected):
        net = build(f"{GESTURE_BACKBONE}-{suffix}", "valid")
        assert net.count_parameters() == expected

    @pytest.mark.parametrize(
        "suffix,expected_k",
        [("19", 29.8), ("1024", 55.9), ("1024-19", 75.4)],
    )
    def test_animals_model_parameter_counts(self, suffix, expected_k):
        net = build(f"{ANIMALS_BACKBONE}-{suffix}", "same")
        assert round(net.count_parameters() / 1000, 1) == expected_k

    def test_layer_by_layer_arithmetic(self):
        # 816 + 12832 + 8811 for the 11-way gesture model
        net = build(f"{GESTURE_BACKBONE}-11", "valid")
        sizes = [w.numel() + b.numel() for w, b in zip(net.weights, net.biases)]
        assert sizes == [816, 12_832, 8_811]

    def test_batchnorm_excluded_from_headline(self):
        with_bn = build("4c3-bn-2p-5", "valid", input_shape=(2, 8, 8))
        without = build("4c3-2p-5", "valid", input_shape=(2, 8, 8))
        assert with_bn.count_parameters() == without.count_parameters()


class TestNetworkConstruction:
    def test_seeded_init_is_deterministic(self):
        a = build("4c3-2p-6", "valid", seed=5, input_shape=(2, 8, 8))
        b = build("4c3-2p-6", "valid", seed=5, input_shape=(2, 8, 8))
        for wa, wb in zip(a.weights, b.weights):
            assert torch.equal(wa, wb)

    def test_biases_start_at_zero(self):
        net = build("4c3-2p-6", "valid", input_shape=(2, 8, 8))
        assert all(float(b.detach().abs().sum()) == 0.0 for b in net.biases)

    def test_kernel_too_large_rejected(self):
        with pytest.raises(ConfigError):
            build("4c9-2", "valid", input_shape=(2, 4, 4))

    def test_same_padding_preserves_extent(self):
        net = build("4c5-2p-6", "same", input_shape=(2, 8, 8))
        assert net.blocks[0].lif_shape == (4, 8, 8)
        assert net.blocks[0].out_shape == (4, 4, 4)


class TestCheckpoints:
    def test_round_trip_restores_everything(self, tmp_path):
        net = build("4c3-bn-2p-6", "valid", seed=1, input_shape=(2, 8, 8))
        with torch.no_grad():
            net.bn_running(0)[0].fill_(0.25)  # touch running stats too
        p = tmp_path / "model.ckpt"
        snn.save_checkpoint(net, p)
        other = build("4c3-bn-2p-6", "valid", seed=2, input_shape=(2, 8, 8))
        snn.load_checkpoint(other, p)
        for a, b in zip(net.weights, other.weights):
            assert torch.equal(a, b)
        assert torch.equal(net.bn_running(0)[0], other.bn_running(0)[0])

    def test_arch_mismatch_rejected(self, tmp_path):
        net = build("4c3-2p-6", "valid", input_shape=(2, 8, 8))
        p = tmp_path / "model.ckpt"
        snn.save_checkpoint(net, p)
        other = build("4c3-2p-7", "valid", input_shape=(2, 8, 8))
        with pytest.raises(FormatError):
            snn.load_checkpoint(other, p)

    def test_bad_magic_rejected(self, tmp_path):
        p = tmp_path / "junk.ckpt"
        p.write_bytes(b"JUNKJUNKJUNK")
        net = build("4c3-2p-6", "valid", input_shape=(2, 8, 8))
        with pytest.raises(FormatError):
            snn.load_checkpoint(net, p)
