"""Forward/backward passes of the boundary-pixel network, training behavior,
the finite-difference gradient oracle, descriptors, and regression stats."""

import math

import numpy as np
import pytest

from echokit import (FracParams, GrayImage, LabelMask, PhantomSpec,
                     SpeckleParams, TrainConfig, ValidationError, apply_speckle,
                     classify_inter_intra, confusion_stats, denoise, forward,
                     forward_batch, generate_phantom, gradient_check,
                     init_network, inter_intra_labels, nn_feature_stack,
                     pixel_features, pixel_nn_features, regression_stats, train)
from echokit.errors import TrainingDivergedError
from echokit.nnclassifier import (MlpNetwork, load_network, nn_configs,
                                  save_network)


def sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


def zero_network(n_inputs=108, n_hidden=39):
    return MlpNetwork(np.zeros((n_hidden, n_inputs)), np.zeros(n_hidden),
                      np.zeros(n_hidden), 0.0)


class TestForward:
    def test_zero_network_outputs_half(self):
        net = zero_network()
        rng = np.random.default_rng(0)
        for _ in range(5):
            assert forward(net, rng.uniform(0, 1, 108)) == 0.5

    def test_single_effective_path(self):
        """One nonzero chain w1[0,0]=2, w2[0]=3: out = s(3 * s(2 * x0))."""
        w1 = np.zeros((39, 108))
        w1[0, 0] = 2.0
        w2 = np.zeros(39)
        w2[0] = 3.0
        b1 = np.full(39, -50.0)  # silence every other hidden unit
        b1[0] = 0.0
        net = MlpNetwork(w1, b1, w2, 0.0)
        x = np.zeros(108)
        x[0] = 1.0
        expected = sigmoid(3.0 * sigmoid(2.0))
        assert abs(forward(net, x) - expected) < 1e-12

    def test_output_strictly_inside_unit_interval(self):
        rng = np.random.default_rng(1)
        for seed in range(5):
            net = init_network(seed, scale=2.0)
            out = forward_batch(net, rng.uniform(0, 1, (50, 108)))
            assert (out > 0).all() and (out < 1).all()

    def test_shape_validation(self):
        with pytest.raises(ValidationError):
            forward(zero_network(), np.zeros(64))


class TestTrain:
    def test_loss_decreases_on_separable_points(self):
        x = np.zeros((2, 108))
        x[0, 0], x[1, 0] = 0.0, 1.0
        y = np.array([0.0, 1.0])
        net, trace = train(init_network(0), x, y,
                           TrainConfig(learning_rate=0.5, epochs=500, seed=0))
        assert trace[-1] < trace[0]
        assert len(trace) == 500

    def test_seed_determinism(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(0, 1, (20, 108))
        y = np.asarray(rng.integers(0, 2, 20), dtype=float)
        cfg = TrainConfig(learning_rate=0.5, epochs=50, seed=9)
        n1, t1 = train(init_network(9), x, y, cfg)
        n2, t2 = train(init_network(9), x, y, cfg)
        np.testing.assert_array_equal(n1.w1, n2.w1)
        np.testing.assert_array_equal(n1.w2, n2.w2)
        assert t1 == t2

    def test_xor_is_learnable(self):
        x = np.zeros((4, 108))
        x[:, :2] = [[0, 0], [0, 1], [1, 0], [1, 1]]
        y = np.array([0.0, 1.0, 1.0, 0.0])
        net, trace = train(init_network(0, 0.5), x, y,
                           TrainConfig(learning_rate=2.0, epochs=20000, seed=0,
                                       init_scale=0.5))
        assert trace[-1] < 0.05

    def test_trace_finite_at_moderate_rate(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 1, (30, 108))
        y = np.asarray(rng.integers(0, 2, 30), dtype=float)
        _, trace = train(init_network(4), x, y,
                         TrainConfig(learning_rate=0.5, epochs=300, seed=4))
        assert np.isfinite(trace).all()

    def test_nan_input_aborts_with_diagnostic(self):
        x = np.zeros((2, 108))
        x[0, 0] = np.nan
        y = np.array([0.0, 1.0])
        with pytest.raises(TrainingDivergedError):
            train(init_network(0), x, y, TrainConfig(learning_rate=0.5, epochs=5, seed=0))

    def test_learning_rate_guard(self):
        with pytest.raises(ValidationError):
            TrainConfig(learning_rate=11.0, epochs=10, seed=0)

    def test_label_validation(self):
        x = np.zeros((2, 108))
        with pytest.raises(ValidationError):
            train(init_network(0), x, np.array([0.0, 0.5]),
                  TrainConfig(learning_rate=0.5, epochs=5, seed=0))

    def test_label_swap_mirrors_outputs_at_epoch_zero(self):
        """Negating (w2, b2) mirrors the prediction: y_hat -> 1 - y_hat."""
        rng = np.random.default_rng(5)
        net = init_network(7)
        mirrored = MlpNetwork(net.w1, net.b1, -net.w2, -net.b2)
        x = rng.uniform(0, 1, (20, 108))
        np.testing.assert_allclose(forward_batch(mirrored, x),
                                   1.0 - forward_batch(net, x), atol=1e-12, rtol=0)


class TestGradientCheck:
    def test_fresh_networks_pass(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0, 1, (16, 108))
        y = np.asarray(rng.integers(0, 2, 16), dtype=float)
        for seed in (0, 1, 2):
            err = gradient_check(init_network(seed), x, y, n_params=64, seed=seed)
            assert err <= 1e-5

    def test_saturated_units_do_not_blow_up(self):
        """Huge biases kill the hidden gradients; the guarded denominator
        keeps the relative error finite and small."""
        rng = np.random.default_rng(7)
        net = init_network(3)
        saturated = MlpNetwork(net.w1, np.full(39, 500.0), net.w2, net.b2)
        x = rng.uniform(0, 1, (8, 108))
        y = np.asarray(rng.integers(0, 2, 8), dtype=float)
        err = gradient_check(saturated, x, y, n_params=128, seed=1)
        assert np.isfinite(err)
        assert err <= 1e-5

    def test_batch_duplication_invariance(self):
        rng = np.random.default_rng(8)
        net = init_network(11)
        x = rng.uniform(0, 1, (10, 108))
        y = np.asarray(rng.integers(0, 2, 10), dtype=float)
        e1 = gradient_check(net, x, y, n_params=40, seed=2)
        e2 = gradient_check(net, np.vstack([x, x]), np.concatenate([y, y]),
                            n_params=40, seed=2)
        assert abs(e1 - e2) <= 1e-6


class TestDescriptors:
    def test_constant_image_pattern(self):
        img = GrayImage(np.full((15, 15), 0.4))
        vec = pixel_nn_features(img, 7, 7)
        assert vec.shape == (108,)
        np.testing.assert_array_equal(vec.reshape(27, 4),
                                      np.tile([0.0, 1.0, 0.0, 1.0], (27, 1)))

    def test_entries_in_unit_interval(self):
        rng = np.random.default_rng(9)
        img = GrayImage(rng.uniform(0, 1, (20, 20)))
        vec = pixel_nn_features(img, 10, 10)
        assert vec.min() >= 0.0 and vec.max() <= 1.0

    def test_matches_single_configuration_calls(self):
        rng = np.random.default_rng(10)
        img = GrayImage(rng.uniform(0, 1, (20, 20)))
        vec = pixel_nn_features(img, 9, 8)
        configs = nn_configs()
        for i in (0, 7, 13, 20, 26):
            fv = pixel_features(img, 9, 8, configs[i])
            scale = (configs[i].levels - 1) ** 2
            expected = [fv.contrast / scale, fv.homogeneity, fv.entropy,
                        fv.local_homogeneity]
            np.testing.assert_allclose(vec[4 * i:4 * i + 4], expected,
                                       atol=1e-12, rtol=0)

    def test_stack_matches_pixel_descriptor(self):
        rng = np.random.default_rng(11)
        img = GrayImage(rng.uniform(0, 1, (16, 14)))
        stack = nn_feature_stack(img)
        for x, y in ((0, 0), (7, 9), (13, 15)):
            np.testing.assert_allclose(stack[y, x], pixel_nn_features(img, x, y),
                                       atol=1e-12, rtol=0)


class TestClassify:
    def test_biased_network_marks_everything_inter(self):
        net = zero_network()
        biased = MlpNetwork(net.w1, net.b1, net.w2, math.log(9.0))  # s(b2) = 0.9
        img = GrayImage(np.full((14, 14), 0.5))
        mask = classify_inter_intra(biased, img)
        assert (mask.labels == 1).all()

    def test_threshold_half_maps_to_inter(self):
        img = GrayImage(np.full((14, 14), 0.5))
        mask = classify_inter_intra(zero_network(), img)  # output exactly 0.5
        assert (mask.labels == 1).all()

    def test_inter_intra_labels(self):
        labels = np.zeros((5, 5), dtype=int)
        labels[2:, :] = 1
        mask = LabelMask(labels, n_classes=2)
        boundary = inter_intra_labels(mask)
        np.testing.assert_array_equal(boundary[0], 0)
        np.testing.assert_array_equal(boundary[1], 1)
        np.testing.assert_array_equal(boundary[2], 1)
        np.testing.assert_array_equal(boundary[3], 0)

    def test_phantom_boundary_recall(self):
        """Ground-truth-trained net finds most boundary pixels."""
        spec = PhantomSpec(width=96, height=96, cx=47.5, cy=47.5, rx=33, ry=28,
                           wall=8, seed=4)
        img, truth = generate_phantom(spec)
        noisy = apply_speckle(img, SpeckleParams(sigma=0.08, seed=2))
        cleaned = denoise(noisy, FracParams())
        boundary = inter_intra_labels(truth)
        stack = nn_feature_stack(cleaned)
        flat = stack.reshape(-1, 108)
        flags = boundary.ravel()
        rng = np.random.default_rng(9)
        idx = np.concatenate([rng.choice(np.flatnonzero(flags == v), 120, replace=False)
                              for v in (0, 1)])
        net, _ = train(init_network(9), flat[idx], flags[idx].astype(float),
                       TrainConfig(learning_rate=2.0, epochs=400, seed=9))
        pred = LabelMask((forward_batch(net, flat) >= 0.5).astype(int).reshape(96, 96),
                         n_classes=2)
        stats = confusion_stats(pred, LabelMask(boundary, n_classes=2), 1)
        assert stats.sensitivity >= 0.6


class TestRegressionStats:
    def test_perfect_fit(self):
        x = np.array([0.2, 0.5, 0.9, 0.1])
        s = regression_stats(x, x)
        assert abs(s.slope - 1.0) <= 1e-12
        assert abs(s.intercept) <= 1e-12
        assert abs(s.r - 1.0) <= 1e-12

    def test_anti_correlation(self):
        x = np.array([0.2, 0.5, 0.9, 0.1])
        s = regression_stats(x, -x + 1.0)
        assert abs(s.r + 1.0) <= 1e-12

    def test_hand_linear_relation(self):
        s = regression_stats([0.0, 1.0, 2.0], [1.0, 3.0, 5.0])
        assert abs(s.slope - 2.0) <= 1e-12
        assert abs(s.intercept - 1.0) <= 1e-12
        assert abs(s.r - 1.0) <= 1e-12

    def test_constant_series_rejected(self):
        with pytest.raises(ValidationError):
            regression_stats([0.0, 1.0], [2.0, 2.0])
        with pytest.raises(ValidationError):
            regression_stats([1.0, 1.0], [0.0, 2.0])


class TestSerialization:
    def test_round_trip_exact(self, tmp_path):
        net = init_network(13)
        p = tmp_path / "weights.txt"
        save_network(net, p)
        back = load_network(p)
        np.testing.assert_array_equal(back.w1, net.w1)
        np.testing.assert_array_equal(back.b1, net.b1)
        np.testing.assert_array_equal(back.w2, net.w2)
        assert back.b2 == net.b2

    def test_rejects_foreign_file(self, tmp_path):
        p = tmp_path / "junk.txt"
        p.write_text("not a network\n")
        with pytest.raises(ValidationError):
            load_network(p)
