"""Co-occurrence counting against a naive pair enumerator, the four texture
features, and the per-pixel feature machinery."""

import numpy as np
import pytest

from echokit import (Glcm, GlcmConfig, GrayImage, Offset, PhantomSpec,
                     QuantizedImage, ValidationError, compute_glcm,
                     feature_field, generate_checkerboard, generate_phantom,
                     glcm_features, pixel_features)


def naive_glcm(levels: int, data: np.ndarray, dx: int, dy: int,
               symmetric: bool) -> np.ndarray:
    """Direct double-loop pair enumeration, the oracle for compute_glcm."""
    h, w = data.shape
    counts = np.zeros((levels, levels), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            x2, y2 = x + dx, y + dy
            if 0 <= x2 < w and 0 <= y2 < h:
                counts[data[y, x], data[y2, x2]] += 1
    if symmetric:
        counts = counts + counts.T
    return counts


class TestComputeGlcm:
    def test_constant_image_single_cell(self):
        q = QuantizedImage(4, np.full((2, 2), 3))
        g = compute_glcm(q, Offset(1, 0))
        assert g.counts[3, 3] == 2
        assert g.counts.sum() == 2
        assert g.probs[3, 3] == 1.0

    def test_two_column_pattern(self):
        q = QuantizedImage(2, np.array([[0, 1], [0, 1]]))
        g = compute_glcm(q, Offset(1, 0), symmetric=False)
        assert g.counts[0, 1] == 2
        assert g.counts.sum() == 2
        assert g.probs[0, 1] == 1.0

    def test_symmetric_splits_mass(self):
        q = QuantizedImage(2, np.array([[0, 1], [0, 1]]))
        g = compute_glcm(q, Offset(1, 0), symmetric=True)
        assert g.probs[0, 1] == 0.5
        assert g.probs[1, 0] == 0.5

    def test_offset_larger_than_image(self):
        q = QuantizedImage(2, np.zeros((3, 3), dtype=int))
        with pytest.raises(ValidationError):
            compute_glcm(q, Offset(3, 0))

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(10)
        offsets = [(1, 0), (0, 1), (1, 1), (1, -1)]
        for m in (2, 4, 8):
            for _ in range(20):
                data = rng.integers(0, m, (8, 8))
                q = QuantizedImage(m, data)
                for dx, dy in offsets:
                    for sym in (False, True):
                        got = compute_glcm(q, Offset(dx, dy), sym).counts
                        want = naive_glcm(m, data, dx, dy, sym)
                        np.testing.assert_array_equal(got, want)


class TestGlcmFeatures:
    def test_single_cell_degenerate(self):
        counts = np.zeros((4, 4), dtype=int)
        counts[3, 3] = 5
        fv = glcm_features(Glcm(4, counts))
        assert fv.contrast == 0.0
        assert fv.homogeneity == 1.0
        assert fv.entropy == 0.0
        assert fv.local_homogeneity == 1.0

    def test_two_cell_hand_values(self):
        counts = np.array([[0, 1], [1, 0]])
        fv = glcm_features(Glcm(2, counts))
        assert abs(fv.contrast - 1.0) <= 1e-12
        assert abs(fv.homogeneity - 0.5) <= 1e-12
        assert abs(fv.entropy - 0.5) <= 1e-12
        assert abs(fv.local_homogeneity - 0.5) <= 1e-12

    def test_uniform_matrix_saturates_entropy(self):
        for m in (2, 4, 16):
            fv = glcm_features(Glcm(m, np.ones((m, m), dtype=int)))
            assert abs(fv.entropy - 1.0) <= 1e-12

    def test_unnormalized_matrix_rejected(self):
        empty = Glcm(2, np.zeros((2, 2), dtype=int))  # all-zero probs
        with pytest.raises(ValidationError):
            glcm_features(empty)

    def test_raw_entropy_flag(self):
        counts = np.array([[0, 1], [1, 0]])
        raw = glcm_features(Glcm(2, counts), normalized_entropy=False)
        assert abs(raw.entropy - np.log(2)) <= 1e-12

    def test_bounds_on_random_matrices(self):
        rng = np.random.default_rng(11)
        single_cells = 0
        for _ in range(1000):
            m = int(rng.choice([2, 4, 8, 16]))
            counts = np.zeros((m, m), dtype=np.int64)
            ncells = int(rng.integers(1, m * m + 1))
            cells = rng.choice(m * m, size=ncells, replace=False)
            counts.ravel()[cells] = rng.integers(1, 50, size=ncells)
            fv = glcm_features(Glcm(m, counts))
            nonzero = (counts > 0).sum()
            assert 0 <= fv.contrast <= (m - 1) ** 2
            assert 0 < fv.homogeneity <= 1
            assert 0 <= fv.entropy <= 1
            assert 0 < fv.local_homogeneity <= 1
            # H = 1 and E = 0 exactly iff a single cell carries all mass
            assert (fv.homogeneity == 1.0) == (nonzero == 1)
            assert (fv.entropy == 0.0) == (nonzero == 1)
            if nonzero == 1:
                single_cells += 1
        assert single_cells > 0  # the iff cases were actually exercised

    def test_transposition_invariance(self):
        rng = np.random.default_rng(12)
        counts = rng.integers(0, 9, (8, 8))
        sym = counts + counts.T
        a = glcm_features(Glcm(8, sym))
        b = glcm_features(Glcm(8, sym.T))
        assert a == b


class TestPixelFeatures:
    def test_constant_window(self):
        img = GrayImage(np.full((9, 9), 0.4))
        fv = pixel_features(img, 4, 4, GlcmConfig())
        assert (fv.contrast, fv.homogeneity, fv.entropy, fv.local_homogeneity) == (0, 1, 0, 1)

    def test_fine_checker_center_has_contrast(self):
        img = generate_checkerboard(9, 9, 1, 0.0, 1.0)
        cfg = GlcmConfig(levels=16, offsets=(Offset(1, 0),), window=3, symmetric=False)
        fv = pixel_features(img, 4, 4, cfg)
        assert fv.contrast > 0.5  # alternating pairs dominate

    def test_translation_invariance(self):
        """Pixels with identical windows get identical features."""
        img = generate_checkerboard(12, 12, 1, 0.1, 0.9)
        cfg = GlcmConfig(levels=8, window=3)
        a = pixel_features(img, 4, 4, cfg)
        b = pixel_features(img, 6, 6, cfg)  # same phase of the pattern
        assert a == b

    def test_out_of_bounds_pixel(self):
        img = GrayImage(np.zeros((5, 5)))
        with pytest.raises(ValidationError):
            pixel_features(img, 5, 0, GlcmConfig())


class TestFeatureField:
    def test_constant_image(self):
        img = GrayImage(np.full((6, 7), 0.3))
        field = feature_field(img, GlcmConfig(window=3))
        np.testing.assert_array_equal(field.reshape(-1, 4),
                                      np.tile([0.0, 1.0, 0.0, 1.0], (42, 1)))

    def test_matches_pixel_features(self):
        rng = np.random.default_rng(13)
        img = GrayImage(rng.uniform(0, 1, (15, 18)))
        cfg = GlcmConfig(levels=8, window=5)
        field = feature_field(img, cfg)
        for _ in range(20):
            x = int(rng.integers(0, img.width))
            y = int(rng.integers(0, img.height))
            fv = pixel_features(img, x, y, cfg).as_array()
            np.testing.assert_allclose(field[y, x], fv, atol=1e-12, rtol=0)

    def test_phantom_wall_contrast_exceeds_background(self):
        spec = PhantomSpec(width=64, height=64, cx=31.5, cy=31.5, rx=22, ry=19,
                           wall=6, seed=4)
        img, mask = generate_phantom(spec)
        field = feature_field(img, GlcmConfig())
        wall = field[mask.labels == 1][:, 0].mean()
        background = field[mask.labels == 0][:, 0].mean()
        assert wall > background

    def test_phantom_feature_ranges(self):
        """Per-class feature rows stay in their defined ranges (the bounded
        homogeneity/entropy/local-homogeneity columns)."""
        spec = PhantomSpec(width=48, height=48, cx=23.5, cy=23.5, rx=17, ry=14,
                           wall=5, seed=6)
        img, mask = generate_phantom(spec)
        field = feature_field(img, GlcmConfig())
        for c in range(3):
            mean = field[mask.labels == c].mean(axis=0)
            assert 0.0 <= mean[1] <= 1.0
            assert 0.0 <= mean[2] <= 1.0
            assert 0.0 <= mean[3] <= 1.0
