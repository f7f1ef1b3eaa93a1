"""Gray-level co-occurrence matrices and the four texture features.

A co-occurrence matrix counts ordered pairs of quantized gray levels
(i, j) found at pixel positions (s, s + t) for a fixed translation t.
From its normalized probabilities p(i, j) we compute:

    contrast          sum (i - j)^2 * p(i, j)
    homogeneity       sum p(i, j)^2                (a.k.a. energy / ASM)
    entropy           -sum p * log2(p) / log2(m^2) (normalized to [0, 1])
    local homogeneity sum p(i, j) / (1 + (i - j)^2)

Features are also available as per-pixel fields over sliding windows with
edge replication at the borders.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .imagecore import GrayImage, QuantizedImage, quantize_array

__all__ = [
    "Offset",
    "Glcm",
    "FeatureVector",
    "GlcmConfig",
    "FEATURE_NAMES",
    "DEFAULT_OFFSETS",
    "compute_glcm",
    "glcm_features",
    "pixel_features",
    "feature_field",
    "write_feature_csv",
]

FEATURE_NAMES = ("contrast", "homogeneity", "entropy", "local_homogeneity")


@dataclass(frozen=True)
class Offset:
    """Translation vector (dx, dy): dx shifts columns, dy shifts rows."""

    dx: int
    dy: int

    def __post_init__(self):
        if self.dx == 0 and self.dy == 0:
            raise ValidationError("offset must not be (0, 0)")


DEFAULT_OFFSETS = (Offset(1, 0), Offset(0, 1), Offset(1, 1), Offset(1, -1))


@dataclass(frozen=True)
class Glcm:
    """m x m pair counts plus their normalized probabilities."""

    levels: int
    counts: np.ndarray
    probs: np.ndarray = field(init=False)

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.shape != (self.levels, self.levels) or (c < 0).any():
            raise ValidationError("counts must be a nonnegative levels x levels matrix")
        total = c.sum()
        p = c / total if total > 0 else np.zeros_like(c, dtype=np.float64)
        c.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class FeatureVector:
    contrast: float
    homogeneity: float
    entropy: float
    local_homogeneity: float

    def as_array(self) -> np.ndarray:
        return np.array([self.contrast, self.homogeneity, self.entropy, self.local_homogeneity])


@dataclass(frozen=True)
class GlcmConfig:
    """Settings for per-pixel texture extraction."""

    levels: int = 16
    offsets: tuple[Offset, ...] = DEFAULT_OFFSETS
    window: int = 9
    symmetric: bool = True

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(self.offsets))
        if not 2 <= self.levels <= 256:
            raise ValidationError("levels must be in [2, 256]")
        if self.window < 3 or self.window % 2 == 0:
            raise ValidationError("window must be odd and >= 3")
        if not self.offsets:
            raise ValidationError("need at least one offset")
        for off in self.offsets:
            if abs(off.dx) >= self.window or abs(off.dy) >= self.window:
                raise ValidationError(f"offset ({off.dx}, {off.dy}) exceeds the window span")


def compute_glcm(qimg: QuantizedImage, offset: Offset, symmetric: bool = False) -> Glcm:
    """Count gray-level pairs (I(s), I(s + t)) over all in-bounds positions.

    With symmetric=True, counts for (i, j) and (j, i) are merged, making the
    matrix invariant to reversing the translation direction.
    """
    dx, dy = offset.dx, offset.dy
    h, w = qimg.height, qimg.width
    if abs(dx) >= w or abs(dy) >= h:
        raise ValidationError(f"offset ({dx}, {dy}) larger than the {w}x{h} image")
    a = qimg.data
    src = a[max(0, -dy):h - max(0, dy), max(0, -dx):w - max(0, dx)]
    dst = a[max(0, dy):h - max(0, -dy), max(0, dx):w - max(0, -dx)]
    m = qimg.levels
    codes = src.ravel() * m + dst.ravel()
    counts = np.bincount(codes, minlength=m * m).reshape(m, m)
    if symmetric:
        counts = counts + counts.T
    return Glcm(m, counts)


def _features_from_probs(p: np.ndarray, normalized_entropy: bool = True) -> FeatureVector:
    m = p.shape[0]
    idx = np.arange(m)
    d2 = (idx[:, None] - idx[None, :]) ** 2
    contrast = float(np.sum(p * d2))
    homogeneity = float(np.sum(p * p))
    nz = p[p > 0]
    if normalized_entropy:
        entropy = float(-np.sum(nz * np.log2(nz)) / np.log2(m * m))
    else:
        entropy = float(-np.sum(nz * np.log(nz)))
    local_h = float(np.sum(p / (1.0 + d2)))
    return FeatureVector(contrast, homogeneity, entropy, local_h)


def glcm_features(glcm: Glcm, normalized_entropy: bool = True) -> FeatureVector:
    """Texture features of a normalized co-occurrence matrix.

    normalized_entropy=False reports raw natural-log Shannon entropy instead
    of the [0, 1]-normalized base-2 value.
    """
    total = glcm.probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"matrix is not normalized (probabilities sum to {total})")
    return _features_from_probs(glcm.probs, normalized_entropy)


def _padded_levels(img: GrayImage, cfg: GlcmConfig) -> np.ndarray:
    half = cfg.window // 2
    padded = np.pad(img.data, half, mode="edge")
    return quantize_array(padded, cfg.levels)


def pixel_features(img: GrayImage, x: int, y: int, cfg: GlcmConfig) -> FeatureVector:
    """Texture features of the window centered at (x, y).

    The window is edge-replicated at borders, quantized, and its GLCMs over
    all configured offsets are averaged (as probabilities) before feature
    extraction.
    """
    if not (0 <= x < img.width and 0 <= y < img.height):
        raise ValidationError(f"pixel ({x}, {y}) outside {img.width}x{img.height} image")
    q = _padded_levels(img, cfg)
    win = QuantizedImage(cfg.levels, q[y:y + cfg.window, x:x + cfg.window])
    acc = np.zeros((cfg.levels, cfg.levels), dtype=np.float64)
    for off in cfg.offsets:
        acc += compute_glcm(win, off, cfg.symmetric).probs
    return _features_from_probs(acc / len(cfg.offsets))


def feature_field(img: GrayImage, cfg: GlcmConfig) -> np.ndarray:
    """Per-pixel FeatureVector field, shape (height, width, 4).

    Channel order follows FEATURE_NAMES. Equivalent to calling
    pixel_features at every pixel, but computed with shared windowed
    histograms (bincount over per-window pair codes) for speed.
    """
    h, w = img.height, img.width
    m = cfg.levels
    q = _padded_levels(img, cfg)
    npix = h * w
    acc = np.zeros((npix, m * m), dtype=np.float64)
    transpose_perm = (np.arange(m * m) % m) * m + np.arange(m * m) // m

    for off in cfg.offsets:
        dx, dy = off.dx, off.dy
        ph, pw = q.shape
        src = q[max(0, -dy):ph - max(0, dy), max(0, -dx):pw - max(0, dx)]
        dst = q[max(0, dy):ph - max(0, -dy), max(0, dx):pw - max(0, -dx)]
        codes = src * m + dst
        win_h = cfg.window - abs(dy)
        win_w = cfg.window - abs(dx)
        views = np.lib.stride_tricks.sliding_window_view(codes, (win_h, win_w))[:h, :w]
        flat = views.reshape(npix, win_h * win_w)
        combined = np.arange(npix, dtype=np.int64)[:, None] * (m * m) + flat
        hist = np.bincount(combined.ravel(), minlength=npix * m * m).reshape(npix, m * m)
        pairs = win_h * win_w
        if cfg.symmetric:
            hist = hist + hist[:, transpose_perm]
            pairs *= 2
        acc += hist / pairs
    acc /= len(cfg.offsets)

    idx = np.arange(m)
    d2 = ((idx[:, None] - idx[None, :]) ** 2).ravel().astype(np.float64)
    contrast = acc @ d2
    homogeneity = np.einsum("ij,ij->i", acc, acc)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(acc > 0, acc * np.log2(np.where(acc > 0, acc, 1.0)), 0.0)
    entropy = -plogp.sum(axis=1) / np.log2(m * m)
    local_h = acc @ (1.0 / (1.0 + d2))
    out = np.stack([contrast, homogeneity, entropy, local_h], axis=1)
    return out.reshape(h, w, 4)


def write_feature_csv(field_arr: np.ndarray, path) -> None:
    """Dump a feature field as CSV rows: x, y, contrast, homogeneity,
    entropy, local_homogeneity."""
    h, w, _ = field_arr.shape
    with open(path, "w", encoding="ascii") as f:
        f.write("x,y," + ",".join(FEATURE_NAMES) + "\n")
        for y in range(h):
            for x in range(w):
                vals = ",".join(repr(float(v)) for v in field_arr[y, x])
                f.write(f"{x},{y},{vals}\n")
