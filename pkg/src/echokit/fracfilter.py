"""Fractional-order integral denoising.

The filter is a mean-preserving convolution mask whose weights follow the
Grunwald-Letnikov fractional-integral recurrence

    w_0 = 1,  w_k = w_{k-1} * (k - 1 + v) / k      (0 < v <= 1),

laid out along the 8 compass directions of a 3x3 or 5x5 neighborhood and
applied in the log domain, where speckle is additive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ValidationError
from .imagecore import GrayImage
from .noise import DEFAULT_EPS, exp_transform, log_transform

__all__ = ["FracParams", "Mask", "gl_coefficients", "build_mask", "denoise"]

_DIRECTIONS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class FracParams:
    """Fractional order v in (0, 1], mask size 3 or 5, log-domain epsilon."""

    order: float = 0.5
    mask_size: int = 3
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not 0.0 < self.order <= 1.0:
            raise ValidationError("fractional order must be in (0, 1]")
        if self.mask_size not in (3, 5):
            raise ValidationError("mask size must be 3 or 5")
        if self.eps <= 0:
            raise ValidationError("eps must be > 0")


@dataclass(frozen=True)
class Mask:
    """Square convolution mask; weights sum to 1 and are centrally symmetric."""

    size: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.shape != (self.size, self.size) or self.size % 2 == 0:
            raise ValidationError("mask must be square with odd size")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError("mask weights must sum to 1")
        if not np.allclose(w, w[::-1, ::-1], rtol=0, atol=0):
            raise ValidationError("mask must be centrally symmetric")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def gl_coefficients(order: float, count: int) -> np.ndarray:
    """First `count` fractional-integral weights for the given order.

    Matches the closed form Gamma(k + v) / (Gamma(v) * k!); order 1 gives
    all ones (a running sum).
    """
    if not 0.0 < order <= 1.0:
        raise ValidationError("fractional order must be in (0, 1]")
    if count < 1:
        raise ValidationError("count must be >= 1")
    w = np.empty(count, dtype=np.float64)
    w[0] = 1.0
    for k in range(1, count):
        w[k] = w[k - 1] * (k - 1 + order) / k
    return w


def build_mask(params: FracParams) -> Mask:
    """Place w_k at distance k along all 8 compass directions (the center
    takes w_0 once), then normalize the whole mask to unit sum."""
    r = (params.mask_size - 1) // 2
    w = gl_coefficients(params.order, r + 1)
    m = np.zeros((params.mask_size, params.mask_size), dtype=np.float64)
    m[r, r] = w[0]
    for k in range(1, r + 1):
        for dy, dx in _DIRECTIONS:
            m[r + k * dy, r + k * dx] = w[k]
    return Mask(params.mask_size, m / m.sum())


def denoise(img: GrayImage, params: FracParams) -> GrayImage:
    """log -> fractional-mask convolution (edge-replicated) -> exp.

    A constant image is a fixed point; output always stays in [0, 1].
    """
    if img.width < params.mask_size or img.height < params.mask_size:
        raise ValidationError(
            f"image {img.width}x{img.height} is smaller than the {params.mask_size}x{params.mask_size} mask")
    mask = build_mask(params)
    field = log_transform(img, params.eps)
    smoothed = ndimage.correlate(field, mask.weights, mode="nearest")
    return exp_transform(smoothed, params.eps)
