"""Multiplicative speckle synthesis and log-domain decoupling.

A speckled image is clean * noise pixelwise; taking logarithms turns the
multiplicative corruption into an additive one, which is what the
fractional-integral filter smooths out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .imagecore import GrayImage

__all__ = ["SpeckleParams", "apply_speckle", "log_transform", "exp_transform", "DEFAULT_EPS"]

DEFAULT_EPS = 1e-6


@dataclass(frozen=True)
class SpeckleParams:
    """Gaussian multiplier model: n = max(floor, 1 + sigma * u), u ~ N(0, 1).

    The floor keeps multipliers positive so the log transform stays defined.
    The generator is numpy's seeded PCG64 (np.random.default_rng), so equal
    seeds give bit-identical noise within one build.
    """

    sigma: float
    seed: int
    floor: float = 0.05

    def __post_init__(self):
        if self.sigma < 0:
            raise ValidationError("sigma must be >= 0")
        if not 0.0 < self.floor <= 1.0:
            raise ValidationError("floor must be in (0, 1]")


def apply_speckle(img: GrayImage, params: SpeckleParams) -> GrayImage:
    """Multiply each pixel by seeded speckle noise, clamping back to [0, 1].

    sigma = 0 reproduces the input exactly.
    """
    rng = np.random.default_rng(params.seed)
    u = rng.standard_normal(img.data.shape)
    n = np.maximum(params.floor, 1.0 + params.sigma * u)
    return GrayImage(np.clip(img.data * n, 0.0, 1.0))


def log_transform(img: GrayImage, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Elementwise ln(intensity + eps); the result may be negative.

    eps = 0 is allowed only when every pixel is strictly positive.
    """
    if eps < 0:
        raise ValidationError("eps must be >= 0")
    if eps == 0 and img.data.min() <= 0:
        raise ValidationError("eps may be 0 only for strictly positive images")
    return np.log(img.data + eps)


def exp_transform(field: np.ndarray, eps: float = DEFAULT_EPS) -> GrayImage:
    """Inverse of log_transform with the same eps: clamp(exp(f) - eps, 0, 1)."""
    if eps < 0:
        raise ValidationError("eps must be >= 0")
    return GrayImage(np.clip(np.exp(np.asarray(field, dtype=np.float64)) - eps, 0.0, 1.0))
