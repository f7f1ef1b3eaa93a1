"""Image-quality and classification metrics.

All ratios use MAX = 1.0 (the internal intensity convention). PSNR and SNR
are reported in dB and clamped to [-99, 99]; zero error maps to the 99 dB
cap rather than infinity. SSIM averages the classic luminance/contrast/
structure product over every 8x8 window (stride 1, uniform weights,
population statistics, C1 = 0.01^2, C2 = 0.03^2). LMSE is the Laplacian
mean squared error normalized by the reference Laplacian energy, evaluated
on interior pixels with the 4-neighbor kernel. Undefined values are carried
as None and serialize to JSON null.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .imagecore import GrayImage, LabelMask

__all__ = ["QualityReport", "ConfusionStats", "quality_report", "confusion_stats"]

_DB_CAP = 99.0
_SSIM_WINDOW = 8
_C1 = 0.01 ** 2
_C2 = 0.03 ** 2


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr_db: float
    snr_db: float
    ssim: float
    lmse: float | None
    residual_variance: float

    def to_dict(self) -> dict:
        return {
            "mse": self.mse,
            "psnr_db": self.psnr_db,
            "snr_db": self.snr_db,
            "ssim": self.ssim,
            "lmse": self.lmse,
            "residual_variance": self.residual_variance,
        }


@dataclass(frozen=True)
class ConfusionStats:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float | None
    sensitivity: float | None
    specificity: float | None

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
        }


def _window_sums(a: np.ndarray, size: int) -> np.ndarray:
    """Sums of all size x size windows (stride 1) via an integral image."""
    c = np.cumsum(np.cumsum(a, axis=0), axis=1)
    c = np.pad(c, ((1, 0), (1, 0)))
    return (c[size:, size:] - c[:-size, size:]
            - c[size:, :-size] + c[:-size, :-size])


def _ssim(ref: np.ndarray, proc: np.ndarray) -> float:
    n = _SSIM_WINDOW * _SSIM_WINDOW
    sx = _window_sums(ref, _SSIM_WINDOW)
    sy = _window_sums(proc, _SSIM_WINDOW)
    sxx = _window_sums(ref * ref, _SSIM_WINDOW)
    syy = _window_sums(proc * proc, _SSIM_WINDOW)
    sxy = _window_sums(ref * proc, _SSIM_WINDOW)
    mx = sx / n
    my = sy / n
    vx = sxx / n - mx * mx
    vy = syy / n - my * my
    cov = sxy / n - mx * my
    num = (2 * mx * my + _C1) * (2 * cov + _C2)
    den = (mx * mx + my * my + _C1) * (vx + vy + _C2)
    return float(np.mean(num / den))


def _laplacian(a: np.ndarray) -> np.ndarray:
    """4-neighbor Laplacian on interior pixels."""
    return (a[:-2, 1:-1] + a[2:, 1:-1] + a[1:-1, :-2] + a[1:-1, 2:]
            - 4.0 * a[1:-1, 1:-1])


def quality_report(ref: GrayImage, proc: GrayImage) -> QualityReport:
    """Compare a processed image against its reference.

    Identical images give mse 0, psnr 99, snr 99, ssim 1, lmse 0, and zero
    residual variance.
    """
    if (ref.height, ref.width) != (proc.height, proc.width):
        raise ValidationError("images must have equal dimensions")
    if ref.height < _SSIM_WINDOW or ref.width < _SSIM_WINDOW:
        raise ValidationError(f"images must be at least {_SSIM_WINDOW}x{_SSIM_WINDOW} for SSIM")
    a = ref.data
    b = proc.data
    residual = a - b

    mse = float(np.mean(residual ** 2))
    psnr = _DB_CAP if mse == 0 else min(_DB_CAP, 10.0 * np.log10(1.0 / mse))

    err_energy = float(np.sum(residual ** 2))
    ref_energy = float(np.sum(a ** 2))
    if err_energy == 0:
        snr = _DB_CAP
    elif ref_energy == 0:
        snr = -_DB_CAP
    else:
        snr = float(np.clip(10.0 * np.log10(ref_energy / err_energy), -_DB_CAP, _DB_CAP))

    ssim = _ssim(a, b)

    dref = _laplacian(a)
    dproc = _laplacian(b)
    lap_energy = float(np.sum(dref ** 2))
    lmse = None if lap_energy == 0 else float(np.sum((dref - dproc) ** 2) / lap_energy)

    return QualityReport(mse=mse, psnr_db=float(psnr), snr_db=float(snr), ssim=ssim,
                         lmse=lmse, residual_variance=float(np.var(residual)))


def confusion_stats(pred: LabelMask, truth: LabelMask, positive: int) -> ConfusionStats:
    """Pixel-wise binary confusion counts treating `positive` as the positive
    class and every other label as negative. Rates with zero denominators
    are reported as None."""
    if (pred.height, pred.width) != (truth.height, truth.width):
        raise ValidationError("masks must have equal dimensions")
    if not (truth.labels == positive).any():
        raise ValidationError(f"positive class {positive} absent from the truth mask")
    p = pred.labels == positive
    t = truth.labels == positive
    tp = int(np.sum(p & t))
    tn = int(np.sum(~p & ~t))
    fp = int(np.sum(p & ~t))
    fn = int(np.sum(~p & t))
    total = tp + tn + fp + fn
    accuracy = (tp + tn) / total if total else None
    sensitivity = tp / (tp + fn) if (tp + fn) else None
    specificity = tn / (tn + fp) if (tn + fp) else None
    return ConfusionStats(tp, tn, fp, fn, accuracy, sensitivity, specificity)
