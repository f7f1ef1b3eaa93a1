"""Feed-forward classifier for boundary (inter) vs interior (intra) pixels.

Architecture is fixed at 108 inputs -> 39 hidden -> 1 output, logistic
sigmoid on both layers. The 108 inputs are the four texture features taken
over 27 window/offset configurations (window 5, 9, 13 x pair distance
1, 2, 3 x orientation 0, 45, 90 degrees), with contrast rescaled by
(levels - 1)^2 so every entry lies in [0, 1].

Training is full-batch gradient descent on half the mean squared error,
deterministic for a given seed; backpropagation is verified against a
central-finite-difference oracle by gradient_check.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import TrainingDivergedError, ValidationError
from .glcm import GlcmConfig, Offset, feature_field, pixel_features
from .imagecore import GrayImage, LabelMask

__all__ = [
    "MlpNetwork",
    "TrainConfig",
    "RegressionStats",
    "NN_WINDOWS",
    "NN_DISTANCES",
    "NN_ANGLES",
    "nn_configs",
    "init_network",
    "forward",
    "forward_batch",
    "train",
    "gradient_check",
    "pixel_nn_features",
    "nn_feature_stack",
    "inter_intra_labels",
    "classify_inter_intra",
    "regression_stats",
    "save_network",
    "load_network",
    "save_loss_csv",
]

N_INPUTS = 108
N_HIDDEN = 39

NN_WINDOWS = (5, 9, 13)
NN_DISTANCES = (1, 2, 3)
NN_ANGLES = (0, 45, 90)

_WEIGHTS_MAGIC = "ECHOKIT-MLP 1"


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


@dataclass(frozen=True)
class MlpNetwork:
    """Weights of the 108 -> 39 -> 1 network (w2 held as a length-39 row)."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float

    def __post_init__(self):
        w1 = np.array(self.w1, dtype=np.float64)
        b1 = np.array(self.b1, dtype=np.float64)
        w2 = np.array(self.w2, dtype=np.float64)
        if w1.ndim != 2 or b1.shape != (w1.shape[0],) or w2.shape != (w1.shape[0],):
            raise ValidationError("inconsistent network shapes")
        if not (np.isfinite(w1).all() and np.isfinite(b1).all()
                and np.isfinite(w2).all() and np.isfinite(self.b2)):
            raise ValidationError("network parameters must be finite")
        for arr in (w1, b1, w2):
            arr.setflags(write=False)
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "b2", float(self.b2))

    @property
    def n_inputs(self) -> int:
        return self.w1.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.w1.shape[0]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 1000
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if not 0 < self.learning_rate <= 10:
            raise ValidationError("learning rate must be in (0, 10]")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.init_scale <= 0:
            raise ValidationError("init scale must be > 0")


@dataclass(frozen=True)
class RegressionStats:
    slope: float
    intercept: float
    r: float


def init_network(seed: int, scale: float = 0.1, n_inputs: int = N_INPUTS,
                 n_hidden: int = N_HIDDEN) -> MlpNetwork:
    """Seeded uniform(-scale, scale) weights, drawn in order w1, b1, w2, b2."""
    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-scale, scale, (n_hidden, n_inputs))
    b1 = rng.uniform(-scale, scale, n_hidden)
    w2 = rng.uniform(-scale, scale, n_hidden)
    b2 = rng.uniform(-scale, scale)
    return MlpNetwork(w1, b1, w2, b2)


def forward_batch(net: MlpNetwork, x: np.ndarray) -> np.ndarray:
    """Sigmoid outputs in (0, 1), one per row of x."""
    x = np.asarray(x, dtype=np.float64)
    a1 = _sigmoid(x @ net.w1.T + net.b1)
    return _sigmoid(a1 @ net.w2 + net.b2)


def forward(net: MlpNetwork, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.n_inputs,):
        raise ValidationError(f"input must have shape ({net.n_inputs},)")
    return float(forward_batch(net, x[None, :])[0])


def _loss(net: MlpNetwork, x: np.ndarray, y: np.ndarray) -> float:
    yhat = forward_batch(net, x)
    return 0.5 * float(np.mean((yhat - y) ** 2))


def _gradients(net: MlpNetwork, x: np.ndarray, y: np.ndarray):
    n = x.shape[0]
    a1 = _sigmoid(x @ net.w1.T + net.b1)
    yhat = _sigmoid(a1 @ net.w2 + net.b2)
    d2 = (yhat - y) / n * yhat * (1.0 - yhat)
    gw2 = d2 @ a1
    gb2 = d2.sum()
    d1 = (d2[:, None] * net.w2[None, :]) * a1 * (1.0 - a1)
    gw1 = d1.T @ x
    gb1 = d1.sum(axis=0)
    return gw1, gb1, gw2, gb2


def _check_labels(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise ValidationError("training data must be nonempty")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValidationError("labels must be 0 or 1")
    return y


def train(net: MlpNetwork, x: np.ndarray, y: np.ndarray,
          cfg: TrainConfig) -> tuple[MlpNetwork, list[float]]:
    """Full-batch gradient descent on 0.5 * mean((yhat - y)^2).

    Returns the trained network and a loss trace with one entry per epoch,
    each recorded before that epoch's update. A non-finite loss aborts.
    """
    x = np.asarray(x, dtype=np.float64)
    y = _check_labels(y)
    if x.ndim != 2 or x.shape[0] != y.shape[0] or x.shape[1] != net.n_inputs:
        raise ValidationError("training features must be (n_samples, n_inputs)")
    w1, b1 = net.w1.copy(), net.b1.copy()
    w2, b2 = net.w2.copy(), net.b2
    trace: list[float] = []
    for epoch in range(cfg.epochs):
        current = MlpNetwork(w1, b1, w2, b2)
        loss = _loss(current, x, y)
        if not np.isfinite(loss):
            raise TrainingDivergedError(
                f"loss became non-finite at epoch {epoch} (learning rate {cfg.learning_rate})")
        trace.append(loss)
        gw1, gb1, gw2, gb2 = _gradients(current, x, y)
        w1 -= cfg.learning_rate * gw1
        b1 -= cfg.learning_rate * gb1
        w2 -= cfg.learning_rate * gw2
        b2 -= cfg.learning_rate * gb2
    return MlpNetwork(w1, b1, w2, b2), trace


def _flat_params(net: MlpNetwork) -> np.ndarray:
    return np.concatenate([net.w1.ravel(), net.b1, net.w2, [net.b2]])


def _from_flat(flat: np.ndarray, n_inputs: int, n_hidden: int) -> MlpNetwork:
    s1 = n_hidden * n_inputs
    return MlpNetwork(flat[:s1].reshape(n_hidden, n_inputs),
                      flat[s1:s1 + n_hidden],
                      flat[s1 + n_hidden:s1 + 2 * n_hidden],
                      flat[-1])


def gradient_check(net: MlpNetwork, x: np.ndarray, y: np.ndarray,
                   n_params: int = 64, seed: int = 0, step: float = 1e-5) -> float:
    """Max relative error between backprop and central finite differences
    over a random subset of parameters.

    Relative error uses denominator max(|analytic|, |numeric|, 1e-8) so
    zero-gradient directions stay well behaved.
    """
    x = np.asarray(x, dtype=np.float64)
    y = _check_labels(y)
    gw1, gb1, gw2, gb2 = _gradients(net, x, y)
    analytic = np.concatenate([gw1.ravel(), gb1, gw2, [gb2]])
    flat = _flat_params(net)
    rng = np.random.default_rng(seed)
    picks = rng.choice(flat.size, size=min(n_params, flat.size), replace=False)
    worst = 0.0
    for i in picks:
        bumped = flat.copy()
        bumped[i] = flat[i] + step
        hi = _loss(_from_flat(bumped, net.n_inputs, net.n_hidden), x, y)
        bumped[i] = flat[i] - step
        lo = _loss(_from_flat(bumped, net.n_inputs, net.n_hidden), x, y)
        numeric = (hi - lo) / (2 * step)
        denom = max(abs(analytic[i]), abs(numeric), 1e-8)
        worst = max(worst, abs(analytic[i] - numeric) / denom)
    return worst


# ---------------------------------------------------------------------------
# 108-dimensional texture descriptor
# ---------------------------------------------------------------------------


def nn_configs(levels: int = 16) -> list[GlcmConfig]:
    """The 27 single-offset configurations behind the 108-entry descriptor,
    ordered window-major, then distance, then angle."""
    configs = []
    for window in NN_WINDOWS:
        for dist in NN_DISTANCES:
            for angle in NN_ANGLES:
                if angle == 0:
                    off = Offset(dist, 0)
                elif angle == 45:
                    off = Offset(dist, dist)
                else:
                    off = Offset(0, dist)
                configs.append(GlcmConfig(levels=levels, offsets=(off,),
                                          window=window, symmetric=True))
    return configs


def pixel_nn_features(img: GrayImage, x: int, y: int, levels: int = 16) -> np.ndarray:
    """108-entry descriptor of one pixel: (contrast / (levels-1)^2,
    homogeneity, entropy, local_homogeneity) per configuration."""
    scale = (levels - 1) ** 2
    out = np.empty(4 * 27, dtype=np.float64)
    for i, cfg in enumerate(nn_configs(levels)):
        fv = pixel_features(img, x, y, cfg)
        out[4 * i:4 * i + 4] = (fv.contrast / scale, fv.homogeneity,
                                fv.entropy, fv.local_homogeneity)
    return out


def nn_feature_stack(img: GrayImage, levels: int = 16) -> np.ndarray:
    """Descriptor field (height, width, 108); rows match pixel_nn_features."""
    scale = (levels - 1) ** 2
    blocks = []
    for cfg in nn_configs(levels):
        block = feature_field(img, cfg)
        block[:, :, 0] /= scale
        blocks.append(block)
    return np.concatenate(blocks, axis=2)


def inter_intra_labels(mask: LabelMask) -> np.ndarray:
    """1 where the 8-neighborhood contains another class (boundary pixel),
    0 for interior pixels."""
    lab = mask.labels
    h, w = lab.shape
    out = np.zeros((h, w), dtype=np.int64)
    shifts = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
    for dy, dx in shifts:
        ys = slice(max(0, -dy), h - max(0, dy))
        xs = slice(max(0, -dx), w - max(0, dx))
        yt = slice(max(0, dy), h - max(0, -dy))
        xt = slice(max(0, dx), w - max(0, -dx))
        diff = lab[ys, xs] != lab[yt, xt]
        out[ys, xs] |= diff
    return out


def classify_inter_intra(net: MlpNetwork, img: GrayImage, levels: int = 16) -> LabelMask:
    """Label every pixel: 1 (inter) when the network output is >= 0.5,
    else 0 (intra)."""
    stack = nn_feature_stack(img, levels)
    h, w, d = stack.shape
    yhat = forward_batch(net, stack.reshape(h * w, d))
    return LabelMask((yhat >= 0.5).astype(np.int64).reshape(h, w), n_classes=2)


def regression_stats(predicted, target) -> RegressionStats:
    """Least-squares fit of target against predicted, plus Pearson r."""
    p = np.asarray(predicted, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape or p.ndim != 1 or p.size < 2:
        raise ValidationError("need two equal-length 1-D series of length >= 2")
    sp = p - p.mean()
    st = t - t.mean()
    var_p = np.mean(sp * sp)
    var_t = np.mean(st * st)
    if var_t == 0:
        raise ValidationError("target is constant; correlation is undefined")
    if var_p == 0:
        raise ValidationError("predicted is constant; correlation is undefined")
    cov = np.mean(sp * st)
    slope = cov / var_p
    intercept = t.mean() - slope * p.mean()
    r = cov / np.sqrt(var_p * var_t)
    return RegressionStats(float(slope), float(intercept), float(r))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def save_network(net: MlpNetwork, path) -> None:
    """Versioned text format: magic line, shape line, then one parameter per
    line in the order w1 (row-major), b1, w2, b2."""
    lines = [_WEIGHTS_MAGIC, f"{net.n_inputs} {net.n_hidden} 1"]
    lines.extend(repr(float(v)) for v in _flat_params(net))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_network(path) -> MlpNetwork:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or lines[0] != _WEIGHTS_MAGIC:
        raise ValidationError(f"not an echokit network file: {path}")
    try:
        n_inputs, n_hidden, n_out = (int(v) for v in lines[1].split())
        flat = np.array([float(v) for v in lines[2:] if v], dtype=np.float64)
    except (IndexError, ValueError):
        raise ValidationError(f"malformed network file: {path}") from None
    if n_out != 1 or flat.size != n_hidden * n_inputs + 2 * n_hidden + 1:
        raise ValidationError(f"network file has wrong parameter count: {path}")
    return _from_flat(flat, n_inputs, n_hidden)


def save_loss_csv(trace: list[float], path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write("epoch,loss\n")
        for i, v in enumerate(trace):
            f.write(f"{i},{v!r}\n")
