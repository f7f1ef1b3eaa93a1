"""KNN pixel classification over texture features.

Training vectors are min-max scaled to [0, 1] per dimension (bounds learned
from the training sample); queries are scaled with the same bounds and
clamped. Prediction takes the k nearest samples under the configured metric
with fully deterministic tie handling:

    distance ties   -> lower training-sample index wins a neighbor slot
    vote ties       -> smaller mean neighbor distance, then smaller class id
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ValidationError
from .glcm import FEATURE_NAMES, GlcmConfig, feature_field
from .imagecore import GrayImage, LabelMask

__all__ = [
    "DistanceMetric",
    "TrainingSet",
    "KnnModel",
    "build_training_set",
    "distance",
    "predict",
    "predict_field",
    "segment",
    "postprocess",
    "save_training_csv",
    "load_training_csv",
]

_METRIC_KINDS = ("euclidean", "chi_square", "cosine", "minkowski")
_CHI_DELTA = 1e-12


@dataclass(frozen=True)
class DistanceMetric:
    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in _METRIC_KINDS:
            raise ValidationError(f"unknown metric {self.kind!r}; choose from {_METRIC_KINDS}")
        if self.kind == "minkowski":
            if self.p is None or not np.isfinite(self.p) or self.p < 1:
                raise ValidationError("minkowski metric needs a finite exponent p >= 1")
        elif self.p is not None:
            raise ValidationError(f"metric {self.kind!r} takes no exponent")


@dataclass(frozen=True)
class TrainingSet:
    """Feature vectors with class labels plus per-dimension scaling bounds."""

    features: np.ndarray
    labels: np.ndarray
    feature_min: np.ndarray
    feature_max: np.ndarray

    def __post_init__(self):
        f = np.array(self.features, dtype=np.float64)
        y = np.array(self.labels, dtype=np.int64)
        lo = np.array(self.feature_min, dtype=np.float64)
        hi = np.array(self.feature_max, dtype=np.float64)
        if f.ndim != 2 or f.shape[0] < 1:
            raise ValidationError("training features must be a nonempty 2-D array")
        if y.shape != (f.shape[0],) or y.min() < 0:
            raise ValidationError("labels must be nonnegative, one per sample")
        if lo.shape != (f.shape[1],) or hi.shape != (f.shape[1],) or (lo > hi).any():
            raise ValidationError("scaling bounds must satisfy min <= max per dimension")
        for arr in (f, y, lo, hi):
            arr.setflags(write=False)
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_min", lo)
        object.__setattr__(self, "feature_max", hi)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1

    def scale(self, x: np.ndarray, clamp: bool) -> np.ndarray:
        """Min-max scale rows of x with the stored bounds; constant
        dimensions map to 0."""
        span = self.feature_max - self.feature_min
        safe = np.where(span > 0, span, 1.0)
        s = (np.asarray(x, dtype=np.float64) - self.feature_min) / safe
        s = np.where(span > 0, s, 0.0)
        return np.clip(s, 0.0, 1.0) if clamp else s


@dataclass(frozen=True)
class KnnModel:
    training: TrainingSet
    k: int = 5
    metric: DistanceMetric = DistanceMetric("euclidean")

    def __post_init__(self):
        if not 1 <= self.k <= self.training.n_samples:
            raise ValidationError(f"k must be in [1, {self.training.n_samples}]")
        scaled = self.training.scale(self.training.features, clamp=False)
        scaled.setflags(write=False)
        object.__setattr__(self, "_scaled", scaled)


def build_training_set(features: np.ndarray, mask: LabelMask, per_class: int,
                       seed: int) -> TrainingSet:
    """Sample per_class pixels of each class (uniform, without replacement,
    seeded) and record per-dimension min/max over the sampled vectors."""
    if per_class < 1:
        raise ValidationError("per_class must be >= 1")
    h, w, d = features.shape
    if (h, w) != (mask.height, mask.width):
        raise ValidationError("feature field and mask dimensions differ")
    flat_feats = features.reshape(h * w, d)
    flat_labels = mask.labels.ravel()
    rng = np.random.default_rng(seed)
    picked_x = []
    picked_y = []
    for c in range(mask.n_classes):
        idx = np.flatnonzero(flat_labels == c)
        if len(idx) == 0:
            raise ValidationError(f"class {c} is absent from the mask")
        if len(idx) < per_class:
            raise ValidationError(
                f"class {c} has only {len(idx)} pixels, fewer than per_class={per_class}")
        chosen = rng.choice(idx, size=per_class, replace=False)
        picked_x.append(flat_feats[chosen])
        picked_y.append(np.full(per_class, c, dtype=np.int64))
    x = np.concatenate(picked_x)
    y = np.concatenate(picked_y)
    return TrainingSet(x, y, x.min(axis=0), x.max(axis=0))


def _pairwise(queries: np.ndarray, samples: np.ndarray, metric: DistanceMetric) -> np.ndarray:
    """Distance matrix (n_queries, n_samples); inputs are scaled features."""
    q = queries[:, None, :]
    s = samples[None, :, :]
    if metric.kind == "euclidean":
        return np.sqrt(((q - s) ** 2).sum(axis=-1))
    if metric.kind == "minkowski":
        return (np.abs(q - s) ** metric.p).sum(axis=-1) ** (1.0 / metric.p)
    if metric.kind == "chi_square":
        return ((q - s) ** 2 / (q + s + _CHI_DELTA)).sum(axis=-1)
    # cosine: zero vectors have no direction; two zeros count as identical
    dots = (q * s).sum(axis=-1)
    qn = np.sqrt((queries * queries).sum(axis=1))
    sn = np.sqrt((samples * samples).sum(axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 1.0 - dots / (qn[:, None] * sn[None, :])
    both_zero = (qn[:, None] == 0) & (sn[None, :] == 0)
    one_zero = ((qn[:, None] == 0) | (sn[None, :] == 0)) & ~both_zero
    d = np.where(both_zero, 0.0, d)
    return np.where(one_zero, 1.0, d)


def distance(a: np.ndarray, b: np.ndarray, metric: DistanceMetric) -> float:
    """Distance between two scaled feature vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError("feature vectors must be 1-D with equal length")
    return float(_pairwise(a[None, :], b[None, :], metric)[0, 0])


def _predict_scaled(model: KnnModel, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vote over the k nearest scaled training samples for each query row.

    Returns (labels, neighbor distance rows sorted ascending).
    """
    dmat = _pairwise(queries, model._scaled, model.metric)
    order = np.argsort(dmat, axis=1, kind="stable")[:, :model.k]
    ndist = np.take_along_axis(dmat, order, axis=1)
    nlab = model.training.labels[order]

    nq = queries.shape[0]
    nc = model.training.n_classes
    rows = np.repeat(np.arange(nq), model.k)
    counts = np.zeros((nq, nc), dtype=np.int64)
    np.add.at(counts, (rows, nlab.ravel()), 1)
    dist_sum = np.zeros((nq, nc), dtype=np.float64)
    np.add.at(dist_sum, (rows, nlab.ravel()), ndist.ravel())
    with np.errstate(invalid="ignore"):
        mean_dist = dist_sum / counts
    mean_dist[counts == 0] = np.inf

    top = counts.max(axis=1, keepdims=True)
    candidate_dist = np.where(counts == top, mean_dist, np.inf)
    labels = np.argmin(candidate_dist, axis=1)  # argmin takes the lowest class id on ties
    return labels.astype(np.int64), ndist


def predict(model: KnnModel, query: np.ndarray) -> tuple[int, np.ndarray]:
    """Classify one feature vector; also returns its k neighbor distances."""
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != model.training.features.shape[1]:
        raise ValidationError("query dimensionality does not match the training set")
    scaled = model.training.scale(q[None, :], clamp=True)
    labels, ndist = _predict_scaled(model, scaled)
    return int(labels[0]), ndist[0]


def predict_field(model: KnnModel, features: np.ndarray, chunk: int = 4096) -> LabelMask:
    """Classify every pixel of a feature field (height, width, d)."""
    h, w, d = features.shape
    if d != model.training.features.shape[1]:
        raise ValidationError("feature field dimensionality does not match the training set")
    flat = model.training.scale(features.reshape(h * w, d), clamp=True)
    out = np.empty(h * w, dtype=np.int64)
    for start in range(0, h * w, chunk):
        out[start:start + chunk] = _predict_scaled(model, flat[start:start + chunk])[0]
    return LabelMask(out.reshape(h, w), n_classes=model.training.n_classes)


def segment(img: GrayImage, model: KnnModel, cfg: GlcmConfig) -> LabelMask:
    """Whole-image segmentation: texture features at every pixel, then KNN."""
    return predict_field(model, feature_field(img, cfg))


def postprocess(mask: LabelMask, min_area: int, foreground: int) -> LabelMask:
    """Clean a segmentation: 8-connected foreground components smaller than
    min_area are reassigned to the majority label of their boundary
    neighbors, then interior holes of surviving components are filled.

    Idempotent: a second application changes nothing.
    """
    if min_area < 0:
        raise ValidationError("min_area must be >= 0")
    if not 0 <= foreground < mask.n_classes:
        raise ValidationError(f"unknown class id {foreground} (mask has {mask.n_classes} classes)")
    labels = mask.labels.copy()
    eight = np.ones((3, 3), dtype=bool)
    comp, ncomp = ndimage.label(labels == foreground, structure=eight)
    areas = np.bincount(comp.ravel(), minlength=ncomp + 1)
    for c in range(1, ncomp + 1):
        if areas[c] >= min_area:
            continue
        region = comp == c
        ring = ndimage.binary_dilation(region, structure=eight) & ~region
        neighbor_labels = labels[ring]
        if neighbor_labels.size == 0:  # component covers the whole image
            continue
        labels[region] = np.bincount(neighbor_labels).argmax()
    fg = labels == foreground
    filled = ndimage.binary_fill_holes(fg)
    labels[filled] = foreground
    return LabelMask(labels, n_classes=mask.n_classes)


def save_training_csv(training: TrainingSet, path) -> None:
    """CSV with one sample per row: feature columns then the class label."""
    d = training.features.shape[1]
    names = list(FEATURE_NAMES) if d == len(FEATURE_NAMES) else [f"f{i}" for i in range(d)]
    with open(path, "w", encoding="ascii", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(names + ["label"])
        for row, label in zip(training.features, training.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def load_training_csv(path) -> TrainingSet:
    """Rebuild a TrainingSet saved by save_training_csv (bounds recomputed
    from the rows, which is what build_training_set records anyway)."""
    feats = []
    labels = []
    with open(path, "r", encoding="ascii", newline="") as f:
        for r in csv.reader(f):
            if not r:
                continue
            try:
                label = int(r[-1])
            except ValueError:
                continue  # header row
            feats.append([float(v) for v in r[:-1]])
            labels.append(label)
    if not feats:
        raise ValidationError(f"no training rows found in {path}")
    x = np.asarray(feats, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    return TrainingSet(x, y, x.min(axis=0), x.max(axis=0))
