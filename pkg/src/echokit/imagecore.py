"""Grayscale image containers, quantization, PGM/PNG codecs, synthetic inputs.

Pixel data lives in float64 on [0, 1]; file I/O maps 8-bit values through
value / 255. Arrays are row-major with shape (height, width) and are frozen
after construction, so every container is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptImageError, UnsupportedFormatError, ValidationError

__all__ = [
    "GrayImage",
    "QuantizedImage",
    "LabelMask",
    "PhantomSpec",
    "load_image",
    "save_image",
    "load_mask",
    "save_mask",
    "quantize",
    "quantize_array",
    "generate_checkerboard",
    "checkerboard_mask",
    "generate_phantom",
]

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GrayImage:
    """2-D field of real intensities in [0, 1], stored as (height, width)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError("image data must be 2-D with nonzero dimensions")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("image intensities must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValidationError("image intensities must lie in [0, 1]")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class QuantizedImage:
    """Image reduced to integer gray levels 0..levels-1 by uniform binning."""

    levels: int
    data: np.ndarray

    def __post_init__(self):
        if not 2 <= self.levels <= 256:
            raise ValidationError("levels must be in [2, 256]")
        arr = np.array(self.data, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError("quantized data must be 2-D with nonzero dimensions")
        if arr.min() < 0 or arr.max() >= self.levels:
            raise ValidationError("quantized values must lie in [0, levels)")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class LabelMask:
    """Per-pixel class ids drawn from the contiguous universe 0..n_classes-1."""

    labels: np.ndarray
    n_classes: int = 0  # 0 means "infer as max label + 1"

    def __post_init__(self):
        arr = np.array(self.labels, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError("label data must be 2-D with nonzero dimensions")
        if arr.min() < 0:
            raise ValidationError("class ids must be nonnegative")
        n = self.n_classes if self.n_classes else int(arr.max()) + 1
        if arr.max() >= n:
            raise ValidationError("class id exceeds declared class count")
        object.__setattr__(self, "labels", _freeze(arr))
        object.__setattr__(self, "n_classes", n)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True)
class PhantomSpec:
    """Synthetic three-class echo stand-in: background, bright elliptical
    wall ring, dark interior chamber.

    Each class carries its own texture so that texture features (not just
    mean intensity) can separate the classes: background and wall get
    per-pixel noise of the given amplitude, the chamber gets 2x2-block
    noise, which survives mild smoothing. Fully determined by the spec,
    including the seed.
    """

    width: int
    height: int
    cx: float
    cy: float
    rx: float
    ry: float
    wall: float
    intensities: tuple[float, float, float] = (0.53, 0.82, 0.22)
    texture: tuple[float, float, float] = (0.005, 0.25, 0.14)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "intensities", tuple(float(v) for v in self.intensities))
        object.__setattr__(self, "texture", tuple(float(v) for v in self.texture))
        if self.width < 1 or self.height < 1:
            raise ValidationError("phantom dimensions must be positive")
        if len(self.intensities) != 3 or len(self.texture) != 3:
            raise ValidationError("phantom needs exactly 3 class intensities and 3 texture amplitudes")
        if not all(0.0 <= v <= 1.0 for v in self.intensities):
            raise ValidationError("class intensities must lie in [0, 1]")
        pairs = [(0, 1), (0, 2), (1, 2)]
        if any(abs(self.intensities[a] - self.intensities[b]) < 0.1 for a, b in pairs):
            raise ValidationError("class intensities must be pairwise distinct by >= 0.1")
        if self.wall <= 0 or self.rx - self.wall < 1 or self.ry - self.wall < 1:
            raise ValidationError("wall thickness must leave a chamber semi-axis of at least 1 px")
        if (self.cx - self.rx < 0 or self.cx + self.rx > self.width - 1
                or self.cy - self.ry < 0 or self.cy + self.ry > self.height - 1):
            raise ValidationError("ring does not fit inside the image bounds")


# ---------------------------------------------------------------------------
# PGM / PNG codecs
# ---------------------------------------------------------------------------

_WHITESPACE = b" \t\r\n\x0b\x0c"


def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    """Scan the next PGM header token, skipping whitespace and # comments."""
    n = len(buf)
    while pos < n:
        c = buf[pos:pos + 1]
        if c in _WHITESPACE:
            pos += 1
        elif c == b"#":
            while pos < n and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    if pos >= n:
        raise CorruptImageError("unexpected end of PGM header")
    start = pos
    while pos < n and buf[pos:pos + 1] not in _WHITESPACE and buf[pos:pos + 1] != b"#":
        pos += 1
    return buf[start:pos], pos


def _header_int(buf: bytes, pos: int, what: str) -> tuple[int, int]:
    token, pos = _next_token(buf, pos)
    try:
        value = int(token)
    except ValueError:
        raise CorruptImageError(f"PGM {what} is not an integer: {token!r}") from None
    if value <= 0:
        raise CorruptImageError(f"PGM {what} must be positive, got {value}")
    return value, pos


def _load_pgm(buf: bytes) -> GrayImage:
    magic, pos = _next_token(buf, 0)
    width, pos = _header_int(buf, pos, "width")
    height, pos = _header_int(buf, pos, "height")
    maxval, pos = _header_int(buf, pos, "maxval")
    if maxval != 255:
        raise UnsupportedFormatError(f"only 8-bit PGM (maxval 255) is supported, got maxval {maxval}")
    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from raw samples
        if pos >= len(buf) or buf[pos:pos + 1] not in _WHITESPACE:
            raise CorruptImageError("missing whitespace after PGM maxval")
        raw = buf[pos + 1:pos + 1 + count]
        if len(raw) < count:
            raise CorruptImageError(f"PGM body truncated: expected {count} bytes, found {len(raw)}")
        values = np.frombuffer(raw, dtype=np.uint8).astype(np.float64)
    else:  # P2
        values = np.empty(count, dtype=np.float64)
        for i in range(count):
            try:
                token, pos = _next_token(buf, pos)
            except CorruptImageError:
                raise CorruptImageError(
                    f"PGM body truncated: expected {count} samples, found {i}") from None
            try:
                v = int(token)
            except ValueError:
                raise CorruptImageError(f"PGM sample is not an integer: {token!r}") from None
            if not 0 <= v <= 255:
                raise CorruptImageError(f"PGM sample {v} outside [0, 255]")
            values[i] = v
    return GrayImage(values.reshape(height, width) / 255.0)


def _load_png(path: Path) -> GrayImage:
    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise UnsupportedFormatError(
                    f"only 8-bit grayscale PNG is supported, got mode {img.mode!r}")
            arr = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError:
        raise CorruptImageError(f"not a decodable PNG: {path}") from None
    return GrayImage(arr.astype(np.float64) / 255.0)


def load_image(path: str | Path) -> GrayImage:
    """Load an 8-bit grayscale PGM (P2/P5) or PNG file as a GrayImage.

    Raises FileNotFoundError, UnsupportedFormatError, or CorruptImageError
    with a distinct diagnostic for each failure class.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    buf = path.read_bytes()
    if buf[:2] in (b"P2", b"P5"):
        return _load_pgm(buf)
    if buf[:8] == _PNG_SIGNATURE:
        return _load_png(path)
    raise UnsupportedFormatError(f"unrecognized image format (not PGM P2/P5 or PNG): {path}")


def _to_bytes(img: GrayImage) -> np.ndarray:
    return np.rint(img.data * 255.0).astype(np.uint8)


def save_image(img: GrayImage, path: str | Path) -> None:
    """Write a GrayImage as binary PGM (.pgm) or 8-bit grayscale PNG (.png).

    Round trip through either format recovers every pixel within 1/255.
    """
    path = Path(path)
    raw = _to_bytes(img)
    if path.suffix.lower() == ".pgm":
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        path.write_bytes(header + raw.tobytes())
    elif path.suffix.lower() == ".png":
        Image.fromarray(raw, mode="L").save(path, format="PNG")
    else:
        raise UnsupportedFormatError(f"unsupported output extension: {path.suffix!r}")


def save_mask(mask: LabelMask, path: str | Path) -> None:
    """Write a LabelMask as PGM, spreading class ids over distinct gray levels."""
    if mask.n_classes > 256:
        raise ValidationError("cannot encode more than 256 classes in 8-bit PGM")
    if mask.n_classes < 2:
        gray = np.zeros_like(mask.labels, dtype=np.float64)
    else:
        gray = mask.labels / (mask.n_classes - 1)
    save_image(GrayImage(gray), path)


def load_mask(path: str | Path) -> LabelMask:
    """Read a mask PGM/PNG: distinct gray values map to class ids 0..C-1 in
    ascending gray order. Inverse of save_mask when every class is present."""
    img = load_image(path)
    raw = _to_bytes(img)
    uniq = np.unique(raw)
    labels = np.searchsorted(uniq, raw)
    return LabelMask(labels, n_classes=len(uniq))


# ---------------------------------------------------------------------------
# Quantization and synthetic inputs
# ---------------------------------------------------------------------------


def quantize_array(data: np.ndarray, levels: int) -> np.ndarray:
    """Uniformly bin [0, 1] intensities into integer levels 0..levels-1."""
    if not 2 <= levels <= 256:
        raise ValidationError("levels must be in [2, 256]")
    q = np.floor(np.asarray(data, dtype=np.float64) * levels).astype(np.int64)
    return np.clip(q, 0, levels - 1)


def quantize(img: GrayImage, levels: int) -> QuantizedImage:
    """Quantize a GrayImage: level = min(floor(intensity * levels), levels - 1)."""
    return QuantizedImage(levels, quantize_array(img.data, levels))


def generate_checkerboard(width: int, height: int, tile: int,
                          lo: float, hi: float) -> GrayImage:
    """Checkerboard test image: pixel (x, y) = hi when (x//tile + y//tile)
    is even, else lo."""
    if width < 1 or height < 1:
        raise ValidationError("checkerboard dimensions must be positive")
    if tile < 1:
        raise ValidationError("tile size must be >= 1")
    if not (0.0 <= lo < hi <= 1.0):
        raise ValidationError("need 0 <= lo < hi <= 1")
    yy, xx = np.mgrid[0:height, 0:width]
    even = ((xx // tile) + (yy // tile)) % 2 == 0
    return GrayImage(np.where(even, hi, lo))


def checkerboard_mask(width: int, height: int, tile: int) -> LabelMask:
    """Two-class ground truth matching generate_checkerboard tile parity
    (class 0 = hi tiles, class 1 = lo tiles)."""
    yy, xx = np.mgrid[0:height, 0:width]
    even = ((xx // tile) + (yy // tile)) % 2 == 0
    return LabelMask(np.where(even, 0, 1), n_classes=2)


def generate_phantom(spec: PhantomSpec) -> tuple[GrayImage, LabelMask]:
    """Render the three-class elliptical phantom and its ground-truth mask.

    Classes: 0 = background, 1 = wall ring, 2 = chamber. Bit-reproducible
    for a given spec.
    """
    h, w = spec.height, spec.width
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    outer = ((xx - spec.cx) / spec.rx) ** 2 + ((yy - spec.cy) / spec.ry) ** 2 <= 1.0
    inner = (((xx - spec.cx) / (spec.rx - spec.wall)) ** 2
             + ((yy - spec.cy) / (spec.ry - spec.wall)) ** 2) <= 1.0
    labels = np.where(inner, 2, np.where(outer, 1, 0))

    rng = np.random.default_rng(spec.seed)
    fine = rng.uniform(-1.0, 1.0, (h, w))
    coarse = rng.uniform(-1.0, 1.0, ((h + 1) // 2, (w + 1) // 2))
    coarse = np.repeat(np.repeat(coarse, 2, axis=0), 2, axis=1)[:h, :w]
    tex = np.where(labels == 2, coarse, fine)

    base = np.asarray(spec.intensities)[labels]
    amp = np.asarray(spec.texture)[labels]
    img = np.clip(base + amp * tex, 0.0, 1.0)
    return GrayImage(img), LabelMask(labels, n_classes=3)
