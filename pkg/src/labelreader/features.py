"""Feature extraction for the text/non-text classifier.

A candidate crop is resampled to a fixed-height patch, its edge pixels are
binned by unsigned gradient orientation (8 bins over [0, pi)) with gradient
magnitude as the deposit, and a local edge-density map is computed. Block
patterns pool these 9 planes into a fixed-length vector: for the default
pattern set {1x1, 2x2, 1x3, 3x1, 2x4} that is (1+4+3+3+8) cells x 9 = 171
entries.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError, ModelFormatError, ParameterError
from .imaging import _correlate, canny, sobel

ORIENTATION_BINS = 8
DEFAULT_PATTERNS: tuple[tuple[int, int], ...] = ((1, 1), (2, 2), (1, 3), (3, 1), (2, 4))
DEFAULT_VECTOR_LENGTH = sum(r * c for r, c in DEFAULT_PATTERNS) * (ORIENTATION_BINS + 1)

# Interpolation weights are snapped to multiples of 1/65536; resampling an
# integer-valued crop is then exact in float64 and commutes with constant
# intensity shifts.
_WEIGHT_QUANT = 65536


@dataclass
class FeatureParams:
    patch_height: int = 32
    min_patch_width: int = 32
    max_patch_width: int = 256
    canny_low: float = 40.0
    canny_high: float = 120.0
    canny_sigma: float = 1.0
    patterns: tuple[tuple[int, int], ...] = DEFAULT_PATTERNS

    @property
    def vector_length(self) -> int:
        return sum(r * c for r, c in self.patterns) * (ORIENTATION_BINS + 1)

    def validate(self) -> None:
        if self.patch_height < 8:
            raise ParameterError(f"patch_height must be >= 8, got {self.patch_height}")
        if not 1 <= self.min_patch_width <= self.max_patch_width:
            raise ParameterError("need 1 <= min_patch_width <= max_patch_width")
        if not 0 <= self.canny_low <= self.canny_high:
            raise ParameterError("need 0 <= canny_low <= canny_high")
        if self.canny_sigma <= 0:
            raise ParameterError("canny_sigma must be positive")
        if not self.patterns:
            raise ParameterError("at least one block pattern is required")
        for rows, cols in self.patterns:
            if rows < 1 or cols < 1:
                raise ParameterError(f"bad block pattern {rows}x{cols}")
            if rows > self.patch_height or cols > self.min_patch_width:
                raise ParameterError(f"pattern {rows}x{cols} exceeds the minimum patch size")


def _axis_coords(n_src: int, n_dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    f = (np.arange(n_dst, dtype=np.float64) + 0.5) * (n_src / n_dst) - 0.5
    f = np.clip(f, 0.0, float(n_src - 1))
    i0 = np.floor(f).astype(np.intp)
    t = np.floor((f - i0) * _WEIGHT_QUANT + 0.5) / _WEIGHT_QUANT
    i1 = np.minimum(i0 + 1, n_src - 1)
    return i0, i1, t


def normalize_patch(
    crop: np.ndarray, height: int = 32, min_width: int = 32, max_width: int = 256
) -> np.ndarray:
    """Bilinear resample to the fixed height, width clamped to its band."""
    c = np.asarray(crop)
    if c.ndim != 2 or c.size == 0:
        raise DegenerateInputError(f"cannot normalize an empty crop (shape {c.shape})")
    h0, w0 = c.shape
    width = int(w0 * height / h0 + 0.5)
    width = min(max(width, min_width), max_width)
    y0, y1, ty = _axis_coords(h0, height)
    x0, x1, tx = _axis_coords(w0, width)
    src = c.astype(np.float64)
    v00 = src[np.ix_(y0, x0)]
    v01 = src[np.ix_(y0, x1)]
    v10 = src[np.ix_(y1, x0)]
    v11 = src[np.ix_(y1, x1)]
    txg = tx[None, :]
    tyg = ty[:, None]
    out = (
        v00
        + txg * (v01 - v00)
        + tyg * (v10 - v00)
        + (txg * tyg) * (v00 - v01 - v10 + v11)
    )
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def stroke_orientation_map(patch: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """8 orientation planes; each edge pixel deposits its gradient magnitude.

    Orientation is folded to [0, pi) (stroke gradients are two-sided) and
    split into 8 equal bins; non-edge pixels contribute nothing.
    """
    p = np.asarray(patch)
    e = np.asarray(edges, dtype=bool)
    if p.shape != e.shape:
        raise DimensionError(f"patch shape {p.shape} != edges shape {e.shape}")
    g = sobel(p)
    theta = np.mod(g.orientation, np.pi)
    bins = np.clip(
        np.floor(theta / np.pi * ORIENTATION_BINS), 0, ORIENTATION_BINS - 1
    ).astype(np.intp)
    planes = np.zeros((ORIENTATION_BINS,) + p.shape, dtype=np.float64)
    ey, ex = np.nonzero(e)
    planes[bins[ey, ex], ey, ex] = g.magnitude[ey, ex]
    return planes


def edge_distribution_map(edges: np.ndarray, size: int = 7) -> np.ndarray:
    """Fraction of edge pixels in the local size x size window (replicated borders)."""
    e = np.asarray(edges, dtype=bool)
    if e.ndim != 2:
        raise DimensionError(f"expected a 2-D mask, got shape {e.shape}")
    counts = _correlate(e.astype(np.float64), np.ones((size, size), dtype=np.float64))
    return counts / float(size * size)


def block_features(
    orientation_maps: np.ndarray,
    density_map: np.ndarray,
    patterns: tuple[tuple[int, int], ...] = DEFAULT_PATTERNS,
) -> np.ndarray:
    """Pool the 9 feature planes into one vector.

    Serialization order is fixed: patterns in declared order, cells row-major,
    and per cell the 8 orientation means followed by the density mean. Cell
    boundaries sit at floor(i/n * dimension).
    """
    om = np.asarray(orientation_maps, dtype=np.float64)
    dm = np.asarray(density_map, dtype=np.float64)
    if om.ndim != 3 or om.shape[0] != ORIENTATION_BINS:
        raise DimensionError(f"expected ({ORIENTATION_BINS}, h, w) orientation maps")
    if om.shape[1:] != dm.shape:
        raise DimensionError(f"map shapes differ: {om.shape[1:]} vs {dm.shape}")
    h, w = dm.shape
    total = sum(r * c for r, c in patterns) * (ORIENTATION_BINS + 1)
    out = np.empty(total, dtype=np.float64)
    pos = 0
    for rows, cols in patterns:
        if rows > h or cols > w:
            raise DimensionError(f"pattern {rows}x{cols} does not fit a {h}x{w} patch")
        rb = [(i * h) // rows for i in range(rows + 1)]
        cb = [(j * w) // cols for j in range(cols + 1)]
        for r in range(rows):
            for c in range(cols):
                ys, ye = rb[r], rb[r + 1]
                xs, xe = cb[c], cb[c + 1]
                for b in range(ORIENTATION_BINS):
                    out[pos] = om[b, ys:ye, xs:xe].mean()
                    pos += 1
                out[pos] = dm[ys:ye, xs:xe].mean()
                pos += 1
    return out


def extract_features(gray_crop: np.ndarray, params: FeatureParams | None = None) -> np.ndarray:
    """Normalized patch -> edges -> pooled feature vector, in one call."""
    params = params or FeatureParams()
    patch = normalize_patch(
        gray_crop, params.patch_height, params.min_patch_width, params.max_patch_width
    )
    edges = canny(patch, params.canny_low, params.canny_high, params.canny_sigma)
    om = stroke_orientation_map(patch, edges)
    dm = edge_distribution_map(edges)
    return block_features(om, dm, params.patterns)


def write_fvec(path, vectors: np.ndarray, labels) -> None:
    """Write labeled feature records: per record one label byte + float32 LE array."""
    v = np.ascontiguousarray(np.asarray(vectors, dtype=np.float64), dtype="<f4")
    if v.ndim != 2:
        raise DimensionError(f"expected (n, length) vectors, got shape {v.shape}")
    labs = np.asarray(labels)
    if labs.shape != (v.shape[0],):
        raise DimensionError("labels must align one-to-one with vectors")
    if not np.isin(labs, (0, 1)).all():
        raise ParameterError("labels must be 0 or 1")
    with open(path, "wb") as fh:
        for vec, lab in zip(v, labs):
            fh.write(struct.pack("B", int(lab)))
            fh.write(vec.tobytes())


def read_fvec(path, length: int = DEFAULT_VECTOR_LENGTH) -> tuple[np.ndarray, np.ndarray]:
    """Read labeled feature records; returns (float32 (n, length), uint8 labels)."""
    data = open(path, "rb").read()
    record = 1 + 4 * length
    if not data:
        return np.zeros((0, length), dtype=np.float32), np.zeros(0, dtype=np.uint8)
    if len(data) % record != 0:
        raise ModelFormatError(
            f"{path}: size {len(data)} is not a multiple of the {record}-byte record"
        )
    n = len(data) // record
    buf = np.frombuffer(data, dtype=np.uint8).reshape(n, record)
    labels = buf[:, 0].copy()
    if not np.isin(labels, (0, 1)).all():
        raise ModelFormatError(f"{path}: labels must be 0 or 1")
    vectors = buf[:, 1:].copy().view("<f4").reshape(n, length)
    return vectors, labels
