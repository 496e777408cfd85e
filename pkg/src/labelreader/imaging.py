"""Pixel-level primitives shared by every stage of the reading pipeline.

Array conventions used throughout the package:

* color frame -- ``uint8`` array of shape ``(height, width, 3)``, RGB order
* gray image  -- ``uint8`` (or float) array of shape ``(height, width)``
* binary mask -- ``bool`` array of shape ``(height, width)``
* bbox        -- ``(x, y, w, h)`` in pixels, origin at the top-left corner

All operations are pure: none mutates its input, and identical inputs give
bit-identical outputs regardless of how many threads the caller uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionError, ParameterError

# Convolution weights are snapped to multiples of 1/65536 so that smoothing a
# small-integer image is exact in float64; adding a constant to the input then
# shifts every output by exactly that constant.
_WEIGHT_QUANT = 65536

_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)


@dataclass
class GradientField:
    """Per-pixel image gradients from the 3x3 Sobel operator."""

    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray
    orientation: np.ndarray  # atan2(gy, gx) folded into [0, 2*pi)


@dataclass
class Component:
    """One connected component of a binary mask."""

    pixel_count: int
    bbox: tuple[int, int, int, int]
    pixels: np.ndarray  # (n, 2) array of (x, y) coordinates


def _require_gray(image: np.ndarray, op: str) -> np.ndarray:
    a = np.asarray(image)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{op} expects a 2-D image, got shape {a.shape}")
    return a


def _require_mask(mask: np.ndarray, op: str) -> np.ndarray:
    m = np.asarray(mask)
    if m.ndim != 2:
        raise DimensionError(f"{op} expects a 2-D mask, got shape {m.shape}")
    return m.astype(bool, copy=False)


def to_grayscale(frame: np.ndarray) -> np.ndarray:
    """Convert an RGB frame to 8-bit luminance (0.299 R + 0.587 G + 0.114 B)."""
    f = np.asarray(frame)
    if f.ndim != 3 or f.shape[2] != 3 or f.shape[0] < 1 or f.shape[1] < 1:
        raise DimensionError(f"expected an (h, w, 3) frame, got shape {f.shape}")
    r = f[:, :, 0].astype(np.float64)
    g = f[:, :, 1].astype(np.float64)
    b = f[:, :, 2].astype(np.float64)
    lum = np.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5)
    return np.clip(lum, 0, 255).astype(np.uint8)


def _quantized_gaussian_kernel(sigma: float, size: int = 5) -> np.ndarray:
    ax = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(ax * ax) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    q = np.floor(k / k.sum() * _WEIGHT_QUANT + 0.5)
    # Re-center so the weights sum to exactly 1.0 after division.
    q[size // 2, size // 2] += _WEIGHT_QUANT - q.sum()
    return q / _WEIGHT_QUANT


def _correlate(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Dense 2-D correlation with replicated (clamped) borders."""
    kh, kw = kernel.shape
    py, px = kh // 2, kw // 2
    h, w = image.shape
    padded = np.pad(np.asarray(image, dtype=np.float64), ((py, py), (px, px)), mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(kh):
        for j in range(kw):
            kij = kernel[i, j]
            if kij != 0.0:
                out += kij * padded[i : i + h, j : j + w]
    return out


def gaussian_smooth(image: np.ndarray, sigma: float = 1.0, size: int = 5) -> np.ndarray:
    """Smooth with a normalized ``size``x``size`` Gaussian, replicated borders."""
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    img = _require_gray(image, "gaussian_smooth")
    return _correlate(img, _quantized_gaussian_kernel(sigma, size))


def sobel(image: np.ndarray) -> GradientField:
    """3x3 Sobel gradients with replicated-edge sampling at the borders."""
    img = _require_gray(image, "sobel")
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise DimensionError(f"sobel needs at least a 3x3 image, got {img.shape}")
    p = np.pad(np.asarray(img, dtype=np.float64), 1, mode="edge")
    left = p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2]
    right = p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]
    top = p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:]
    bottom = p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]
    gx = right - left
    gy = bottom - top
    magnitude = np.hypot(gx, gy)
    orientation = np.mod(np.arctan2(gy, gx), 2.0 * np.pi)
    return GradientField(gx=gx, gy=gy, magnitude=magnitude, orientation=orientation)


def canny(image: np.ndarray, low: float, high: float, sigma: float = 1.0) -> np.ndarray:
    """Canny edge mask: smooth, Sobel, non-maximum suppression, hysteresis.

    ``low``/``high`` are double thresholds on gradient magnitude. Every output
    pixel has magnitude >= ``low`` and is 8-connected to one >= ``high``.
    """
    if not 0 <= low <= high:
        raise ParameterError(f"thresholds must satisfy 0 <= low <= high, got {low}, {high}")
    smoothed = gaussian_smooth(image, sigma)
    g = sobel(smoothed)
    mag = g.magnitude

    h, w = mag.shape
    angle = np.arctan2(g.gy, g.gx)
    dx = np.rint(np.cos(angle)).astype(np.intp)
    dy = np.rint(np.sin(angle)).astype(np.intp)
    yy, xx = np.indices(mag.shape)
    ahead = mag[np.clip(yy + dy, 0, h - 1), np.clip(xx + dx, 0, w - 1)]
    behind = mag[np.clip(yy - dy, 0, h - 1), np.clip(xx - dx, 0, w - 1)]
    # Strict test toward the gradient side keeps exactly one pixel of a
    # two-wide magnitude plateau, so straight step edges come out 1 px wide.
    ridge = (mag > 0) & (mag >= behind) & (mag > ahead)

    strong = ridge & (mag >= high)
    if not strong.any():
        return np.zeros((h, w), dtype=bool)
    weak = ridge & (mag >= low)
    labels, _ = ndimage.label(weak, structure=_STRUCT_8)
    keep = np.unique(labels[strong])
    return np.isin(labels, keep) & weak


def connected_components(mask: np.ndarray, connectivity: int = 8) -> list[Component]:
    """Connected components of a mask, largest first (ties: bbox y, then x)."""
    if connectivity not in (4, 8):
        raise ParameterError(f"connectivity must be 4 or 8, got {connectivity}")
    m = _require_mask(mask, "connected_components")
    structure = _STRUCT_8 if connectivity == 8 else _STRUCT_4
    labels, count = ndimage.label(m, structure=structure)
    if count == 0:
        return []
    ys, xs = np.nonzero(labels)
    labs = labels[ys, xs]
    order = np.argsort(labs, kind="stable")
    ys, xs, labs = ys[order], xs[order], labs[order]
    starts = np.searchsorted(labs, np.arange(1, count + 1), side="left")
    ends = np.append(starts[1:], labs.size)
    comps = []
    for s, e in zip(starts, ends):
        cy, cx = ys[s:e], xs[s:e]
        x0 = int(cx.min())
        y0 = int(cy.min())
        bw = int(cx.max()) - x0 + 1
        bh = int(cy.max()) - y0 + 1
        comps.append(
            Component(
                pixel_count=int(e - s),
                bbox=(x0, y0, bw, bh),
                pixels=np.column_stack([cx, cy]).astype(np.intp),
            )
        )
    comps.sort(key=lambda c: (-c.pixel_count, c.bbox[1], c.bbox[0]))
    return comps
