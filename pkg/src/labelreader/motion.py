"""Motion-based object isolation.

A per-pixel adaptive mixture of Gaussians models the static background while
the user shakes the object of interest in front of the camera. Per-frame
foreground masks are averaged over time, and the region that stays foreground
in a sufficient fraction of frames becomes the region of interest handed to
text localization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionError, NoObjectDetectedError, ParameterError
from .imaging import _STRUCT_8, connected_components

_NEW_COMPONENT_WEIGHT = 0.05


@dataclass
class MogParams:
    """Mixture-of-Gaussians background model parameters."""

    components: int = 3
    learning_rate: float = 0.01
    match_threshold: float = 2.5  # in standard deviations
    background_fraction: float = 0.7
    initial_variance: float = 225.0
    variance_floor: float = 4.0

    def validate(self) -> None:
        if self.components < 1:
            raise ParameterError(f"components must be >= 1, got {self.components}")
        if not 0.0 < self.learning_rate < 1.0:
            raise ParameterError(f"learning_rate must be in (0, 1), got {self.learning_rate}")
        if not 0.0 < self.background_fraction <= 1.0:
            raise ParameterError(
                f"background_fraction must be in (0, 1], got {self.background_fraction}"
            )
        if self.match_threshold <= 0:
            raise ParameterError(f"match_threshold must be positive, got {self.match_threshold}")
        if self.initial_variance <= 0:
            raise ParameterError(f"initial_variance must be positive, got {self.initial_variance}")
        if self.variance_floor < 0:
            raise ParameterError(f"variance_floor must be >= 0, got {self.variance_floor}")
        if self.initial_variance < self.variance_floor:
            raise ParameterError("initial_variance must be >= variance_floor")


@dataclass
class RegionOfInterest:
    bbox: tuple[int, int, int, int]
    mask: np.ndarray  # bool mask over the bbox


class BackgroundModel:
    """Per-pixel Gaussian mixtures, kept sorted by weight/sqrt(variance).

    ``update`` is stateful and must be called by a single writer in frame
    order. Slot arrays always hold ``components`` entries per pixel; entries
    with ``active`` False are unused and carry zero weight.
    """

    def __init__(self, frame: np.ndarray, params: MogParams):
        params.validate()
        f = np.asarray(frame)
        if f.ndim != 3 or f.shape[2] != 3:
            raise DimensionError(f"expected an (h, w, 3) frame, got shape {f.shape}")
        h, w = f.shape[:2]
        k = params.components
        self.params = params
        self.height, self.width = h, w
        self.weights = np.zeros((k, h, w), dtype=np.float64)
        self.means = np.zeros((k, h, w, 3), dtype=np.float64)
        self.variances = np.full((k, h, w), params.initial_variance, dtype=np.float64)
        self.active = np.zeros((k, h, w), dtype=bool)
        self.weights[0] = 1.0
        self.means[0] = f.astype(np.float64)
        self.active[0] = True

    def component_counts(self) -> np.ndarray:
        return self.active.sum(axis=0)

    def update(self, frame: np.ndarray) -> np.ndarray:
        """Absorb one frame; returns the foreground mask for that frame.

        A pixel matches the first ranked component whose mean lies within
        ``match_threshold`` standard deviations (Euclidean RGB distance). The
        pixel is background when the weight ranked above its matched component
        is still below ``background_fraction``; unmatched pixels are
        foreground and recruit a fresh low-weight component.
        """
        f = np.asarray(frame)
        if f.shape != (self.height, self.width, 3):
            raise DimensionError(
                f"frame shape {f.shape} does not match model {(self.height, self.width, 3)}"
            )
        p = self.params
        x = f.astype(np.float64)

        dist2 = ((x[None, :, :, :] - self.means) ** 2).sum(axis=-1)
        lam2 = p.match_threshold * p.match_threshold
        matched = self.active & (dist2 <= lam2 * self.variances)
        any_match = matched.any(axis=0)
        first_match = matched & (np.cumsum(matched, axis=0) == 1)

        # Classify against the pre-update ranking: exclusive prefix weight of
        # the matched component below the background fraction => background.
        prefix = np.cumsum(self.weights, axis=0) - self.weights
        is_background = ((prefix < p.background_fraction) & first_match).any(axis=0)
        foreground = ~is_background

        alpha = p.learning_rate
        self.weights = np.where(
            any_match[None],
            (1.0 - alpha) * self.weights + alpha * first_match,
            self.weights,
        )
        upd3 = first_match[..., None]
        new_means = np.where(upd3, (1.0 - alpha) * self.means + alpha * x[None], self.means)
        dev2 = ((x[None] - new_means) ** 2).mean(axis=-1)
        self.means = new_means
        self.variances = np.where(
            first_match, (1.0 - alpha) * self.variances + alpha * dev2, self.variances
        )

        unmatched = ~any_match
        if unmatched.any():
            counts = self.active.sum(axis=0)
            slot = np.where(counts < p.components, counts, p.components - 1)
            recruit = (np.arange(p.components)[:, None, None] == slot[None]) & unmatched[None]
            self.weights = np.where(recruit, _NEW_COMPONENT_WEIGHT, self.weights)
            self.means = np.where(recruit[..., None], x[None], self.means)
            self.variances = np.where(recruit, p.initial_variance, self.variances)
            self.active |= recruit

        self.variances = np.maximum(self.variances, p.variance_floor)
        self.weights /= self.weights.sum(axis=0, keepdims=True)

        # Re-rank: weight/sqrt(variance) descending, inactive slots last.
        key = np.where(self.active, -self.weights / np.sqrt(self.variances), np.inf)
        order = np.argsort(key, axis=0, kind="stable")
        self.weights = np.take_along_axis(self.weights, order, axis=0)
        self.variances = np.take_along_axis(self.variances, order, axis=0)
        self.active = np.take_along_axis(self.active, order, axis=0)
        self.means = np.take_along_axis(self.means, order[..., None], axis=0)

        return foreground


def mog_init(frame: np.ndarray, params: MogParams | None = None) -> BackgroundModel:
    """Build a background model from the first frame (one component per pixel)."""
    return BackgroundModel(frame, params or MogParams())


def mog_update(model: BackgroundModel, frame: np.ndarray) -> tuple[np.ndarray, BackgroundModel]:
    """Update the model with one frame; returns (foreground mask, model)."""
    return model.update(frame), model


def aggregate_foreground(masks) -> np.ndarray:
    """Per-pixel mean of binary foreground masks (temporal persistence map)."""
    masks = list(masks)
    if not masks:
        raise ParameterError("aggregate_foreground needs at least one mask")
    shape = np.asarray(masks[0]).shape
    for m in masks:
        if np.asarray(m).shape != shape:
            raise DimensionError(f"mask shape {np.asarray(m).shape} does not match {shape}")
    stack = np.stack([np.asarray(m, dtype=np.float64) for m in masks])
    return stack.mean(axis=0)


def extract_roi(object_map: np.ndarray, persistence: float = 0.3) -> RegionOfInterest:
    """Bounding region of the dominant persistent-foreground blob.

    Thresholds the persistence map, closes small gaps (3x3, one iteration),
    keeps the largest 8-connected component, and dilates its bbox by 5% of
    each frame dimension, clamped to the frame.
    """
    if not 0.0 < persistence <= 1.0:
        raise ParameterError(f"persistence must be in (0, 1], got {persistence}")
    m = np.asarray(object_map, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D map, got shape {m.shape}")
    fg = m >= persistence
    if not fg.any():
        raise NoObjectDetectedError("no pixel reaches the persistence threshold")
    dilated = ndimage.binary_dilation(fg, structure=_STRUCT_8, border_value=0)
    closed = ndimage.binary_erosion(dilated, structure=_STRUCT_8, border_value=1)
    largest = connected_components(closed, connectivity=8)[0]
    x, y, w, h = largest.bbox
    height, width = m.shape
    mx = int(width * 0.05 + 0.5)
    my = int(height * 0.05 + 0.5)
    x0 = max(0, x - mx)
    y0 = max(0, y - my)
    x1 = min(width, x + w + mx)
    y1 = min(height, y + h + my)
    bbox = (x0, y0, x1 - x0, y1 - y0)
    return RegionOfInterest(bbox=bbox, mask=closed[y0:y1, x0:x1].copy())
