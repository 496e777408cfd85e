"""Rule-based layout analysis.

Text candidates are found without any learning: the crop is decomposed into
layers of near-uniform color, connected components of plausible character
shape are kept, and similarly sized components that line up horizontally are
chained into candidate text regions. Each region gets a suitability score in
[0, 1] combining alignment, size uniformity, and spacing uniformity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError
from .imaging import connected_components

_QUANT_BITS = 4  # color histogram bins per channel: 16 levels


@dataclass
class LayoutParams:
    max_layers: int = 6
    min_char_height: int = 8
    max_char_height_frac: float = 0.8
    min_aspect: float = 0.1
    max_aspect: float = 2.0
    min_fill: float = 0.1
    max_fill: float = 0.95
    min_overlap: float = 0.5  # vertical overlap / smaller height
    max_gap_factor: float = 2.0  # gap <= factor * wider box width
    max_height_ratio: float = 2.0
    min_score: float = 0.5

    def validate(self) -> None:
        if self.max_layers < 2:
            raise ParameterError(f"max_layers must be >= 2, got {self.max_layers}")
        if self.min_char_height < 1:
            raise ParameterError("min_char_height must be >= 1")
        if not 0.0 < self.max_char_height_frac <= 1.0:
            raise ParameterError("max_char_height_frac must be in (0, 1]")
        if not 0.0 < self.min_aspect <= self.max_aspect:
            raise ParameterError("need 0 < min_aspect <= max_aspect")
        if not 0.0 <= self.min_fill <= self.max_fill <= 1.0:
            raise ParameterError("need 0 <= min_fill <= max_fill <= 1")
        if not 0.0 < self.min_overlap <= 1.0:
            raise ParameterError("min_overlap must be in (0, 1]")
        if self.max_gap_factor <= 0:
            raise ParameterError("max_gap_factor must be positive")
        if self.max_height_ratio < 1.0:
            raise ParameterError("max_height_ratio must be >= 1")
        if not 0.0 <= self.min_score <= 1.0:
            raise ParameterError("min_score must be in [0, 1]")


@dataclass
class ColorLayer:
    color: tuple[int, int, int]
    mask: np.ndarray  # bool, crop-sized; layers partition the crop


@dataclass
class CharBox:
    bbox: tuple[int, int, int, int]
    layer: int
    pixel_count: int


@dataclass
class CandidateRegion:
    bbox: tuple[int, int, int, int]
    members: list[CharBox] = field(default_factory=list)
    score: float = 0.0


def reduce_colors(crop: np.ndarray, max_layers: int = 6) -> list[ColorLayer]:
    """Partition a crop into at most ``max_layers`` near-uniform color layers.

    Channels are quantized to 16 levels, the most populous quantized colors
    seed the layers, and every pixel joins its nearest seed in RGB distance
    (ties go to the seed with the larger histogram population).
    """
    if max_layers < 2:
        raise ParameterError(f"max_layers must be >= 2, got {max_layers}")
    c = np.asarray(crop)
    if c.ndim != 3 or c.shape[2] != 3:
        raise DimensionError(f"expected an (h, w, 3) crop, got shape {c.shape}")
    h, w = c.shape[:2]
    pixels = c.reshape(-1, 3).astype(np.int64)
    q = pixels >> (8 - _QUANT_BITS)
    codes = (q[:, 0] << (2 * _QUANT_BITS)) | (q[:, 1] << _QUANT_BITS) | q[:, 2]
    n_codes = 1 << (3 * _QUANT_BITS)
    counts = np.bincount(codes, minlength=n_codes)
    order = np.lexsort((np.arange(n_codes), -counts))
    seed_codes = [int(code) for code in order[:max_layers] if counts[code] > 0]
    size = 1 << _QUANT_BITS
    half = size // 2
    seeds = np.array(
        [
            (
                ((code >> (2 * _QUANT_BITS)) & (size - 1)) * size + half,
                ((code >> _QUANT_BITS) & (size - 1)) * size + half,
                (code & (size - 1)) * size + half,
            )
            for code in seed_codes
        ],
        dtype=np.int64,
    )
    diff = pixels[:, None, :] - seeds[None, :, :]
    dist2 = (diff * diff).sum(axis=-1)
    assign = dist2.argmin(axis=1)  # first minimum = most populous seed
    layers = []
    for i, seed in enumerate(seeds):
        mask = (assign == i).reshape(h, w)
        if mask.any():
            layers.append(ColorLayer(color=tuple(int(v) for v in seed), mask=mask))
    return layers


def extract_char_candidates(
    layers: list[ColorLayer], params: LayoutParams | None = None
) -> list[CharBox]:
    """Character-shaped connected components of each layer.

    Keeps components whose height, aspect ratio, and fill ratio fall inside
    the configured bands; everything else is specks, frames, or fills.
    """
    params = params or LayoutParams()
    if not layers:
        return []
    crop_h = layers[0].mask.shape[0]
    max_h = params.max_char_height_frac * crop_h
    boxes = []
    for li, layer in enumerate(layers):
        for comp in connected_components(layer.mask, connectivity=8):
            x, y, w, h = comp.bbox
            if h < params.min_char_height or h > max_h:
                continue
            aspect = w / h
            if not params.min_aspect <= aspect <= params.max_aspect:
                continue
            fill = comp.pixel_count / (w * h)
            if not params.min_fill <= fill <= params.max_fill:
                continue
            boxes.append(CharBox(bbox=(x, y, w, h), layer=li, pixel_count=comp.pixel_count))
    return boxes


def _vertical_overlap(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> float:
    top = max(a[1], b[1])
    bottom = min(a[1] + a[3], b[1] + b[3])
    if bottom <= top:
        return 0.0
    return (bottom - top) / min(a[3], b[3])


def _chainable(prev: CharBox, box: CharBox, params: LayoutParams) -> bool:
    if _vertical_overlap(prev.bbox, box.bbox) < params.min_overlap:
        return False
    gap = box.bbox[0] - (prev.bbox[0] + prev.bbox[2])
    if gap > params.max_gap_factor * max(prev.bbox[2], box.bbox[2]):
        return False
    ha, hb = prev.bbox[3], box.bbox[3]
    return max(ha, hb) / min(ha, hb) <= params.max_height_ratio


def group_adjacent(
    chars: list[CharBox], params: LayoutParams | None = None
) -> list[CandidateRegion]:
    """Chain aligned same-layer boxes left to right; chains of >= 3 survive.

    Input order never matters: boxes are sorted canonically by
    (layer, x, y) before greedy chaining.
    """
    params = params or LayoutParams()
    ordered = sorted(chars, key=lambda c: (c.layer, c.bbox[0], c.bbox[1]))
    regions = []
    for layer in sorted({c.layer for c in ordered}):
        chains: list[list[CharBox]] = []
        for box in (c for c in ordered if c.layer == layer):
            for chain in chains:
                if _chainable(chain[-1], box, params):
                    chain.append(box)
                    break
            else:
                chains.append([box])
        for chain in chains:
            if len(chain) < 3:
                continue
            x0 = min(c.bbox[0] for c in chain)
            y0 = min(c.bbox[1] for c in chain)
            x1 = max(c.bbox[0] + c.bbox[2] for c in chain)
            y1 = max(c.bbox[1] + c.bbox[3] for c in chain)
            region = CandidateRegion(bbox=(x0, y0, x1 - x0, y1 - y0), members=chain)
            region.score = layout_score(region)
            regions.append(region)
    regions.sort(key=lambda r: (r.members[0].layer, r.bbox[0], r.bbox[1]))
    return regions


def _clamp01(v: float) -> float:
    return min(1.0, max(0.0, v))


def layout_score(region: CandidateRegion) -> float:
    """Suitability in [0, 1]: 0.5 alignment + 0.3 size + 0.2 spacing terms.

    Each term is 1 minus a population-stddev/mean ratio, clamped to [0, 1],
    so the score is invariant under uniform geometric scaling. Fewer than two
    gaps (or perfectly equal gaps) count as perfectly uniform spacing.
    """
    members = sorted(region.members, key=lambda c: c.bbox[0])
    if not members:
        raise ParameterError("layout_score needs a region with members")
    heights = np.array([c.bbox[3] for c in members], dtype=np.float64)
    centers = np.array([c.bbox[1] + c.bbox[3] / 2.0 for c in members], dtype=np.float64)
    mean_h = heights.mean()
    alignment = _clamp01(1.0 - centers.std() / mean_h)
    size_uniformity = _clamp01(1.0 - heights.std() / mean_h)
    gaps = np.array(
        [
            members[i + 1].bbox[0] - (members[i].bbox[0] + members[i].bbox[2])
            for i in range(len(members) - 1)
        ],
        dtype=np.float64,
    )
    if gaps.size < 2:
        spacing = 1.0
    else:
        sd = gaps.std()
        mg = gaps.mean()
        if sd == 0.0:
            spacing = 1.0
        elif mg <= 0.0:
            spacing = 0.0
        else:
            spacing = _clamp01(1.0 - sd / mg)
    return 0.5 * alignment + 0.3 * size_uniformity + 0.2 * spacing


def find_candidate_regions(
    crop: np.ndarray, params: LayoutParams | None = None
) -> list[CandidateRegion]:
    """Full rule-based pass over one crop, best-scoring regions first."""
    params = params or LayoutParams()
    layers = reduce_colors(crop, params.max_layers)
    chars = extract_char_candidates(layers, params)
    regions = group_adjacent(chars, params)
    regions.sort(key=lambda r: (-r.score, r.bbox[1], r.bbox[0]))
    return regions
