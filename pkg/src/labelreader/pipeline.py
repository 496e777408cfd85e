"""End-to-end orchestration: frames in, speech script out.

Stage order: background modeling over the frame sequence, temporal foreground
aggregation, region-of-interest extraction (falling back to the full last
frame when nothing persistent moved), rule-based layout candidates on the
last frame's crop, cascade classification, padding + Otsu binarization, OCR,
and script emission. Regions are always reported in frame coordinates.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .cascade import CascadeClassifier, classify
from .config import PipelineConfig
from .errors import ConfigError, DegenerateInputError, DimensionError, OcrError, ParameterError
from .errors import NoObjectDetectedError
from .features import extract_features
from .imaging import to_grayscale
from .layout import find_candidate_regions
from .motion import RegionOfInterest, aggregate_foreground, extract_roi, mog_init
from .readout import (
    OcrAdapter,
    Prosody,
    RecognizedText,
    SpeechScript,
    TextRegion,
    emit_script,
    otsu_binarize,
    pad_region,
    run_ocr,
)

log = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    roi: RegionOfInterest
    roi_fallback: bool
    regions: list[TextRegion] = field(default_factory=list)
    texts: list[RecognizedText] = field(default_factory=list)
    script: SpeechScript = field(default_factory=SpeechScript)
    timings_ms: dict[str, float] = field(default_factory=dict)


def find_text_regions(
    image: np.ndarray,
    classifier: CascadeClassifier,
    cfg: PipelineConfig | None = None,
    origin: tuple[int, int] = (0, 0),
) -> list[tuple[int, int, int, int]]:
    """Accepted text bboxes in one image (or crop, shifted by ``origin``)."""
    cfg = cfg or PipelineConfig()
    if classifier.feature_length != cfg.features.vector_length:
        raise ParameterError(
            f"model feature length {classifier.feature_length} does not match "
            f"the configured {cfg.features.vector_length}"
        )
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionError(f"expected an (h, w, 3) image, got shape {img.shape}")
    gray = to_grayscale(img)
    ox, oy = origin
    accepted = []
    for region in find_candidate_regions(img, cfg.layout):
        if region.score < cfg.layout.min_score:
            continue
        x, y, w, h = region.bbox
        vector = extract_features(gray[y : y + h, x : x + w], cfg.features)
        ok, _ = classify(classifier, vector)
        if ok:
            accepted.append((x + ox, y + oy, w, h))
    accepted.sort(key=lambda r: (r[1], r[0], r[2], r[3]))
    return accepted


def _roi_or_fallback(frames, cfg: PipelineConfig) -> tuple[RegionOfInterest, bool, np.ndarray]:
    model = mog_init(frames[0], cfg.mog)
    height, width = frames[0].shape[:2]
    masks = [np.zeros((height, width), dtype=bool)]  # frame 1 only initializes
    for frame in frames[1:]:
        masks.append(model.update(frame))
    object_map = aggregate_foreground(masks)
    try:
        return extract_roi(object_map, cfg.roi_persistence), False, object_map
    except NoObjectDetectedError:
        log.warning("no persistent moving object; falling back to the full frame")
        roi = RegionOfInterest(
            bbox=(0, 0, width, height), mask=np.ones((height, width), dtype=bool)
        )
        return roi, True, object_map


def run_pipeline(
    frames,
    cfg: PipelineConfig | None = None,
    classifier: CascadeClassifier | None = None,
    ocr: OcrAdapter | None = None,
    script_path=None,
) -> PipelineResult:
    """Full read of a frame sequence; writes the script when a path is given.

    Per-region OCR failures skip that region with a warning instead of
    aborting the read; constant (informationless) patches are skipped too.
    """
    cfg = cfg or PipelineConfig()
    frames = list(frames)
    if not frames:
        raise ParameterError("run_pipeline needs at least one frame")
    if classifier is None:
        raise ParameterError("run_pipeline needs a trained classifier")
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    roi, fallback, _ = _roi_or_fallback(frames, cfg)
    timings["motion_roi"] = (time.perf_counter() - t0) * 1000.0

    last = frames[-1]
    height, width = last.shape[:2]
    x, y, w, h = roi.bbox
    crop = last[y : y + h, x : x + w]

    t0 = time.perf_counter()
    rects = find_text_regions(crop, classifier, cfg, origin=(x, y))
    timings["localize"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    gray = to_grayscale(last)
    regions: list[TextRegion] = []
    for bbox in rects:
        padded = pad_region(bbox, (width, height))
        px, py, pw, ph = padded
        try:
            binarized = otsu_binarize(gray[py : py + ph, px : px + pw])
        except DegenerateInputError:
            log.warning("region %s has a degenerate histogram; skipped", bbox)
            continue
        regions.append(TextRegion(bbox=bbox, padded_bbox=padded, binarized=binarized))
    timings["binarize"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    texts: list[RecognizedText] = []
    if regions and ocr is None:
        raise ConfigError("text regions found but no OCR command is configured")
    for region in regions:
        try:
            texts.append(run_ocr(ocr, region))
        except OcrError as exc:
            log.warning("OCR failed for region %s: %s", region.bbox, exc)
    timings["ocr"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    script = emit_script(texts, cfg.prosody, script_path)
    timings["script"] = (time.perf_counter() - t0) * 1000.0

    return PipelineResult(
        roi=roi,
        roi_fallback=fallback,
        regions=regions,
        texts=texts,
        script=script,
        timings_ms=timings,
    )


def compute_roi(frames, cfg: PipelineConfig | None = None):
    """ROI stage alone: (roi, fallback flag, aggregated persistence map)."""
    cfg = cfg or PipelineConfig()
    frames = list(frames)
    if not frames:
        raise ParameterError("compute_roi needs at least one frame")
    return _roi_or_fallback(frames, cfg)


def draw_rectangles(
    image: np.ndarray,
    rects,
    color: tuple[int, int, int] = (0, 0, 255),
    thickness: int = 2,
) -> np.ndarray:
    """Copy of the image with rectangle outlines burned in."""
    out = np.asarray(image).copy()
    if out.ndim != 3 or out.shape[2] != 3:
        raise DimensionError(f"expected an (h, w, 3) image, got shape {out.shape}")
    height, width = out.shape[:2]
    col = np.array(color, dtype=np.uint8)
    for x, y, w, h in rects:
        x0, y0 = max(0, x), max(0, y)
        x1, y1 = min(width, x + w), min(height, y + h)
        if x1 <= x0 or y1 <= y0:
            continue
        t = thickness
        out[y0 : min(y0 + t, y1), x0:x1] = col
        out[max(y1 - t, y0) : y1, x0:x1] = col
        out[y0:y1, x0 : min(x0 + t, x1)] = col
        out[y0:y1, max(x1 - t, x0) : x1] = col
    return out
