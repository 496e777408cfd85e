"""Localization metrics and the plain-text ground-truth/detections format.

The file format is one ``image <name> <width> <height>`` header per image
followed by ``x y w h [transcription]`` rectangle lines. Detections use the
same format (transcriptions optional), so one parser serves both sides.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import GroundTruthError

log = logging.getLogger(__name__)

Rect = tuple[int, int, int, int]


@dataclass
class GroundTruthImage:
    width: int
    height: int
    rects: list[Rect] = field(default_factory=list)
    transcriptions: list[str | None] = field(default_factory=list)


@dataclass
class GroundTruthSet:
    images: dict[str, GroundTruthImage] = field(default_factory=dict)


@dataclass
class ImageCounts:
    matched: int
    detected: int
    truth: int


@dataclass
class Metrics:
    precision: float
    recall: float
    f_measure: float
    per_image: dict[str, ImageCounts] = field(default_factory=dict)


def iou(a, b) -> float:
    """Intersection over union of two (x, y, w, h) rectangles."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix0 = max(ax, bx)
    iy0 = max(ay, by)
    ix1 = min(ax + aw, bx + bw)
    iy1 = min(ay + ah, by + bh)
    iw = max(0.0, ix1 - ix0)
    ih = max(0.0, iy1 - iy0)
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    return inter / union if union > 0 else 0.0


def _ratio(numerator: int, denominator: int, other_empty: bool) -> float:
    if denominator > 0:
        return numerator / denominator
    return 1.0 if other_empty else 0.0


def evaluate(detections: dict, truth: GroundTruthSet, overlap_threshold: float = 0.5) -> Metrics:
    """Micro-averaged precision/recall with greedy one-to-one IoU matching.

    A detection matches a ground-truth rectangle iff IoU >= the threshold;
    candidate pairs are consumed in descending IoU order. Detections for an
    image the truth does not know are an error; truth images with no
    detections entry simply count as zero detections.
    """
    unknown = set(detections) - set(truth.images)
    if unknown:
        raise GroundTruthError(f"detections reference unknown images: {sorted(unknown)}")
    total_matched = total_detected = total_truth = 0
    per_image: dict[str, ImageCounts] = {}
    for name in sorted(truth.images):
        dets = list(detections.get(name, []))
        gts = truth.images[name].rects
        pairs = []
        for di, d in enumerate(dets):
            for gi, g in enumerate(gts):
                v = iou(d, g)
                if v >= overlap_threshold:
                    pairs.append((v, di, gi))
        pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
        used_d: set[int] = set()
        used_g: set[int] = set()
        for _, di, gi in pairs:
            if di in used_d or gi in used_g:
                continue
            used_d.add(di)
            used_g.add(gi)
        matched = len(used_d)
        per_image[name] = ImageCounts(matched=matched, detected=len(dets), truth=len(gts))
        total_matched += matched
        total_detected += len(dets)
        total_truth += len(gts)
    precision = _ratio(total_matched, total_detected, other_empty=total_truth == 0)
    recall = _ratio(total_matched, total_truth, other_empty=total_detected == 0)
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Metrics(precision=precision, recall=recall, f_measure=f, per_image=per_image)


def load_ground_truth(path) -> GroundTruthSet:
    """Parse a ground-truth/detections file; malformed lines name their number.

    Rectangles poking outside the declared image bounds are clamped with a
    warning; rectangles entirely outside are dropped with a warning.
    """
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise GroundTruthError(f"cannot read {path}: {exc}") from exc
    gts = GroundTruthSet()
    current: GroundTruthImage | None = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("image "):
            parts = line.split()
            if len(parts) != 4:
                raise GroundTruthError(f"{path}:{lineno}: expected 'image <name> <w> <h>'")
            try:
                width, height = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise GroundTruthError(f"{path}:{lineno}: non-numeric image size") from exc
            if width < 1 or height < 1:
                raise GroundTruthError(f"{path}:{lineno}: bad image size {width}x{height}")
            current = GroundTruthImage(width=width, height=height)
            gts.images[parts[1]] = current
            continue
        if current is None:
            raise GroundTruthError(f"{path}:{lineno}: rectangle before any image header")
        parts = line.split(maxsplit=4)
        if len(parts) < 4:
            raise GroundTruthError(f"{path}:{lineno}: expected 'x y w h [transcription]'")
        try:
            x, y, w, h = (int(v) for v in parts[:4])
        except ValueError as exc:
            raise GroundTruthError(f"{path}:{lineno}: non-numeric rectangle") from exc
        transcription = parts[4] if len(parts) == 5 else None
        x0, y0 = max(0, x), max(0, y)
        x1, y1 = min(current.width, x + w), min(current.height, y + h)
        if (x0, y0, x1 - x0, y1 - y0) != (x, y, w, h):
            if x1 <= x0 or y1 <= y0:
                log.warning("%s:%d: rectangle lies outside the image; dropped", path, lineno)
                continue
            log.warning("%s:%d: rectangle clamped to image bounds", path, lineno)
        current.rects.append((x0, y0, x1 - x0, y1 - y0))
        current.transcriptions.append(transcription)
    return gts


def save_ground_truth(gts: GroundTruthSet, path) -> None:
    lines = []
    for name, img in gts.images.items():
        lines.append(f"image {name} {img.width} {img.height}")
        for rect, transcription in zip(img.rects, img.transcriptions):
            suffix = f" {transcription}" if transcription else ""
            lines.append(f"{rect[0]} {rect[1]} {rect[2]} {rect[3]}{suffix}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def format_metrics(metrics: Metrics) -> str:
    return (
        f"P={metrics.precision:.3f} R={metrics.recall:.3f} F={metrics.f_measure:.3f}"
    )
