"""Deterministic synthetic corpus: shaken-card frame sequences, still images
with ground-truth word rectangles, and labeled feature records.

Words from the built-in 5x7 font are rendered at integer scales onto uniform
"cards" sitting on a lightly textured background, with non-text clutter for
negative pressure. Everything derives from one seed: the same seed always
produces byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .errors import ParameterError
from .evaluation import GroundTruthImage, GroundTruthSet, save_ground_truth
from .features import extract_features, write_fvec
from .font import render_text_mask
from .imaging import to_grayscale
from .layout import find_candidate_regions
from .pnm import write_ppm

DEFAULT_WORDS = (
    "HELLO", "WORLD", "MILK", "FRESH", "LABEL", "READ", "CORN", "SOUP",
    "RICE", "JUICE", "WATER", "SUGAR", "BREAD", "BEANS", "PASTA", "SALT",
    "TOTAL", "PRICE", "DAILY", "VALUE",
)

_CARD_PAD = 14  # ink-to-card-border margin, larger than the OCR pad + margin band
_EDGE_MARGIN = 12
_TEXTURE_TILE = 16
_TEXTURE_DELTAS = (-10, 0, 10)


@dataclass
class SynthParams:
    width: int = 320
    height: int = 240
    train_images: int = 60
    test_images: int = 50
    sequences: int = 1
    frames_per_sequence: int = 30
    shake_amplitude: int = 10
    min_scale: int = 2
    max_scale: int = 5
    max_cards: int = 2
    words: tuple[str, ...] = DEFAULT_WORDS
    sequence_text: str = "HELLO WORLD"
    sequence_scale: int = 3
    clutter_min: int = 3
    clutter_max: int = 7
    negatives_per_image: int = 4
    mined_negatives_per_image: int = 8
    jitters_per_positive: int = 2

    def validate(self) -> None:
        if self.width < 64 or self.height < 64:
            raise ParameterError("corpus images must be at least 64x64")
        if not 1 <= self.min_scale <= self.max_scale:
            raise ParameterError("need 1 <= min_scale <= max_scale")
        if self.frames_per_sequence < 2:
            raise ParameterError("sequences need at least 2 frames")
        if not self.words:
            raise ParameterError("the word list is empty")


def _lum(color) -> float:
    return 0.299 * color[0] + 0.587 * color[1] + 0.114 * color[2]


def _qbin(color) -> tuple[int, int, int]:
    return tuple(int(v) >> 4 for v in color)


def _dist(a, b) -> float:
    return math.sqrt(sum((int(x) - int(y)) ** 2 for x, y in zip(a, b)))


def _centered_color(rng) -> tuple[int, int, int]:
    # Channels sit mid-bin so the texture jitter never crosses two bin edges.
    return tuple(int(v) * 16 + 8 for v in rng.integers(2, 14, size=3))


def _palette(rng) -> tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]:
    """(background base, card color, ink color) with safe contrast and
    distinct quantized bins so color-layer decomposition stays clean."""
    while True:
        bg = _centered_color(rng)
        card = _centered_color(rng)
        ink = _centered_color(rng)
        bg_bins = {_qbin(tuple(v + d for v in bg)) for d in _TEXTURE_DELTAS}
        if _qbin(card) in bg_bins or _qbin(ink) in bg_bins or _qbin(card) == _qbin(ink):
            continue
        if abs(_lum(card) - _lum(ink)) < 100:
            continue
        if _dist(card, bg) < 60:
            continue
        return bg, card, ink


def _textured_background(rng, width: int, height: int, base) -> np.ndarray:
    img = np.empty((height, width, 3), dtype=np.uint8)
    tiles_y = -(-height // _TEXTURE_TILE)
    tiles_x = -(-width // _TEXTURE_TILE)
    deltas = rng.choice(_TEXTURE_DELTAS, size=(tiles_y, tiles_x))
    for i in range(tiles_y):
        for j in range(tiles_x):
            color = tuple(int(v) + int(deltas[i, j]) for v in base)
            img[
                i * _TEXTURE_TILE : (i + 1) * _TEXTURE_TILE,
                j * _TEXTURE_TILE : (j + 1) * _TEXTURE_TILE,
            ] = color
    return img


def _expand(rect, amount):
    x, y, w, h = rect
    return (x - amount, y - amount, w + 2 * amount, h + 2 * amount)


def _intersects(a, b) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def _place(rng, size, params: SynthParams, occupied, margin: int = 6):
    w, h = size
    max_x = params.width - _EDGE_MARGIN - w
    max_y = params.height - _EDGE_MARGIN - h
    if max_x < _EDGE_MARGIN or max_y < _EDGE_MARGIN:
        return None
    for _ in range(40):
        x = int(rng.integers(_EDGE_MARGIN, max_x + 1))
        y = int(rng.integers(_EDGE_MARGIN, max_y + 1))
        rect = (x, y, w, h)
        if all(not _intersects(_expand(rect, margin), other) for other in occupied):
            return x, y
    return None


def _draw_card(img, x, y, text_mask, card_color, ink_color) -> tuple[int, int, int, int]:
    """Card rectangle with the word centered; returns the ink-extent bbox."""
    th, tw = text_mask.shape
    cw, ch = tw + 2 * _CARD_PAD, th + 2 * _CARD_PAD
    img[y : y + ch, x : x + cw] = card_color
    ty, tx = y + _CARD_PAD, x + _CARD_PAD
    region = img[ty : ty + th, tx : tx + tw]
    region[text_mask] = ink_color
    return (tx, ty, tw, th)


def _add_clutter(rng, img, card_rects, colors, params: SynthParams) -> list:
    """Non-text shapes outside the cards; returns their rough bboxes."""
    height, width = img.shape[:2]
    rects = []
    count = int(rng.integers(params.clutter_min, params.clutter_max + 1))
    for _ in range(count):
        kind = int(rng.integers(0, 4))
        color = colors[int(rng.integers(0, len(colors)))]
        if kind == 0:  # thin bar
            w, h = int(rng.integers(30, 81)), int(rng.integers(2, 6))
        elif kind == 1:  # solid block
            w, h = int(rng.integers(8, 29)), int(rng.integers(6, 23))
        elif kind == 2:  # filled circle
            r = int(rng.integers(4, 11))
            w = h = 2 * r + 1
        else:  # aligned row of filled circles
            r = int(rng.integers(4, 9))
            n = int(rng.integers(3, 6))
            gap = int(rng.integers(2, 6))
            w, h = n * (2 * r + 1) + (n - 1) * gap, 2 * r + 1
        pos = _place(rng, (w, h), params, card_rects, margin=4)
        if pos is None:
            continue
        x, y = pos
        if kind in (0, 1):
            img[y : y + h, x : x + w] = color
        elif kind == 2:
            _draw_circle(img, x, y, r, color)
        else:
            cx = x
            for _ in range(n):
                _draw_circle(img, cx, y, r, color)
                cx += 2 * r + 1 + gap
        rects.append((x, y, w, h))
    return rects


def _draw_circle(img, x, y, r, color) -> None:
    size = 2 * r + 1
    yy, xx = np.ogrid[:size, :size]
    disk = (yy - r) ** 2 + (xx - r) ** 2 <= r * r
    region = img[y : y + size, x : x + size]
    region[disk] = color


def _generate_still(rng, params: SynthParams):
    bg, card_color, ink = _palette(rng)
    img = _textured_background(rng, params.width, params.height, bg)
    card_rects = []
    word_rects = []
    n_cards = int(rng.integers(1, params.max_cards + 1))
    for _ in range(n_cards):
        word = str(rng.choice(np.array(params.words)))
        scale = int(rng.integers(params.min_scale, params.max_scale + 1))
        text_mask = render_text_mask(word, scale)
        th, tw = text_mask.shape
        size = (tw + 2 * _CARD_PAD, th + 2 * _CARD_PAD)
        pos = _place(rng, size, params, card_rects)
        if pos is None:
            continue
        bbox = _draw_card(img, pos[0], pos[1], text_mask, card_color, ink)
        word_rects.append((bbox, word))
        card_rects.append((pos[0], pos[1], size[0], size[1]))
    clutter = _add_clutter(rng, img, card_rects, [card_color, ink], params)
    return img, word_rects, clutter


def _generate_sequence(rng, params: SynthParams):
    """Static textured background with the card translating over it."""
    bg, card_color, ink = _palette(rng)
    background = _textured_background(rng, params.width, params.height, bg)
    text_mask = render_text_mask(params.sequence_text, params.sequence_scale)
    th, tw = text_mask.shape
    cw, ch = tw + 2 * _CARD_PAD, th + 2 * _CARD_PAD
    amp = params.shake_amplitude
    if cw + 2 * (amp + _EDGE_MARGIN) > params.width or ch + 2 * (amp + _EDGE_MARGIN) > params.height:
        raise ParameterError("sequence card does not fit the frame with the shake amplitude")
    cx0 = (params.width - cw) // 2
    cy0 = (params.height - ch) // 2
    frames = []
    for k in range(params.frames_per_sequence):
        dx = round(amp * math.sin(2.0 * math.pi * k / 15.0))
        dy = round(0.5 * amp * math.sin(2.0 * math.pi * k / 9.0))
        frame = background.copy()
        _draw_card(frame, cx0 + dx, cy0 + dy, text_mask, card_color, ink)
        frames.append(frame)
    return frames


def _random_negative_rects(rng, params: SynthParams, word_rects, count: int):
    forbidden = [_expand(r, 2) for r, _ in word_rects]
    rects = []
    attempts = 0
    while len(rects) < count and attempts < count * 30:
        attempts += 1
        h = int(rng.integers(14, 45))
        w = min(int(h * rng.uniform(2.0, 7.0)), params.width - 2)
        if w < h:
            w = h
        x = int(rng.integers(0, params.width - w))
        y = int(rng.integers(0, params.height - h))
        rect = (x, y, w, h)
        if any(_intersects(rect, f) for f in forbidden):
            continue
        rects.append(rect)
    return rects


def _clutter_negative_rects(params: SynthParams, word_rects, clutter):
    forbidden = [_expand(r, 2) for r, _ in word_rects]
    rects = []
    for rect in clutter:
        grown = _expand(rect, 4)
        x = max(0, grown[0])
        y = max(0, grown[1])
        w = min(params.width, grown[0] + grown[2]) - x
        h = min(params.height, grown[1] + grown[3]) - y
        if w < 8 or h < 8:
            continue
        rect = (x, y, w, h)
        if any(_intersects(rect, f) for f in forbidden):
            continue
        rects.append(rect)
    return rects


def _mined_negative_rects(img, word_rects, cfg: PipelineConfig, limit: int):
    """Candidate regions the rule-based pass produced away from any word."""
    rects = []
    for region in find_candidate_regions(img, cfg.layout):
        if any(_intersects(region.bbox, r) for r, _ in word_rects):
            continue
        rects.append(region.bbox)
        if len(rects) >= limit:
            break
    return rects


def _positive_rects(rng, params: SynthParams, word_rects):
    rects = []
    for (x, y, w, h), _ in word_rects:
        rects.append((x, y, w, h))
        for _ in range(params.jitters_per_positive):
            dx0, dy0, dx1, dy1 = (int(v) for v in rng.integers(0, 3, size=4))
            nx, ny = max(0, x - dx0), max(0, y - dy0)
            nx1 = min(params.width, x + w + dx1)
            ny1 = min(params.height, y + h + dy1)
            rects.append((nx, ny, nx1 - nx, ny1 - ny))
    return rects


def _crop_features(gray, rect, cfg: PipelineConfig):
    x, y, w, h = rect
    return extract_features(gray[y : y + h, x : x + w], cfg.features)


def generate_corpus(
    out_dir,
    seed: int,
    params: SynthParams | None = None,
    cfg: PipelineConfig | None = None,
) -> dict:
    """Write the full corpus under ``out_dir``; returns a summary dict.

    Layout: ``images/`` (train_*.ppm, test_*.ppm), ``truth_train.txt``,
    ``truth_test.txt``, ``frames/seq_NNN/frame_NNNN.ppm``, ``train_pos.fvec``,
    ``train_neg.fvec``, and ``manifest.txt``.
    """
    params = params or SynthParams()
    params.validate()
    cfg = cfg or PipelineConfig()
    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)

    pos_vecs: list[np.ndarray] = []
    neg_vecs: list[np.ndarray] = []
    truth_train = GroundTruthSet()
    for i in range(params.train_images):
        img, word_rects, clutter = _generate_still(rng, params)
        name = f"train_{i:03d}"
        write_ppm(out / "images" / f"{name}.ppm", img)
        truth_train.images[name] = GroundTruthImage(
            width=params.width,
            height=params.height,
            rects=[r for r, _ in word_rects],
            transcriptions=[w for _, w in word_rects],
        )
        gray = to_grayscale(img)
        for rect in _positive_rects(rng, params, word_rects):
            pos_vecs.append(_crop_features(gray, rect, cfg))
        negatives = _random_negative_rects(rng, params, word_rects, params.negatives_per_image)
        negatives += _clutter_negative_rects(params, word_rects, clutter)
        negatives += _mined_negative_rects(img, word_rects, cfg, params.mined_negatives_per_image)
        for rect in negatives:
            neg_vecs.append(_crop_features(gray, rect, cfg))
    save_ground_truth(truth_train, out / "truth_train.txt")

    truth_test = GroundTruthSet()
    for i in range(params.test_images):
        img, word_rects, _ = _generate_still(rng, params)
        name = f"test_{i:03d}"
        write_ppm(out / "images" / f"{name}.ppm", img)
        truth_test.images[name] = GroundTruthImage(
            width=params.width,
            height=params.height,
            rects=[r for r, _ in word_rects],
            transcriptions=[w for _, w in word_rects],
        )
    save_ground_truth(truth_test, out / "truth_test.txt")

    for s in range(params.sequences):
        seq_dir = out / "frames" / f"seq_{s:03d}"
        seq_dir.mkdir(parents=True, exist_ok=True)
        for k, frame in enumerate(_generate_sequence(rng, params)):
            write_ppm(seq_dir / f"frame_{k:04d}.ppm", frame)

    length = cfg.features.vector_length
    pos_arr = np.array(pos_vecs).reshape(len(pos_vecs), length)
    neg_arr = np.array(neg_vecs).reshape(len(neg_vecs), length)
    write_fvec(out / "train_pos.fvec", pos_arr, np.ones(len(pos_vecs), dtype=np.uint8))
    write_fvec(out / "train_neg.fvec", neg_arr, np.zeros(len(neg_vecs), dtype=np.uint8))

    summary = {
        "seed": seed,
        "train_images": params.train_images,
        "test_images": params.test_images,
        "sequences": params.sequences,
        "positives": len(pos_vecs),
        "negatives": len(neg_vecs),
        "sequence_text": params.sequence_text,
    }
    manifest = "".join(f"{k} = {v}\n" for k, v in summary.items())
    (out / "manifest.txt").write_text(manifest, encoding="utf-8", newline="\n")
    return summary
