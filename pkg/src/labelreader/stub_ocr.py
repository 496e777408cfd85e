"""Template-matching OCR stub for the built-in font.

Reads a binarized P5 PGM (255 = ink), segments characters by blank columns,
downsamples each to the 5x7 glyph grid, and prints the nearest-glyph string.
Only useful against text rendered with :mod:`labelreader.font`; it exists so
the pipeline can be exercised end to end without an external OCR engine.

Run as ``python -m labelreader.stub_ocr image.pgm``.
"""

from __future__ import annotations

import sys

import numpy as np

from .font import FONT, GLYPH_HEIGHT, GLYPH_WIDTH, glyph_bitmap
from .pnm import read_mask

_TEMPLATES = {ch: glyph_bitmap(ch) for ch in sorted(FONT)}


def _segments(col_ink: np.ndarray, word_gap: int) -> list[tuple[int, int, bool]]:
    """(start, end, preceded_by_word_gap) for every inked column run."""
    runs = []
    x = 0
    n = col_ink.size
    while x < n:
        if not col_ink[x]:
            x += 1
            continue
        start = x
        while x < n and col_ink[x]:
            x += 1
        runs.append((start, x))
    out = []
    prev_end = None
    for start, end in runs:
        gap = 0 if prev_end is None else start - prev_end
        out.append((start, end, prev_end is not None and gap >= word_gap))
        prev_end = end
    return out


def _match_glyph(cell_grid: np.ndarray) -> str:
    best_char = "?"
    best_dist = None
    for ch, template in _TEMPLATES.items():
        dist = int(np.count_nonzero(cell_grid != template))
        if best_dist is None or dist < best_dist:
            best_char, best_dist = ch, dist
    return best_char


def _downsample(ink: np.ndarray, rows: int, cols: int) -> np.ndarray:
    h, w = ink.shape
    grid = np.zeros((rows, cols), dtype=bool)
    rb = [round(i * h / rows) for i in range(rows + 1)]
    cbounds = [round(j * w / cols) for j in range(cols + 1)]
    for i in range(rows):
        for j in range(cols):
            block = ink[rb[i] : max(rb[i] + 1, rb[i + 1]), cbounds[j] : max(cbounds[j] + 1, cbounds[j + 1])]
            grid[i, j] = block.mean() >= 0.5
    return grid


def recognize(ink: np.ndarray) -> str:
    """Transcribe one line of built-in-font text from an ink mask."""
    if not ink.any():
        return ""
    rows = np.nonzero(ink.any(axis=1))[0]
    y0, y1 = int(rows[0]), int(rows[-1])
    line = ink[y0 : y1 + 1]
    scale = max(1, round((y1 - y0 + 1) / GLYPH_HEIGHT))
    word_gap = 2 * scale + 1  # intra-word gaps are one cell, word gaps are four
    chars = []
    for start, end, new_word in _segments(line.any(axis=0), word_gap):
        if new_word:
            chars.append(" ")
        seg = line[:, start:end]
        seg_rows = np.nonzero(seg.any(axis=1))[0]
        seg = seg[seg_rows[0] : seg_rows[-1] + 1]
        chars.append(_match_glyph(_downsample(seg, GLYPH_HEIGHT, GLYPH_WIDTH)))
    return "".join(chars)


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m labelreader.stub_ocr IMAGE.pgm", file=sys.stderr)
        return 2
    try:
        ink = read_mask(args[0])
    except Exception as exc:  # any unreadable input is a hard failure
        print(f"stub_ocr: {exc}", file=sys.stderr)
        return 1
    print(recognize(ink))
    return 0


if __name__ == "__main__":
    sys.exit(main())
