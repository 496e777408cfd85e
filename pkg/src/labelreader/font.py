"""Built-in 5x7 dot-matrix font for synthetic rendering and template matching.

Every glyph inks its top and bottom rows and its leftmost and rightmost
columns, and forms a single 8-connected component; the corpus generator and
the template-matching stub OCR both rely on those properties.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

GLYPH_WIDTH = 5
GLYPH_HEIGHT = 7
CHAR_ADVANCE = 6  # glyph cells plus one blank column
SPACE_ADVANCE = 3  # extra cells for a space: word gap = 4 blank columns

FONT: dict[str, tuple[str, ...]] = {
    "A": (" XXX ", "X   X", "X   X", "XXXXX", "X   X", "X   X", "X   X"),
    "B": ("XXXX ", "X   X", "X   X", "XXXX ", "X   X", "X   X", "XXXX "),
    "C": (" XXXX", "X    ", "X    ", "X    ", "X    ", "X    ", " XXXX"),
    "D": ("XXXX ", "X   X", "X   X", "X   X", "X   X", "X   X", "XXXX "),
    "E": ("XXXXX", "X    ", "X    ", "XXXX ", "X    ", "X    ", "XXXXX"),
    "F": ("XXXXX", "X    ", "X    ", "XXXX ", "X    ", "X    ", "X    "),
    "G": (" XXXX", "X    ", "X    ", "X XXX", "X   X", "X   X", " XXXX"),
    "H": ("X   X", "X   X", "X   X", "XXXXX", "X   X", "X   X", "X   X"),
    "I": ("XXXXX", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", "XXXXX"),
    "J": ("XXXXX", "    X", "    X", "    X", "    X", "X   X", " XXX "),
    "K": ("X   X", "X  X ", "X X  ", "XX   ", "X X  ", "X  X ", "X   X"),
    "L": ("X    ", "X    ", "X    ", "X    ", "X    ", "X    ", "XXXXX"),
    "M": ("X   X", "XX XX", "X X X", "X X X", "X   X", "X   X", "X   X"),
    "N": ("X   X", "XX  X", "X X X", "X X X", "X  XX", "X   X", "X   X"),
    "O": (" XXX ", "X   X", "X   X", "X   X", "X   X", "X   X", " XXX "),
    "P": ("XXXX ", "X   X", "X   X", "XXXX ", "X    ", "X    ", "X    "),
    "Q": (" XXX ", "X   X", "X   X", "X   X", "X X X", "X  X ", " XX X"),
    "R": ("XXXX ", "X   X", "X   X", "XXXX ", "X X  ", "X  X ", "X   X"),
    "S": (" XXXX", "X    ", "X    ", " XXX ", "    X", "    X", "XXXX "),
    "T": ("XXXXX", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  "),
    "U": ("X   X", "X   X", "X   X", "X   X", "X   X", "X   X", " XXX "),
    "V": ("X   X", "X   X", "X   X", "X   X", "X   X", " X X ", "  X  "),
    "W": ("X   X", "X   X", "X   X", "X X X", "X X X", "XX XX", "X   X"),
    "X": ("X   X", "X   X", " X X ", "  X  ", " X X ", "X   X", "X   X"),
    "Y": ("X   X", "X   X", " X X ", "  X  ", "  X  ", "  X  ", "  X  "),
    "Z": ("XXXXX", "    X", "   X ", "  X  ", " X   ", "X    ", "XXXXX"),
    "0": (" XXX ", "X   X", "X  XX", "X X X", "XX  X", "X   X", " XXX "),
    "1": ("  X  ", " XX  ", "  X  ", "  X  ", "  X  ", "  X  ", "XXXXX"),
    "2": (" XXX ", "X   X", "    X", "   X ", "  X  ", " X   ", "XXXXX"),
    "3": ("XXXX ", "    X", "   X ", "  XX ", "    X", "X   X", " XXX "),
    "4": ("   X ", "  XX ", " X X ", "X  X ", "XXXXX", "   X ", "   X "),
    "5": ("XXXXX", "X    ", "XXXX ", "    X", "    X", "X   X", " XXX "),
    "6": ("  XX ", " X   ", "X    ", "XXXX ", "X   X", "X   X", " XXX "),
    "7": ("XXXXX", "    X", "   X ", "  X  ", " X   ", " X   ", " X   "),
    "8": (" XXX ", "X   X", "X   X", " XXX ", "X   X", "X   X", " XXX "),
    "9": (" XXX ", "X   X", "X   X", " XXXX", "    X", "   X ", " XX  "),
}


def glyph_bitmap(char: str) -> np.ndarray:
    """Boolean (7, 5) bitmap of one glyph."""
    rows = FONT.get(char)
    if rows is None:
        raise ParameterError(f"character {char!r} is not in the built-in font")
    return np.array([[c == "X" for c in row] for row in rows], dtype=bool)


def render_text_mask(text: str, scale: int = 1) -> np.ndarray:
    """Boolean ink mask of a one-line text, tight to the ink extent.

    Characters advance by 6 cells (5 glyph columns plus one blank), a space
    adds 3 more; the mask is upscaled by integer ``scale`` with no smoothing.
    """
    if scale < 1:
        raise ParameterError(f"scale must be >= 1, got {scale}")
    stripped = text.strip()
    if not stripped or any(c != " " and c not in FONT for c in stripped):
        raise ParameterError(f"cannot render {text!r} with the built-in font")
    cells_wide = 0
    placements = []
    x = 0
    for ch in stripped:
        if ch == " ":
            x += SPACE_ADVANCE
            continue
        placements.append((x, glyph_bitmap(ch)))
        cells_wide = x + GLYPH_WIDTH
        x += CHAR_ADVANCE
    grid = np.zeros((GLYPH_HEIGHT, cells_wide), dtype=bool)
    for gx, bitmap in placements:
        grid[:, gx : gx + GLYPH_WIDTH] |= bitmap
    if scale == 1:
        return grid
    return np.kron(grid, np.ones((scale, scale), dtype=bool))
