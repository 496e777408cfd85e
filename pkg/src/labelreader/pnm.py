"""Binary PPM (P6) and PGM (P5) reading and writing.

Masks use the PGM convention 0 = background, 255 = foreground. PNG input is
supported through the same loader when Pillow is installed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DimensionError, ImageFormatError

_WS = b" \t\r\n\x0b\x0c"


def _parse_header(data: bytes, path) -> tuple[bytes, int, int, int, int]:
    pos = 0
    n = len(data)

    def token() -> bytes:
        nonlocal pos
        while pos < n:
            c = data[pos]
            if c in _WS:
                pos += 1
            elif c == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < n and data[pos] not in _WS:
            pos += 1
        if start == pos:
            raise ImageFormatError(f"{path}: truncated header")
        return data[start:pos]

    magic = token()
    try:
        width = int(token())
        height = int(token())
        maxval = int(token())
    except ValueError as exc:
        raise ImageFormatError(f"{path}: non-numeric header field") from exc
    pos += 1  # single whitespace byte after maxval
    return magic, width, height, maxval, pos


def read_pnm(path) -> np.ndarray:
    """Read a binary PPM/PGM; returns (h, w, 3) for P6 and (h, w) for P5."""
    data = Path(path).read_bytes()
    magic, width, height, maxval, offset = _parse_header(data, path)
    if magic not in (b"P6", b"P5"):
        raise ImageFormatError(f"{path}: unsupported magic {magic!r} (want P6 or P5)")
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"{path}: unsupported maxval {maxval} (only 255)")
    channels = 3 if magic == b"P6" else 1
    expected = width * height * channels
    raster = data[offset : offset + expected]
    if len(raster) != expected:
        raise ImageFormatError(f"{path}: raster truncated ({len(raster)} of {expected} bytes)")
    arr = np.frombuffer(raster, dtype=np.uint8)
    if channels == 3:
        return arr.reshape(height, width, 3).copy()
    return arr.reshape(height, width).copy()


def write_ppm(path, frame: np.ndarray) -> None:
    f = np.asarray(frame, dtype=np.uint8)
    if f.ndim != 3 or f.shape[2] != 3:
        raise DimensionError(f"write_ppm expects an (h, w, 3) frame, got shape {f.shape}")
    h, w = f.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(f).tobytes())


def write_pgm(path, image: np.ndarray) -> None:
    g = np.asarray(image, dtype=np.uint8)
    if g.ndim != 2:
        raise DimensionError(f"write_pgm expects an (h, w) image, got shape {g.shape}")
    h, w = g.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(g).tobytes())


def write_mask(path, mask: np.ndarray) -> None:
    m = np.asarray(mask, dtype=bool)
    write_pgm(path, np.where(m, 255, 0).astype(np.uint8))


def read_mask(path) -> np.ndarray:
    g = read_pnm(path)
    if g.ndim != 2:
        raise ImageFormatError(f"{path}: expected a P5 mask, got a color image")
    return g >= 128


def load_image(path) -> np.ndarray:
    """Load a color frame from .ppm/.pgm (and .png when Pillow is available)."""
    suffix = Path(path).suffix.lower()
    if suffix in (".ppm", ".pgm", ".pnm"):
        img = read_pnm(path)
    elif suffix == ".png":
        try:
            from PIL import Image
        except ImportError as exc:
            raise ImageFormatError("PNG support requires Pillow (pip install Pillow)") from exc
        img = np.asarray(Image.open(path).convert("RGB"), dtype=np.uint8)
    else:
        raise ImageFormatError(f"{path}: unsupported image extension {suffix!r}")
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    return img


def load_frame_dir(path) -> list[np.ndarray]:
    """Load every .ppm in a directory, ordered lexicographically by filename."""
    root = Path(path)
    if not root.is_dir():
        raise ImageFormatError(f"{root}: not a directory")
    names = sorted(p.name for p in root.iterdir() if p.suffix.lower() == ".ppm")
    if not names:
        raise ImageFormatError(f"{root}: no .ppm frames found")
    frames = []
    for name in names:
        img = read_pnm(root / name)
        if img.ndim != 3:
            raise ImageFormatError(f"{root / name}: frame sequences must be P6 color")
        frames.append(img)
    first = frames[0].shape
    for name, f in zip(names, frames):
        if f.shape != first:
            raise DimensionError(f"{root / name}: frame shape {f.shape} != {first}")
    return frames
