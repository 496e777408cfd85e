"""From localized text regions to recognized words and speech scripts.

Regions are padded by a small margin, binarized with Otsu's threshold (the
margin band is always forced to background), handed to an external OCR
command as a temporary PGM, and the surviving words are written to a speech
script that a text-to-speech adapter can consume.
"""

from __future__ import annotations

import logging
import os
import shlex
import string
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, DimensionError, OcrError, ParameterError, TtsError
from .pnm import write_mask

log = logging.getLogger(__name__)

PAD_PIXELS = 5  # region enlargement per side: 10 px total per dimension
MARGIN_PIXELS = 5  # binarization band forced to background
MIN_WORD_LENGTH = 3


@dataclass
class TextRegion:
    bbox: tuple[int, int, int, int]  # in source-image pixels
    padded_bbox: tuple[int, int, int, int]
    binarized: np.ndarray | None = None  # bool over padded_bbox, True = ink


@dataclass
class RecognizedText:
    region: TextRegion
    raw: str
    words: list[str]


@dataclass
class Prosody:
    rate: int = 0  # -10..10
    volume: int = 80  # 0..100
    tone: int = 0  # -10..10

    def validate(self) -> None:
        if not -10 <= self.rate <= 10:
            raise ParameterError(f"rate must be in -10..10, got {self.rate}")
        if not 0 <= self.volume <= 100:
            raise ParameterError(f"volume must be in 0..100, got {self.volume}")
        if not -10 <= self.tone <= 10:
            raise ParameterError(f"tone must be in -10..10, got {self.tone}")


@dataclass
class SpeechScript:
    entries: list[tuple[int, str]] = field(default_factory=list)
    prosody: Prosody = field(default_factory=Prosody)


@dataclass
class OcrAdapter:
    """External OCR as a command template; ``{input}`` is the image path."""

    command: str
    timeout_s: float = 30.0

    def validate(self) -> None:
        if self.command.count("{input}") != 1:
            raise ParameterError("OCR command template must contain {input} exactly once")


@dataclass
class TtsAdapter:
    """External speech command; ``{input}`` is the script path.

    The command string ``"null"`` selects a built-in adapter that just prints
    script entries to standard output, for headless use.
    """

    command: str = "null"
    timeout_s: float = 60.0

    def validate(self) -> None:
        if self.command != "null" and self.command.count("{input}") != 1:
            raise ParameterError("TTS command template must contain {input} exactly once")


def pad_region(
    bbox: tuple[int, int, int, int],
    image_size: tuple[int, int],
    pad: int = PAD_PIXELS,
) -> tuple[int, int, int, int]:
    """Expand a bbox by ``pad`` pixels per side, clamped to the image."""
    width, height = image_size
    x, y, w, h = bbox
    if x < 0 or y < 0 or w < 1 or h < 1 or x + w > width or y + h > height:
        raise ParameterError(f"bbox {bbox} does not lie inside a {width}x{height} image")
    x0 = max(0, x - pad)
    y0 = max(0, y - pad)
    x1 = min(width, x + w + pad)
    y1 = min(height, y + h + pad)
    return (x0, y0, x1 - x0, y1 - y0)


def otsu_threshold(histogram: np.ndarray) -> int:
    """Threshold maximizing between-class variance over a 256-bin histogram.

    Classes are values <= t versus values > t; ties resolve to the lowest t.
    """
    hist = np.asarray(histogram, dtype=np.float64)
    if hist.shape != (256,):
        raise DimensionError(f"expected a 256-bin histogram, got shape {hist.shape}")
    total = hist.sum()
    if total <= 0 or (hist > 0).sum() < 2:
        raise DegenerateInputError("histogram has fewer than two populated bins")
    p = hist / total
    omega = np.cumsum(p)
    mu = np.cumsum(p * np.arange(256, dtype=np.float64))
    mu_total = mu[-1]
    w0 = omega
    w1 = 1.0 - omega
    valid = (w0 > 0) & (w1 > 0)
    sigma = np.full(256, -1.0)
    mu0 = np.divide(mu, w0, out=np.zeros(256), where=valid)
    mu1 = np.divide(mu_total - mu, w1, out=np.zeros(256), where=valid)
    sigma[valid] = (w0 * w1 * (mu0 - mu1) ** 2)[valid]
    return int(np.argmax(sigma))


def otsu_binarize(patch: np.ndarray, margin: int = MARGIN_PIXELS) -> np.ndarray:
    """Binarize a padded text patch; True marks ink.

    The minority pixel class is taken as ink (text is sparser than its
    background; exact ties count the darker class as ink), and the outer
    ``margin`` band is always background.
    """
    p = np.asarray(patch)
    if p.ndim != 2 or p.size == 0:
        raise DimensionError(f"expected a non-empty 2-D patch, got shape {p.shape}")
    if p.min() == p.max():
        raise DegenerateInputError("constant patch has a degenerate histogram")
    hist = np.bincount(p.astype(np.uint8).ravel(), minlength=256)
    t = otsu_threshold(hist)
    dark = p <= t
    n_dark = int(dark.sum())
    ink = dark if n_dark * 2 <= p.size else ~dark
    if margin > 0:
        ink = ink.copy()
        ink[:margin, :] = False
        ink[-margin:, :] = False
        ink[:, :margin] = False
        ink[:, -margin:] = False
    return ink


def filter_words(raw: str) -> list[str]:
    """Whitespace tokens, stripped of edge punctuation, kept iff >= 3 chars."""
    words = []
    for token in raw.split():
        t = token.strip(string.punctuation)
        if len(t) >= MIN_WORD_LENGTH:
            words.append(t)
    return words


def _run_command(args: list[str], timeout_s: float, err_cls, what: str):
    try:
        return subprocess.run(args, capture_output=True, timeout=timeout_s)
    except subprocess.TimeoutExpired as exc:
        raise err_cls(f"{what} timed out after {timeout_s} s") from exc
    except FileNotFoundError as exc:
        raise err_cls(f"{what} command not found: {args[0]}") from exc


def run_ocr(adapter: OcrAdapter, region: TextRegion, workdir=None) -> RecognizedText:
    """Write the binarized region to a temp PGM and run the OCR command on it.

    The command's trimmed standard output is the raw transcription; an empty
    transcription is a valid result, a nonzero exit status is not.
    """
    adapter.validate()
    if region.binarized is None:
        raise ParameterError("region has no binarized patch to recognize")
    fd, tmp_path = tempfile.mkstemp(suffix=".pgm", dir=workdir)
    os.close(fd)
    try:
        write_mask(tmp_path, region.binarized)
        args = [tok.replace("{input}", tmp_path) for tok in shlex.split(adapter.command)]
        proc = _run_command(args, adapter.timeout_s, OcrError, "OCR")
        if proc.returncode != 0:
            detail = proc.stderr.decode("utf-8", errors="replace").strip()
            raise OcrError(f"OCR exited with status {proc.returncode}: {detail or 'no stderr'}")
        raw = proc.stdout.decode("utf-8", errors="replace").strip()
    finally:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
    return RecognizedText(region=region, raw=raw, words=filter_words(raw))


def reading_order(texts: list[RecognizedText]) -> list[RecognizedText]:
    """Top-to-bottom, then left-to-right by region bbox."""
    return sorted(texts, key=lambda t: (t.region.bbox[1], t.region.bbox[0]))


def format_script(script: SpeechScript) -> str:
    lines = [
        f"#rate {script.prosody.rate}",
        f"#volume {script.prosody.volume}",
        f"#tone {script.prosody.tone}",
    ]
    lines.extend(f"{rid}: {text}" for rid, text in script.entries)
    return "\n".join(lines) + "\n"


def emit_script(
    texts: list[RecognizedText],
    prosody: Prosody | None = None,
    path=None,
) -> SpeechScript:
    """Assemble the speech script (and write it when ``path`` is given).

    Regions are numbered in reading order; regions whose word list came back
    empty are omitted from the entry lines.
    """
    prosody = prosody or Prosody()
    prosody.validate()
    ordered = reading_order(texts)
    entries = [(i, " ".join(t.words)) for i, t in enumerate(ordered) if t.words]
    script = SpeechScript(entries=entries, prosody=prosody)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_script(script))
    return script


def speak(adapter: TtsAdapter, script_path) -> None:
    """Hand the script file to the speech command (or echo it, for "null")."""
    adapter.validate()
    if adapter.command == "null":
        for line in Path(script_path).read_text(encoding="utf-8").splitlines():
            if line and not line.startswith("#"):
                print(line)
        return
    args = [tok.replace("{input}", str(script_path)) for tok in shlex.split(adapter.command)]
    proc = _run_command(args, adapter.timeout_s, TtsError, "TTS")
    if proc.returncode != 0:
        detail = proc.stderr.decode("utf-8", errors="replace").strip()
        raise TtsError(f"TTS exited with status {proc.returncode}: {detail or 'no stderr'}")
