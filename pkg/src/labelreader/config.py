"""Pipeline configuration: defaults plus a flat ``key = value`` file format.

Lines are ``key = value``; ``#`` starts a comment; unknown keys are rejected.
Every tunable of every stage is reachable here so experiments never require
code edits.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .cascade import TrainConfig
from .errors import ConfigError
from .features import FeatureParams
from .layout import LayoutParams
from .motion import MogParams
from .readout import Prosody


@dataclass
class PipelineConfig:
    mog: MogParams = field(default_factory=MogParams)
    layout: LayoutParams = field(default_factory=LayoutParams)
    features: FeatureParams = field(default_factory=FeatureParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    prosody: Prosody = field(default_factory=Prosody)
    roi_persistence: float = 0.3
    ocr_command: str = ""
    ocr_timeout_s: float = 30.0
    tts_command: str = "null"

    def validate(self) -> None:
        self.mog.validate()
        self.layout.validate()
        self.features.validate()
        self.train.validate()
        self.prosody.validate()
        if not 0.0 < self.roi_persistence <= 1.0:
            raise ConfigError(f"roi.persistence must be in (0, 1], got {self.roi_persistence}")


def _parse_patterns(text: str) -> tuple[tuple[int, int], ...]:
    patterns = []
    for chunk in text.split(","):
        chunk = chunk.strip().lower()
        rows, _, cols = chunk.partition("x")
        patterns.append((int(rows), int(cols)))
    if not patterns:
        raise ValueError("empty pattern list")
    return tuple(patterns)


# key -> (section attribute or None for top level, field name, parser)
_KEYS = {
    "mog.components": ("mog", "components", int),
    "mog.learning_rate": ("mog", "learning_rate", float),
    "mog.match_threshold": ("mog", "match_threshold", float),
    "mog.background_fraction": ("mog", "background_fraction", float),
    "mog.initial_variance": ("mog", "initial_variance", float),
    "mog.variance_floor": ("mog", "variance_floor", float),
    "roi.persistence": (None, "roi_persistence", float),
    "layout.max_layers": ("layout", "max_layers", int),
    "layout.min_char_height": ("layout", "min_char_height", int),
    "layout.max_char_height_frac": ("layout", "max_char_height_frac", float),
    "layout.min_aspect": ("layout", "min_aspect", float),
    "layout.max_aspect": ("layout", "max_aspect", float),
    "layout.min_fill": ("layout", "min_fill", float),
    "layout.max_fill": ("layout", "max_fill", float),
    "layout.min_overlap": ("layout", "min_overlap", float),
    "layout.max_gap_factor": ("layout", "max_gap_factor", float),
    "layout.max_height_ratio": ("layout", "max_height_ratio", float),
    "layout.min_score": ("layout", "min_score", float),
    "feature.patch_height": ("features", "patch_height", int),
    "feature.min_patch_width": ("features", "min_patch_width", int),
    "feature.max_patch_width": ("features", "max_patch_width", int),
    "feature.patterns": ("features", "patterns", _parse_patterns),
    "canny.low": ("features", "canny_low", float),
    "canny.high": ("features", "canny_high", float),
    "canny.sigma": ("features", "canny_sigma", float),
    "cascade.min_detection": ("train", "min_detection", float),
    "cascade.max_false_positive": ("train", "max_false_positive", float),
    "cascade.global_false_positive": ("train", "global_false_positive", float),
    "cascade.max_stages": ("train", "max_stages", int),
    "cascade.max_learners": ("train", "max_learners_per_stage", int),
    "prosody.rate": ("prosody", "rate", int),
    "prosody.volume": ("prosody", "volume", int),
    "prosody.tone": ("prosody", "tone", int),
    "ocr.command": (None, "ocr_command", str),
    "ocr.timeout_s": (None, "ocr_timeout_s", float),
    "tts.command": (None, "tts_command", str),
}


def load_config(path, base: PipelineConfig | None = None) -> PipelineConfig:
    """Read a config file on top of the defaults (or an explicit base)."""
    cfg = copy.deepcopy(base) if base is not None else PipelineConfig()
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw_line!r}")
        spec = _KEYS.get(key)
        if spec is None:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        section, attr, parse = spec
        try:
            parsed = parse(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
        target = cfg if section is None else getattr(cfg, section)
        setattr(target, attr, parsed)
    try:
        cfg.validate()
    except Exception as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return cfg


def config_keys() -> list[str]:
    """All recognized config keys, for documentation and error messages."""
    return sorted(_KEYS)
