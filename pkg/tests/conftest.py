import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from labelreader import PipelineConfig, read_fvec, train_cascade
from labelreader.cascade import CascadeClassifier
from labelreader.synth import SynthParams, generate_corpus

CORPUS_SEED = 7


@dataclass
class Corpus:
    root: Path
    classifier: CascadeClassifier
    cfg: PipelineConfig
    build_seconds: float


@pytest.fixture(scope="session")
def corpus(tmp_path_factory) -> Corpus:
    """Full-size synthetic corpus plus a cascade trained on its train split."""
    root = tmp_path_factory.mktemp("corpus")
    cfg = PipelineConfig()
    t0 = time.monotonic()
    generate_corpus(root, CORPUS_SEED, SynthParams(), cfg)
    pos, _ = read_fvec(root / "train_pos.fvec", cfg.features.vector_length)
    neg, _ = read_fvec(root / "train_neg.fvec", cfg.features.vector_length)
    classifier = train_cascade(pos, neg, cfg.train)
    return Corpus(
        root=root,
        classifier=classifier,
        cfg=cfg,
        build_seconds=time.monotonic() - t0,
    )


@pytest.fixture(scope="session")
def stub_ocr_command() -> str:
    return f"{sys.executable} -m labelreader.stub_ocr {{input}}"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
