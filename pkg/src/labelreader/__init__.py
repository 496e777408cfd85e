"""Camera-based assistive text reading.

Isolates a hand-held object by asking the user to shake it in front of the
camera, localizes horizontal text on the object with a rule-based layout pass
plus a boosted-stump cascade, binarizes the regions, delegates recognition to
an external OCR command, and writes the recognized words to a speech script.
"""

from .cascade import (
    CascadeClassifier,
    CascadeStage,
    TrainConfig,
    WeakLearner,
    classify,
    load_model,
    save_model,
    train_cascade,
    train_stage,
    train_stump,
)
from .config import PipelineConfig, load_config
from .errors import LabelReaderError
from .evaluation import GroundTruthSet, Metrics, evaluate, iou, load_ground_truth
from .features import (
    FeatureParams,
    block_features,
    edge_distribution_map,
    extract_features,
    normalize_patch,
    read_fvec,
    stroke_orientation_map,
    write_fvec,
)
from .imaging import (
    Component,
    GradientField,
    canny,
    connected_components,
    gaussian_smooth,
    sobel,
    to_grayscale,
)
from .layout import (
    CandidateRegion,
    CharBox,
    ColorLayer,
    LayoutParams,
    extract_char_candidates,
    find_candidate_regions,
    group_adjacent,
    layout_score,
    reduce_colors,
)
from .motion import (
    BackgroundModel,
    MogParams,
    RegionOfInterest,
    aggregate_foreground,
    extract_roi,
    mog_init,
    mog_update,
)
from .pipeline import PipelineResult, compute_roi, find_text_regions, run_pipeline
from .readout import (
    OcrAdapter,
    Prosody,
    RecognizedText,
    SpeechScript,
    TextRegion,
    TtsAdapter,
    emit_script,
    filter_words,
    otsu_binarize,
    otsu_threshold,
    pad_region,
    run_ocr,
    speak,
)
from .synth import SynthParams, generate_corpus

__version__ = "0.1.0"

__all__ = [
    "BackgroundModel",
    "CandidateRegion",
    "CascadeClassifier",
    "CascadeStage",
    "CharBox",
    "ColorLayer",
    "Component",
    "FeatureParams",
    "GradientField",
    "GroundTruthSet",
    "LabelReaderError",
    "LayoutParams",
    "Metrics",
    "MogParams",
    "OcrAdapter",
    "PipelineConfig",
    "PipelineResult",
    "Prosody",
    "RecognizedText",
    "RegionOfInterest",
    "SpeechScript",
    "SynthParams",
    "TextRegion",
    "TrainConfig",
    "TtsAdapter",
    "WeakLearner",
    "aggregate_foreground",
    "block_features",
    "canny",
    "classify",
    "compute_roi",
    "connected_components",
    "edge_distribution_map",
    "emit_script",
    "evaluate",
    "extract_char_candidates",
    "extract_features",
    "extract_roi",
    "filter_words",
    "find_candidate_regions",
    "find_text_regions",
    "gaussian_smooth",
    "generate_corpus",
    "group_adjacent",
    "iou",
    "layout_score",
    "load_config",
    "load_ground_truth",
    "load_model",
    "mog_init",
    "mog_update",
    "normalize_patch",
    "otsu_binarize",
    "otsu_threshold",
    "pad_region",
    "read_fvec",
    "reduce_colors",
    "run_ocr",
    "run_pipeline",
    "save_model",
    "sobel",
    "speak",
    "stroke_orientation_map",
    "to_grayscale",
    "train_cascade",
    "train_stage",
    "train_stump",
    "write_fvec",
]
