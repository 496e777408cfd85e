"""Command-line interface.

Exit codes: 0 success, 1 processing error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cascade import load_model, save_model, train_cascade
from .config import PipelineConfig, load_config
from .errors import ConfigError, GroundTruthError, LabelReaderError, NoObjectDetectedError
from .evaluation import evaluate, format_metrics, load_ground_truth, save_ground_truth
from .evaluation import GroundTruthImage, GroundTruthSet
from .features import read_fvec
from .layout import find_candidate_regions, reduce_colors
from .motion import aggregate_foreground, extract_roi, mog_init
from .pipeline import draw_rectangles, find_text_regions, run_pipeline
from .pnm import load_frame_dir, load_image, write_mask, write_pgm, write_ppm
from .readout import OcrAdapter, TtsAdapter, speak
from .synth import SynthParams, generate_corpus

log = logging.getLogger(__name__)


def _load_cfg(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return PipelineConfig()


def cmd_roi(args) -> int:
    cfg = _load_cfg(args)
    frames = load_frame_dir(args.frames_dir)
    model = mog_init(frames[0], cfg.mog)
    height, width = frames[0].shape[:2]
    masks = [np.zeros((height, width), dtype=bool)]
    for frame in frames[1:]:
        masks.append(model.update(frame))
    object_map = aggregate_foreground(masks)
    debug_dir = None
    if args.debug:
        debug_dir = Path(args.debug)
        debug_dir.mkdir(parents=True, exist_ok=True)
        for i, mask in enumerate(masks):
            write_mask(debug_dir / f"mask_{i:04d}.pgm", mask)
        scaled = np.floor(object_map * 255.0 + 0.5).astype(np.uint8)
        write_pgm(debug_dir / "aggregate_map.pgm", scaled)
    try:
        roi = extract_roi(object_map, cfg.roi_persistence)
    except NoObjectDetectedError:
        print("error: no object detected", file=sys.stderr)
        return 1
    if debug_dir is not None:
        write_mask(debug_dir / "roi_mask.pgm", roi.mask)
    print(" ".join(str(v) for v in roi.bbox))
    return 0


def _dump_layout_debug(debug_dir: Path, stem: str, image, cfg: PipelineConfig) -> None:
    debug_dir.mkdir(parents=True, exist_ok=True)
    layers = reduce_colors(image, cfg.layout.max_layers)
    index_map = np.zeros(image.shape[:2], dtype=np.uint8)
    for i, layer in enumerate(layers):
        index_map[layer.mask] = i
    write_pgm(debug_dir / f"{stem}_layers.pgm", index_map)
    regions = find_candidate_regions(image, cfg.layout)
    lines = [
        f"{r.bbox[0]} {r.bbox[1]} {r.bbox[2]} {r.bbox[3]} {r.score:.6f} {len(r.members)}"
        for r in regions
    ]
    (debug_dir / f"{stem}_regions.txt").write_text(
        "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
    )


def cmd_localize(args) -> int:
    cfg = _load_cfg(args)
    classifier = load_model(args.model)
    detections = GroundTruthSet()
    for image_path in args.images:
        image = load_image(image_path)
        rects = find_text_regions(image, classifier, cfg)
        stem = Path(image_path).stem
        if args.debug:
            _dump_layout_debug(Path(args.debug), stem, image, cfg)
        for rect in rects:
            print(stem, *rect)
        detections.images[stem] = GroundTruthImage(
            width=image.shape[1],
            height=image.shape[0],
            rects=list(rects),
            transcriptions=[None] * len(rects),
        )
        if args.annotate_dir:
            out_dir = Path(args.annotate_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            write_ppm(out_dir / f"{stem}_localized.ppm", draw_rectangles(image, rects))
    if args.out:
        save_ground_truth(detections, args.out)
    return 0


def cmd_read(args) -> int:
    cfg = _load_cfg(args)
    classifier = load_model(args.model)
    if not cfg.ocr_command:
        raise ConfigError("ocr.command must be configured for the read command")
    ocr = OcrAdapter(command=cfg.ocr_command, timeout_s=cfg.ocr_timeout_s)
    frames = load_frame_dir(args.frames_dir)
    result = run_pipeline(frames, cfg, classifier, ocr, script_path=args.out)
    print(f"roi: {' '.join(str(v) for v in result.roi.bbox)}"
          + (" (full-frame fallback)" if result.roi_fallback else ""))
    print(f"regions: {len(result.regions)}")
    for rid, text in result.script.entries:
        print(f"{rid}: {text}")
    print(f"script written to {args.out}")
    if args.speak:
        speak(TtsAdapter(command=cfg.tts_command or "null"), args.out)
    return 0


def cmd_train(args) -> int:
    cfg = _load_cfg(args)
    length = cfg.features.vector_length
    pos, _ = read_fvec(args.pos, length)
    neg, _ = read_fvec(args.neg, length)
    log.info("training on %d positives / %d negatives", len(pos), len(neg))
    classifier = train_cascade(pos, neg, cfg.train)
    save_model(classifier, args.out)
    learners = sum(len(s.learners) for s in classifier.stages)
    print(f"trained cascade: {len(classifier.stages)} stages, {learners} stumps -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    truth = load_ground_truth(args.truth)
    detected = load_ground_truth(args.detections)
    detections = {name: img.rects for name, img in detected.images.items()}
    metrics = evaluate(detections, truth, overlap_threshold=args.overlap)
    print(format_metrics(metrics))
    if args.per_image:
        for name in sorted(metrics.per_image):
            c = metrics.per_image[name]
            print(f"{name} matched={c.matched} detected={c.detected} truth={c.truth}")
    return 0


def cmd_synth(args) -> int:
    cfg = _load_cfg(args)
    params = SynthParams()
    if args.train_images is not None:
        params.train_images = args.train_images
    if args.test_images is not None:
        params.test_images = args.test_images
    if args.frames is not None:
        params.frames_per_sequence = args.frames
    summary = generate_corpus(args.out, args.seed, params, cfg)
    for key, value in summary.items():
        print(f"{key} = {value}")
    return 0


def _read_region_file(path, stem: str):
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if lines and lines[0].startswith("image "):
        gts = load_ground_truth(path)
        if stem not in gts.images:
            raise GroundTruthError(f"{path}: no entry for image {stem!r}")
        return gts.images[stem].rects
    rects = []
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if len(parts) < 4:
            raise GroundTruthError(f"{path}:{lineno}: expected 'x y w h'")
        rects.append(tuple(int(v) for v in parts[:4]))
    return rects


def cmd_annotate(args) -> int:
    image = load_image(args.image)
    rects = _read_region_file(args.regions, Path(args.image).stem)
    annotated = draw_rectangles(image, rects)
    write_ppm(args.out, annotated)
    print(f"annotated {len(rects)} regions -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labelreader",
        description="Read text from a shaken hand-held object in a frame sequence.",
    )
    parser.add_argument("--version", action="version", version=f"labelreader {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="verbose logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roi", help="motion-based region of interest of a frame sequence")
    p.add_argument("frames_dir", help="directory of P6 .ppm frames")
    p.add_argument("--config", help="config file")
    p.add_argument("--debug", help="dump intermediate maps into this directory")
    p.set_defaults(func=cmd_roi)

    p = sub.add_parser("localize", help="localize text regions in still images")
    p.add_argument("images", nargs="+", help="input images (.ppm/.pgm/.png)")
    p.add_argument("--model", required=True, help="trained cascade model file")
    p.add_argument("--config", help="config file")
    p.add_argument("--out", help="write detections in the ground-truth text format")
    p.add_argument("--annotate-dir", help="write annotated copies into this directory")
    p.add_argument("--debug", help="dump color layers and candidate regions here")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("read", help="full pipeline: frames to speech script")
    p.add_argument("frames_dir", help="directory of P6 .ppm frames")
    p.add_argument("--model", required=True, help="trained cascade model file")
    p.add_argument("--config", help="config file")
    p.add_argument("--out", default="speech_script.txt", help="script output path")
    p.add_argument("--speak", action="store_true", help="run the TTS adapter on the script")
    p.set_defaults(func=cmd_read)

    p = sub.add_parser("train", help="train the cascade from labeled .fvec files")
    p.add_argument("--pos", required=True, help="positive feature records")
    p.add_argument("--neg", required=True, help="negative feature records")
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--config", help="config file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="precision/recall of detections against ground truth")
    p.add_argument("--detections", required=True, help="detections file")
    p.add_argument("--truth", required=True, help="ground-truth file")
    p.add_argument("--overlap", type=float, default=0.5, help="IoU match threshold")
    p.add_argument("--per-image", action="store_true", help="print a per-image table")
    p.add_argument("--config", help="config file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate the deterministic synthetic corpus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--train-images", type=int, default=None)
    p.add_argument("--test-images", type=int, default=None)
    p.add_argument("--frames", type=int, default=None, help="frames per sequence")
    p.add_argument("--config", help="config file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("annotate", help="draw detection rectangles onto an image")
    p.add_argument("image", help="input image")
    p.add_argument("--regions", required=True, help="'x y w h' lines or a detections file")
    p.add_argument("--out", required=True, help="annotated P6 output path")
    p.add_argument("--config", help="config file")
    p.set_defaults(func=cmd_annotate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except LabelReaderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
