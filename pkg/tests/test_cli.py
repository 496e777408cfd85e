import numpy as np
import pytest

from labelreader.cascade import save_model
from labelreader.cli import main
from labelreader.evaluation import (
    GroundTruthImage,
    GroundTruthSet,
    save_ground_truth,
)
from labelreader.pnm import read_pnm, write_ppm
from labelreader.synth import SynthParams, generate_corpus


@pytest.fixture(scope="module")
def tiny_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_corpus")
    params = SynthParams(
        train_images=4,
        test_images=2,
        frames_per_sequence=8,
        negatives_per_image=2,
        mined_negatives_per_image=3,
    )
    generate_corpus(root, 11, params)
    return root


@pytest.fixture(scope="module")
def trained_model(tiny_corpus, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.txt"
    code = main(
        [
            "train",
            "--pos",
            str(tiny_corpus / "train_pos.fvec"),
            "--neg",
            str(tiny_corpus / "train_neg.fvec"),
            "--out",
            str(path),
        ]
    )
    assert code == 0
    return path


def truth_file(tmp_path, name="truth.txt"):
    gts = GroundTruthSet()
    gts.images["a"] = GroundTruthImage(
        width=100, height=100, rects=[(10, 10, 30, 20)], transcriptions=[None]
    )
    path = tmp_path / name
    save_ground_truth(gts, path)
    return path


def test_no_arguments_usage_error(capsys):
    assert main([]) == 2


def test_unknown_flag_usage_error(capsys):
    assert main(["eval", "--nope"]) == 2


def test_version(capsys):
    assert main(["--version"]) == 0


def test_eval_identity(tmp_path, capsys):
    truth = truth_file(tmp_path)
    detections = truth_file(tmp_path, "det.txt")
    code = main(["eval", "--detections", str(detections), "--truth", str(truth)])
    out = capsys.readouterr().out
    assert code == 0
    assert "P=1.000 R=1.000 F=1.000" in out


def test_eval_per_image_table(tmp_path, capsys):
    truth = truth_file(tmp_path)
    detections = truth_file(tmp_path, "det.txt")
    code = main(
        ["eval", "--detections", str(detections), "--truth", str(truth), "--per-image"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "a matched=1 detected=1 truth=1" in out


def test_missing_model_file_is_processing_error(tmp_path, capsys):
    img = tmp_path / "img.ppm"
    write_ppm(img, np.zeros((20, 20, 3), dtype=np.uint8))
    code = main(["localize", str(img), "--model", str(tmp_path / "missing.model")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_roi_without_motion_fails(tmp_path, capsys):
    frames = tmp_path / "frames"
    frames.mkdir()
    for i in range(4):
        write_ppm(frames / f"f_{i}.ppm", np.full((32, 32, 3), 50, dtype=np.uint8))
    code = main(["roi", str(frames)])
    assert code == 1
    assert "no object" in capsys.readouterr().err


def test_roi_of_synthetic_sequence(tiny_corpus, capsys):
    code = main(["roi", str(tiny_corpus / "frames" / "seq_000")])
    out = capsys.readouterr().out
    assert code == 0
    assert len(out.split()) == 4


def test_synth_command(tmp_path, capsys):
    out_dir = tmp_path / "corpus"
    code = main(
        [
            "synth",
            "--seed",
            "5",
            "--out",
            str(out_dir),
            "--train-images",
            "2",
            "--test-images",
            "1",
            "--frames",
            "4",
        ]
    )
    assert code == 0
    assert (out_dir / "train_pos.fvec").exists()
    assert "positives" in capsys.readouterr().out


def test_localize_writes_detections(tiny_corpus, trained_model, tmp_path, capsys):
    images = sorted((tiny_corpus / "images").glob("test_*.ppm"))
    det_path = tmp_path / "detections.txt"
    code = main(
        ["localize", *map(str, images), "--model", str(trained_model), "--out", str(det_path)]
    )
    assert code == 0
    assert det_path.exists()
    content = det_path.read_text()
    for img in images:
        assert f"image {img.stem}" in content


def test_localize_then_eval(tiny_corpus, trained_model, tmp_path, capsys):
    images = sorted((tiny_corpus / "images").glob("test_*.ppm"))
    det_path = tmp_path / "detections.txt"
    main(["localize", *map(str, images), "--model", str(trained_model), "--out", str(det_path)])
    capsys.readouterr()
    code = main(
        [
            "eval",
            "--detections",
            str(det_path),
            "--truth",
            str(tiny_corpus / "truth_test.txt"),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("P=")


def test_read_command(tiny_corpus, trained_model, tmp_path, capsys):
    import sys

    cfg = tmp_path / "cfg.txt"
    cfg.write_text(f"ocr.command = {sys.executable} -m labelreader.stub_ocr {{input}}\n")
    script = tmp_path / "script.txt"
    code = main(
        [
            "read",
            str(tiny_corpus / "frames" / "seq_000"),
            "--model",
            str(trained_model),
            "--config",
            str(cfg),
            "--out",
            str(script),
            "--speak",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert script.exists()
    assert script.read_text().startswith("#rate 0\n#volume 80\n#tone 0\n")
    assert "script written" in out


def test_read_requires_ocr_config(tiny_corpus, trained_model, tmp_path, capsys):
    code = main(
        [
            "read",
            str(tiny_corpus / "frames" / "seq_000"),
            "--model",
            str(trained_model),
            "--out",
            str(tmp_path / "s.txt"),
        ]
    )
    assert code == 1
    assert "ocr.command" in capsys.readouterr().err


def test_annotate_plain_rects(tmp_path, capsys):
    img_path = tmp_path / "img.ppm"
    write_ppm(img_path, np.zeros((40, 40, 3), dtype=np.uint8))
    rects = tmp_path / "rects.txt"
    rects.write_text("5 5 20 10\n")
    out_path = tmp_path / "annotated.ppm"
    code = main(["annotate", str(img_path), "--regions", str(rects), "--out", str(out_path)])
    assert code == 0
    annotated = read_pnm(out_path)
    assert tuple(annotated[5, 5]) == (0, 0, 255)


def test_annotate_detections_format(tmp_path, capsys):
    img_path = tmp_path / "pic.ppm"
    write_ppm(img_path, np.zeros((40, 40, 3), dtype=np.uint8))
    det = tmp_path / "det.txt"
    det.write_text("image pic 40 40\n3 3 10 8\n")
    out_path = tmp_path / "annotated.ppm"
    code = main(["annotate", str(img_path), "--regions", str(det), "--out", str(out_path)])
    assert code == 0
    assert tuple(read_pnm(out_path)[3, 3]) == (0, 0, 255)


def test_config_unknown_key_is_processing_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("bogus.key = 1\n")
    frames = tmp_path / "frames"
    frames.mkdir()
    write_ppm(frames / "f.ppm", np.zeros((16, 16, 3), dtype=np.uint8))
    code = main(["roi", str(frames), "--config", str(cfg)])
    assert code == 1
    assert "unknown key" in capsys.readouterr().err
