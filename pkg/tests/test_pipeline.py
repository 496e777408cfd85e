import numpy as np
import pytest

from labelreader import (
    OcrAdapter,
    PipelineConfig,
    compute_roi,
    find_text_regions,
    run_pipeline,
)
from labelreader.cascade import CascadeClassifier
from labelreader.errors import ConfigError, ParameterError
from labelreader.pipeline import draw_rectangles
from labelreader.pnm import load_frame_dir


def accept_all(feature_length=171):
    return CascadeClassifier(stages=[], feature_length=feature_length)


class TestRoiStage:
    def test_blank_static_sequence_falls_back(self):
        frames = [np.full((40, 60, 3), 128, dtype=np.uint8)] * 8
        roi, fallback, object_map = compute_roi(frames)
        assert fallback
        assert roi.bbox == (0, 0, 60, 40)
        assert not object_map.any()

    def test_single_frame_falls_back(self):
        frames = [np.full((30, 30, 3), 10, dtype=np.uint8)]
        _, fallback, _ = compute_roi(frames)
        assert fallback

    def test_empty_sequence_rejected(self):
        with pytest.raises(ParameterError):
            compute_roi([])


class TestRunPipeline:
    def test_blank_sequence_header_only_script(self, tmp_path):
        frames = [np.full((48, 64, 3), 100, dtype=np.uint8)] * 5
        path = tmp_path / "script.txt"
        result = run_pipeline(frames, PipelineConfig(), accept_all(), ocr=None, script_path=path)
        assert result.roi_fallback
        assert result.regions == []
        assert result.script.entries == []
        assert path.read_text() == "#rate 0\n#volume 80\n#tone 0\n"
        assert set(result.timings_ms) == {"motion_roi", "localize", "binarize", "ocr", "script"}

    def test_regions_without_ocr_is_config_error(self, corpus):
        root = corpus.root
        frames = load_frame_dir(root / "frames" / "seq_000")
        with pytest.raises(ConfigError):
            run_pipeline(frames, corpus.cfg, corpus.classifier, ocr=None)

    def test_feature_length_mismatch_rejected(self):
        frames = [np.full((40, 40, 3), 100, dtype=np.uint8)] * 3
        cfg = PipelineConfig()
        with pytest.raises(ParameterError):
            find_text_regions(frames[0], accept_all(feature_length=99), cfg)

    def test_regions_inside_roi_and_frame(self, corpus, stub_ocr_command):
        frames = load_frame_dir(corpus.root / "frames" / "seq_000")
        result = run_pipeline(
            frames,
            corpus.cfg,
            corpus.classifier,
            OcrAdapter(stub_ocr_command),
        )
        rx, ry, rw, rh = result.roi.bbox
        height, width = frames[-1].shape[:2]
        for region in result.regions:
            x, y, w, h = region.bbox
            assert rx <= x and ry <= y
            assert x + w <= rx + rw and y + h <= ry + rh
            px, py, pw, ph = region.padded_bbox
            assert px <= x and py <= y and px + pw >= x + w and py + ph >= y + h
            assert 0 <= px and 0 <= py and px + pw <= width and py + ph <= height
            assert region.binarized.shape == (ph, pw)


class TestCoordinateRoundTrip:
    def test_roi_to_frame_and_back(self):
        offsets = [(0, 0), (13, 7), (100, 50)]
        rng = np.random.default_rng(0)
        for ox, oy in offsets:
            for _ in range(20):
                x, y = int(rng.integers(0, 50)), int(rng.integers(0, 50))
                w, h = int(rng.integers(1, 30)), int(rng.integers(1, 30))
                fx, fy = x + ox, y + oy
                assert (fx - ox, fy - oy, w, h) == (x, y, w, h)


class TestDrawRectangles:
    def test_blue_border_two_pixels(self):
        img = np.zeros((30, 30, 3), dtype=np.uint8)
        out = draw_rectangles(img, [(5, 5, 12, 10)])
        assert tuple(out[5, 5]) == (0, 0, 255)
        assert tuple(out[6, 10]) == (0, 0, 255)
        assert tuple(out[7, 10]) == (0, 0, 0)  # interior untouched
        assert tuple(out[14, 10]) == (0, 0, 255)
        assert tuple(out[5 + 4, 5]) == (0, 0, 255)  # left band
        assert not img.any()  # input not mutated

    def test_rect_clamped(self):
        img = np.zeros((10, 10, 3), dtype=np.uint8)
        out = draw_rectangles(img, [(-5, -5, 30, 30)])
        assert tuple(out[0, 0]) == (0, 0, 255)


class TestLocalizeDeterminism:
    def test_repeat_runs_identical(self, corpus):
        from labelreader.pnm import read_pnm

        img = read_pnm(corpus.root / "images" / "test_000.ppm")
        first = find_text_regions(img, corpus.classifier, corpus.cfg)
        second = find_text_regions(img, corpus.classifier, corpus.cfg)
        assert first == second
