import math

import numpy as np
import pytest

from labelreader import (
    CandidateRegion,
    CharBox,
    LayoutParams,
    extract_char_candidates,
    find_candidate_regions,
    group_adjacent,
    layout_score,
    reduce_colors,
)
from labelreader.errors import ParameterError
from labelreader.layout import ColorLayer


def box(x, y, w, h, layer=0):
    return CharBox(bbox=(x, y, w, h), layer=layer, pixel_count=max(1, (w * h) // 2))


class TestReduceColors:
    def test_single_color_single_layer(self):
        crop = np.full((10, 10, 3), 200, dtype=np.uint8)
        layers = reduce_colors(crop)
        assert len(layers) == 1
        assert layers[0].mask.all()

    def test_two_colors_partition(self):
        crop = np.full((10, 10, 3), 250, dtype=np.uint8)
        crop[:, :5] = 10
        layers = reduce_colors(crop)
        assert len(layers) == 2
        union = np.zeros((10, 10), dtype=int)
        for layer in layers:
            union += layer.mask.astype(int)
        assert np.all(union == 1)

    def test_equidistant_pixel_goes_to_more_populous_seed(self):
        # seeds at bin centers 8 and 24; pixel 16 is equidistant from both
        crop = np.zeros((1, 16, 3), dtype=np.uint8)
        crop[0, :9] = 24  # 9 pixels: most populous bin
        crop[0, 9:15] = 8  # 6 pixels
        crop[0, 15] = 16  # equidistant tie
        layers = reduce_colors(crop)
        populous = next(l for l in layers if l.color == (24, 24, 24))
        assert populous.mask[0, 15]

    def test_layers_partition_random_crops(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            crop = rng.integers(0, 256, (12, 14, 3)).astype(np.uint8)
            layers = reduce_colors(crop, max_layers=5)
            union = np.zeros((12, 14), dtype=int)
            for layer in layers:
                union += layer.mask.astype(int)
            assert np.all(union == 1)

    def test_max_layers_validated(self):
        with pytest.raises(ParameterError):
            reduce_colors(np.zeros((4, 4, 3), dtype=np.uint8), max_layers=1)


class TestExtractCharCandidates:
    def test_empty_layer(self):
        layer = ColorLayer(color=(0, 0, 0), mask=np.zeros((30, 30), dtype=bool))
        assert extract_char_candidates([layer]) == []

    def test_speck_filtered(self):
        mask = np.zeros((40, 40), dtype=bool)
        mask[5, 5] = True
        assert extract_char_candidates([ColorLayer((0, 0, 0), mask)]) == []

    def test_solid_box_filtered_by_fill(self):
        mask = np.zeros((40, 40), dtype=bool)
        mask[5:20, 5:18] = True  # fill ratio 1.0
        assert extract_char_candidates([ColorLayer((0, 0, 0), mask)]) == []

    def test_letter_like_component_kept(self):
        mask = np.zeros((40, 40), dtype=bool)
        mask[5:20, 5:15] = True
        mask[7:18, 8:12] = False  # hollow: plausible glyph fill
        boxes = extract_char_candidates([ColorLayer((0, 0, 0), mask)])
        assert len(boxes) == 1
        assert boxes[0].bbox == (5, 5, 10, 15)


class TestGroupAdjacent:
    def test_three_in_a_row(self):
        chars = [box(0, 0, 10, 20), box(14, 0, 10, 20), box(28, 0, 10, 20)]
        regions = group_adjacent(chars)
        assert len(regions) == 1
        assert regions[0].bbox == (0, 0, 38, 20)
        assert len(regions[0].members) == 3

    def test_two_boxes_never_enough(self):
        regions = group_adjacent([box(0, 0, 10, 20), box(14, 0, 10, 20)])
        assert regions == []

    def test_vertical_offset_excluded(self):
        # third box offset by 0.6 h: overlap = (20 - 12) / 20 = 0.4 < 0.5
        chars = [box(0, 0, 10, 20), box(14, 0, 10, 20), box(28, 12, 10, 20)]
        assert group_adjacent(chars) == []
        # joined by a fourth aligned box the chain still only has 3 aligned
        chars.append(box(28, 0, 10, 20))
        regions = group_adjacent(chars)
        assert len(regions) == 1
        assert all(m.bbox[1] == 0 for m in regions[0].members)

    def test_large_gap_breaks_chain(self):
        chars = [box(0, 0, 10, 20), box(12, 0, 10, 20), box(60, 0, 10, 20)]
        assert group_adjacent(chars) == []

    def test_height_ratio_limit(self):
        chars = [box(0, 0, 10, 20), box(14, 0, 10, 20), box(28, 0, 10, 45)]
        assert group_adjacent(chars) == []

    def test_layers_never_mix(self):
        chars = [box(0, 0, 10, 20), box(14, 0, 10, 20), box(28, 0, 10, 20, layer=1)]
        assert group_adjacent(chars) == []

    def test_order_independent(self):
        rng = np.random.default_rng(2)
        chars = [box(16 * i, 0, 12, 22) for i in range(6)]
        chars += [box(16 * i, 60, 12, 22) for i in range(4)]
        baseline = group_adjacent(chars)
        for _ in range(25):
            shuffled = list(chars)
            rng.shuffle(shuffled)
            regions = group_adjacent(shuffled)
            assert [r.bbox for r in regions] == [r.bbox for r in baseline]
            assert [r.score for r in regions] == [r.score for r in baseline]

    def test_invariants_by_construction(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            chars = []
            for _ in range(int(rng.integers(0, 14))):
                chars.append(
                    box(
                        int(rng.integers(0, 120)),
                        int(rng.integers(0, 60)),
                        int(rng.integers(4, 18)),
                        int(rng.integers(8, 30)),
                        layer=int(rng.integers(0, 2)),
                    )
                )
            for region in group_adjacent(chars):
                assert len(region.members) >= 3
                assert len({m.layer for m in region.members}) == 1
                members = sorted(region.members, key=lambda c: c.bbox[0])
                for a, b in zip(members, members[1:]):
                    top = max(a.bbox[1], b.bbox[1])
                    bottom = min(a.bbox[1] + a.bbox[3], b.bbox[1] + b.bbox[3])
                    assert (bottom - top) / min(a.bbox[3], b.bbox[3]) >= 0.5
                    gap = b.bbox[0] - (a.bbox[0] + a.bbox[2])
                    assert gap <= 2.0 * max(a.bbox[2], b.bbox[2])


class TestLayoutScore:
    def test_identical_equally_spaced_is_one(self):
        chars = [box(15 * i, 4, 10, 20) for i in range(4)]
        region = group_adjacent(chars)[0]
        assert region.score == 1.0

    def test_size_uniformity_term_oracle(self):
        # heights {10, 10, 30}: mean 50/3, population std 20*sqrt(2)/3,
        # so the size term is 1 - 0.4*sqrt(2) = 0.43431457505...
        members = [box(0, 0, 10, 10), box(14, 0, 10, 10), box(28, 0, 10, 30)]
        heights = np.array([10.0, 10.0, 30.0])
        expected_size = 1.0 - heights.std() / heights.mean()
        assert expected_size == pytest.approx(1.0 - 0.4 * math.sqrt(2), abs=1e-12)
        region = CandidateRegion(bbox=(0, 0, 38, 30), members=members)
        score = layout_score(region)
        centers = np.array([5.0, 5.0, 15.0])
        expected_align = max(0.0, 1.0 - centers.std() / heights.mean())
        expected = 0.5 * expected_align + 0.3 * expected_size + 0.2 * 1.0
        assert score == pytest.approx(expected, abs=1e-12)

    def test_scale_invariance(self):
        members = [box(0, 3, 9, 17), box(14, 2, 11, 19), box(30, 3, 10, 18)]
        region = CandidateRegion(bbox=(0, 2, 40, 20), members=members)
        doubled = CandidateRegion(
            bbox=(0, 4, 80, 40),
            members=[
                CharBox(tuple(2 * v for v in m.bbox), m.layer, m.pixel_count)
                for m in members
            ],
        )
        assert layout_score(region) == layout_score(doubled)

    def test_score_in_unit_interval(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(3, 8))
            members = []
            x = 0
            for _ in range(n):
                w = int(rng.integers(4, 20))
                members.append(
                    box(x, int(rng.integers(0, 30)), w, int(rng.integers(8, 40)))
                )
                x += w + int(rng.integers(0, 25))
            score = layout_score(CandidateRegion(bbox=(0, 0, x, 40), members=members))
            assert 0.0 <= score <= 1.0


class TestFindCandidateRegions:
    def test_word_card(self):
        from labelreader.font import render_text_mask

        img = np.full((80, 200, 3), 210, dtype=np.uint8)
        ink = render_text_mask("MILK", 3)
        th, tw = ink.shape
        img[20 : 20 + th, 30 : 30 + tw][ink] = (15, 15, 15)
        regions = find_candidate_regions(img)
        assert regions
        assert regions[0].bbox == (30, 20, tw, th)
        assert regions[0].score == 1.0
