import numpy as np
import pytest

from labelreader import (
    canny,
    connected_components,
    gaussian_smooth,
    sobel,
    to_grayscale,
)
from labelreader.errors import DimensionError, ParameterError


def frame_of(r, g, b, shape=(4, 4)):
    f = np.zeros(shape + (3,), dtype=np.uint8)
    f[..., 0], f[..., 1], f[..., 2] = r, g, b
    return f


class TestToGrayscale:
    def test_gray_input_is_fixed_point(self):
        assert to_grayscale(frame_of(100, 100, 100))[0, 0] == 100

    def test_black(self):
        assert to_grayscale(frame_of(0, 0, 0))[0, 0] == 0

    def test_pure_red(self):
        # round(0.299 * 255) = round(76.245) = 76, computed by hand
        assert to_grayscale(frame_of(255, 0, 0))[0, 0] == 76

    def test_idempotent_on_gray_frames(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            v = rng.integers(0, 256, (6, 7)).astype(np.uint8)
            f = np.repeat(v[:, :, None], 3, axis=2)
            assert np.array_equal(to_grayscale(f), v)

    def test_rejects_non_rgb(self):
        with pytest.raises(DimensionError):
            to_grayscale(np.zeros((4, 4), dtype=np.uint8))


class TestSobel:
    def test_constant_image_zero_gradient(self):
        g = sobel(np.full((8, 9), 31, dtype=np.uint8))
        assert not g.gx.any() and not g.gy.any() and not g.magnitude.any()

    def test_horizontal_ramp(self):
        # Correlating the x kernel with g(x, y) = x gives (x+1-(x-1)) * 4 = 8
        ramp = np.tile(np.arange(20, dtype=np.float64), (10, 1))
        g = sobel(ramp)
        assert np.all(g.gx[:, 1:-1] == 8.0)
        assert not g.gy.any()

    def test_transpose_swaps_gradients(self):
        rng = np.random.default_rng(5)
        img = rng.integers(0, 256, (9, 13)).astype(np.uint8)
        g = sobel(img)
        gt = sobel(img.T)
        assert np.array_equal(gt.gx, g.gy.T)
        assert np.array_equal(gt.gy, g.gx.T)

    def test_shift_invariance_exact(self):
        rng = np.random.default_rng(6)
        img = rng.integers(0, 200, (12, 15)).astype(np.float64)
        g = sobel(img)
        gs = sobel(img + 37.0)
        assert np.array_equal(g.gx, gs.gx)
        assert np.array_equal(g.gy, gs.gy)

    def test_magnitude_orientation_invariants(self):
        rng = np.random.default_rng(7)
        img = rng.integers(0, 256, (16, 16)).astype(np.uint8)
        g = sobel(img)
        lhs = g.magnitude**2
        rhs = g.gx**2 + g.gy**2
        scale = np.maximum(rhs, 1.0)
        assert np.all(np.abs(lhs - rhs) <= 1e-9 * scale)
        assert np.all((g.orientation >= 0) & (g.orientation < 2 * np.pi))
        nz = g.magnitude > 0
        expected = np.mod(np.arctan2(g.gy, g.gx), 2 * np.pi)
        assert np.array_equal(g.orientation[nz], expected[nz])

    def test_too_small_image(self):
        with pytest.raises(DimensionError):
            sobel(np.zeros((2, 5), dtype=np.uint8))


class TestCanny:
    def test_constant_image_empty(self):
        assert not canny(np.full((16, 16), 77, dtype=np.uint8), 10, 30).any()

    def test_vertical_step_single_pixel_line(self):
        img = np.zeros((20, 24), dtype=np.uint8)
        img[:, 12:] = 255
        mask = canny(img, 50, 150)
        # one pixel per row, all in the same column near the step
        assert np.all(mask.sum(axis=1) == 1)
        cols = np.nonzero(mask)[1]
        assert len(set(cols)) == 1
        assert 10 <= cols[0] <= 13

    def test_high_above_max_gradient_empty(self):
        img = np.zeros((16, 16), dtype=np.uint8)
        img[:, 8:] = 255
        assert not canny(img, 10, 1e9).any()

    def test_low_above_high_rejected(self):
        with pytest.raises(ParameterError):
            canny(np.zeros((8, 8), dtype=np.uint8), 30, 10)

    def test_output_subset_of_low_magnitude(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            img = rng.integers(0, 256, (24, 24)).astype(np.uint8)
            low, high = 30.0, 90.0
            mask = canny(img, low, high)
            mag = sobel(gaussian_smooth(img, 1.0)).magnitude
            assert np.all(mag[mask] >= low)


class TestConnectedComponents:
    def test_empty_mask(self):
        assert connected_components(np.zeros((5, 5), dtype=bool)) == []

    def test_two_disjoint_blocks(self):
        m = np.zeros((10, 10), dtype=bool)
        m[1:3, 1:3] = True
        m[6:8, 5:7] = True
        comps = connected_components(m)
        assert [c.pixel_count for c in comps] == [4, 4]
        assert comps[0].bbox == (1, 1, 2, 2)  # tie broken by bbox y
        assert comps[1].bbox == (5, 6, 2, 2)

    def test_diagonal_connectivity(self):
        m = np.zeros((4, 4), dtype=bool)
        m[1, 1] = m[2, 2] = True
        assert len(connected_components(m, connectivity=8)) == 1
        assert len(connected_components(m, connectivity=4)) == 2

    def test_pixel_counts_partition_foreground(self):
        rng = np.random.default_rng(9)
        for conn in (4, 8):
            for _ in range(10):
                m = rng.random((20, 20)) < 0.4
                comps = connected_components(m, conn)
                assert sum(c.pixel_count for c in comps) == int(m.sum())

    def test_pixels_inside_bbox(self):
        rng = np.random.default_rng(10)
        m = rng.random((15, 15)) < 0.3
        for c in connected_components(m):
            x, y, w, h = c.bbox
            assert c.pixel_count == len(c.pixels)
            assert np.all((c.pixels[:, 0] >= x) & (c.pixels[:, 0] < x + w))
            assert np.all((c.pixels[:, 1] >= y) & (c.pixels[:, 1] < y + h))

    def test_sorted_largest_first(self):
        rng = np.random.default_rng(12)
        m = rng.random((30, 30)) < 0.35
        comps = connected_components(m)
        counts = [c.pixel_count for c in comps]
        assert counts == sorted(counts, reverse=True)

    def test_bad_connectivity(self):
        with pytest.raises(ParameterError):
            connected_components(np.zeros((3, 3), dtype=bool), connectivity=6)
