"""Gaussian smoothing, Sobel gradients, NMS, hysteresis and profiles."""
import numpy as np
import pytest

from oracles import (convolve2d_replicate, entropy_reference,
                     gaussian_kernel_reference, hysteresis_reference,
                     nms_reference)
from slicescout import (BoundingBox, CannyParams, Slice2D, canny_edges,
                        canny_stages, edge_sum_profile, entropy_profile,
                        gaussian_kernel, gaussian_smooth, make_phantom,
                        PhantomSpec, read_profile_csv, slice_entropy,
                        sobel_gradients, write_profile_csv)
from slicescout.edges import SOBEL_X, SOBEL_Y, SliceProfile, _direction_sectors


def full_roi(pixels):
    return BoundingBox(0, 0, pixels.shape[1] - 1, pixels.shape[0] - 1)


def random_slice(seed, shape=(14, 11)):
    return np.random.default_rng(seed).normal(size=shape)


def half_step(height=12, width=17, mid=8):
    """0 on the left, 1 on the right, 0.5 in between: a unique gradient peak."""
    pixels = np.zeros((height, width))
    pixels[:, mid] = 0.5
    pixels[:, mid + 1:] = 1.0
    return pixels


def test_gaussian_kernel_matches_reference():
    kernel = gaussian_kernel(1.4, 2)
    assert kernel.shape == (5, 5)
    assert kernel.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(kernel, gaussian_kernel_reference(1.4, 2), atol=1e-15)


def test_gaussian_smooth_equals_full_2d_correlation():
    for seed in range(5):
        pixels = random_slice(seed)
        smoothed = gaussian_smooth(Slice2D(pixels=pixels, index=0)).pixels
        expected = convolve2d_replicate(pixels, gaussian_kernel_reference(1.4, 2))
        assert np.allclose(smoothed, expected, atol=1e-12)


def test_sobel_vertical_step_gradient_is_plus_four():
    pixels = np.zeros((6, 8))
    pixels[:, 4:] = 1.0
    field = sobel_gradients(Slice2D(pixels=pixels, index=0))
    assert np.all(field.gx[:, 3:5] == 4.0)
    assert np.all(field.gx[:, :3] == 0.0)
    assert np.all(field.gx[:, 5:] == 0.0)
    assert np.all(field.gy == 0.0)
    assert np.all(field.magnitude[:, 3:5] == 4.0)


def test_sobel_horizontal_step_gradient_is_plus_four():
    pixels = np.zeros((8, 6))
    pixels[4:, :] = 1.0
    field = sobel_gradients(Slice2D(pixels=pixels, index=0))
    assert np.all(field.gy[3:5, :] == 4.0)
    assert np.all(field.gx == 0.0)


def test_sobel_matches_direct_correlation():
    for seed in range(5):
        pixels = random_slice(seed, shape=(9, 10))
        field = sobel_gradients(Slice2D(pixels=pixels, index=0))
        assert np.allclose(field.gx, convolve2d_replicate(pixels, SOBEL_X),
                           atol=1e-12)
        assert np.allclose(field.gy, convolve2d_replicate(pixels, SOBEL_Y),
                           atol=1e-12)


def test_sobel_rejects_tiny_slices():
    with pytest.raises(ValueError):
        sobel_gradients(Slice2D(pixels=np.zeros((2, 5)), index=0))


@pytest.mark.parametrize("angle, sector", [
    (0.0, 0), (22.4, 0), (22.5, 1), (45.0, 1), (67.4, 1), (67.5, 2),
    (90.0, 2), (112.4, 2), (112.5, 3), (135.0, 3), (157.4, 3), (157.5, 0),
    (179.9, 0), (-10.0, 0), (-45.0, 3), (200.0, 0), (225.0, 1),
])
def test_direction_sector_boundaries(angle, sector):
    radians = np.array([[np.deg2rad(angle)]])
    assert _direction_sectors(radians)[0, 0] == sector


def test_nms_matches_reference_on_random_fields():
    for seed in range(10):
        pixels = random_slice(seed, shape=(16, 13))
        stages = canny_stages(Slice2D(pixels=pixels, index=0), full_roi(pixels))
        grad = stages.gradient
        expected = nms_reference(grad.magnitude, np.degrees(grad.direction))
        assert np.array_equal(stages.nms, expected)


def test_nms_keeps_single_column_on_half_step():
    pixels = half_step()
    stages = canny_stages(Slice2D(pixels=pixels, index=0), full_roi(pixels))
    rows, cols = np.nonzero(stages.mask)
    assert set(cols.tolist()) == {8}
    assert set(rows.tolist()) == set(range(1, 11))


def test_edges_never_touch_the_roi_border():
    for seed in range(5):
        pixels = random_slice(seed, shape=(12, 12))
        stages = canny_stages(Slice2D(pixels=pixels, index=0), full_roi(pixels))
        assert not stages.mask[0].any() and not stages.mask[-1].any()
        assert not stages.mask[:, 0].any() and not stages.mask[:, -1].any()


def test_hysteresis_matches_bfs_reference():
    rng = np.random.default_rng(11)
    for _ in range(20):
        weak = rng.random((10, 14)) < 0.35
        strong = weak & (rng.random((10, 14)) < 0.3)
        pixels = random_slice(1)
        from slicescout.edges import _hysteresis
        assert np.array_equal(_hysteresis(weak, strong),
                              hysteresis_reference(weak, strong))


def test_canny_stage_containment():
    for seed in range(5):
        pixels = random_slice(seed, shape=(15, 15))
        stages = canny_stages(Slice2D(pixels=pixels, index=0), full_roi(pixels))
        assert np.all(stages.strong <= stages.weak)
        assert np.all(stages.weak <= stages.nms)
        assert np.all(stages.strong <= stages.mask)
        assert np.all(stages.mask <= stages.weak)
        assert stages.high == pytest.approx(2.0 * stages.low)


def test_canny_raising_high_frac_never_adds_edges():
    for seed in range(5):
        pixels = random_slice(seed, shape=(18, 14))
        slc = Slice2D(pixels=pixels, index=0)
        roi = full_roi(pixels)
        base_mask = canny_stages(slc, roi, CannyParams()).mask
        tight_mask = canny_stages(slc, roi, CannyParams(high_frac=0.30)).mask
        assert np.all(tight_mask <= base_mask)


def test_canny_constant_slice_has_no_edges():
    pixels = np.full((10, 10), 42.0)
    stages = canny_stages(Slice2D(pixels=pixels, index=0), full_roi(pixels))
    assert not stages.mask.any()
    assert stages.low == 0.0 and stages.high == 0.0


def test_canny_intensity_threshold_base():
    pixels = half_step() * 10.0
    slc = Slice2D(pixels=pixels, index=0)
    roi = full_roi(pixels)
    grad = canny_stages(slc, roi, CannyParams())
    inten = canny_stages(slc, roi, CannyParams(threshold_base="intensity"))
    assert grad.high == pytest.approx(
        0.2 * grad.gradient.magnitude[1:-1, 1:-1].max())
    assert inten.high == pytest.approx(0.2 * pixels.max())


def test_canny_scale_invariance_power_of_two():
    pixels = random_slice(21, shape=(20, 16))
    slc = Slice2D(pixels=pixels, index=0)
    scaled = Slice2D(pixels=pixels * 4.0, index=0)
    roi = full_roi(pixels)
    assert np.array_equal(canny_edges(slc, roi), canny_edges(scaled, roi))


def test_canny_edges_zero_outside_roi():
    pixels = random_slice(3, shape=(20, 20))
    roi = BoundingBox(4, 5, 15, 14)
    mask = canny_edges(Slice2D(pixels=pixels, index=0), roi)
    assert mask.shape == pixels.shape
    outside = mask.copy()
    outside[roi.min_y:roi.max_y + 1, roi.min_x:roi.max_x + 1] = False
    assert not outside.any()


def test_canny_rejects_out_of_bounds_roi():
    pixels = np.zeros((8, 8))
    with pytest.raises(ValueError):
        canny_stages(Slice2D(pixels=pixels, index=0), BoundingBox(0, 0, 8, 7))


def test_canny_rejects_tiny_roi():
    pixels = np.zeros((8, 8))
    with pytest.raises(ValueError):
        canny_stages(Slice2D(pixels=pixels, index=0), BoundingBox(0, 0, 1, 7))


def test_canny_params_validation():
    with pytest.raises(ValueError):
        CannyParams(low_frac=0.3, high_frac=0.2)
    with pytest.raises(ValueError):
        CannyParams(sigma=0.0)
    with pytest.raises(ValueError):
        CannyParams(radius=0)
    with pytest.raises(ValueError):
        CannyParams(threshold_base="peak")


def test_edge_sum_profile_counts_per_slice(small_phantom):
    roi = BoundingBox(6, 8, 25, 39)
    profile = edge_sum_profile(small_phantom, roi)
    assert profile.kind == "edge_sum"
    assert len(profile) == small_phantom.n_slices
    assert profile.scores.dtype == np.int64
    for k in (0, 5, 12, 23):
        plane = small_phantom.data[k]
        stages = canny_stages(Slice2D(pixels=plane, index=k), roi)
        assert profile.scores[k] == stages.mask.sum()


def test_slice_entropy_matches_reference():
    for seed in range(5):
        pixels = random_slice(seed, shape=(12, 12))
        value = slice_entropy(Slice2D(pixels=pixels, index=0))
        assert value == pytest.approx(entropy_reference(pixels), rel=1e-12)


def test_slice_entropy_constant_is_zero():
    assert slice_entropy(Slice2D(pixels=np.full((6, 6), 2.5), index=0)) == 0.0


def test_entropy_profile_shape(small_phantom):
    profile = entropy_profile(small_phantom)
    assert profile.kind == "entropy"
    assert len(profile) == small_phantom.n_slices
    assert profile.scores.min() >= 0.0


def test_profile_csv_roundtrip(tmp_path):
    profile = SliceProfile(subject_id="p1",
                           scores=np.array([3, 0, 7, 2], dtype=np.int64),
                           kind="edge_sum")
    path = tmp_path / "prof.csv"
    write_profile_csv(profile, path)
    back = read_profile_csv(path)
    assert back.subject_id == "p1"
    assert back.kind == "edge_sum"
    assert back.scores.dtype == np.int64
    assert np.array_equal(back.scores, profile.scores)
    text = path.read_text()
    assert text.startswith("subject_id,slice_index,score,kind\n")
    assert text.endswith("\n")


def test_profile_csv_rejects_gaps(tmp_path):
    path = tmp_path / "gap.csv"
    path.write_text("subject_id,slice_index,score,kind\n"
                    "p1,0,3,edge_sum\n"
                    "p1,2,5,edge_sum\n")
    with pytest.raises(ValueError):
        read_profile_csv(path)


def test_profile_csv_rejects_mixed_subjects(tmp_path):
    path = tmp_path / "mixed.csv"
    path.write_text("subject_id,slice_index,score,kind\n"
                    "p1,0,3,edge_sum\n"
                    "p2,1,5,edge_sum\n")
    with pytest.raises(ValueError):
        read_profile_csv(path)


def test_profile_validation():
    with pytest.raises(ValueError):
        SliceProfile(subject_id="x", scores=np.array([-1.0]), kind="entropy")
    with pytest.raises(ValueError):
        SliceProfile(subject_id="x", scores=np.zeros((2, 2)), kind="entropy")
    with pytest.raises(ValueError):
        SliceProfile(subject_id="x", scores=np.zeros(3), kind="novel")
