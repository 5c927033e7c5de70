"""Sliding-window selection, top-k mode, method comparison."""
import numpy as np
import pytest

from oracles import max_window_bruteforce
from slicescout import (BoundingBox, NoForegroundError, SelectedStack,
                        WindowSelection, best_window, compare_methods,
                        compute_patient_roi, make_phantom, PhantomSpec,
                        select_slices, select_top_k, slice_plane,
                        top_k_indices, window_from_spacing, window_overlap,
                        window_sensitivity)
from slicescout.edges import SliceProfile
from slicescout.volume import Slice2D


def profile_of(scores, kind="edge_sum", subject="t"):
    dtype = np.int64 if kind == "edge_sum" else np.float64
    return SliceProfile(subject_id=subject, scores=np.asarray(scores, dtype=dtype),
                        kind=kind)


def test_best_window_symmetric_tent_profile():
    scores = [1000 - abs(k - 128) for k in range(256)]
    window = best_window(profile_of(scores), 140)
    assert window.start == 58
    assert window.stop == 198
    start, total = max_window_bruteforce(np.asarray(scores, dtype=np.int64), 140)
    assert (window.start, window.total_score) == (start, int(total))


def test_best_window_constant_profile_prefers_first():
    window = best_window(profile_of([5] * 40), 7)
    assert window.start == 0
    assert window.total_score == 35


def test_best_window_matches_bruteforce_random_integers():
    rng = np.random.default_rng(17)
    for _ in range(200):
        n = int(rng.integers(10, 80))
        length = int(rng.integers(1, n + 1))
        scores = rng.integers(0, 1000, size=n)
        window = best_window(profile_of(scores), length)
        start, total = max_window_bruteforce(scores.astype(np.int64), length)
        assert window.start == start
        assert window.total_score == int(total)
        assert isinstance(window.total_score, int)


def test_best_window_float_scores():
    rng = np.random.default_rng(23)
    for _ in range(50):
        scores = rng.random(60) * 8.0
        window = best_window(profile_of(scores, kind="entropy"), 12)
        start, total = max_window_bruteforce(scores, 12)
        assert window.start == start
        assert window.total_score == pytest.approx(float(total), rel=1e-9)


def test_best_window_length_validation():
    with pytest.raises(ValueError):
        best_window(profile_of([1, 2, 3]), 0)
    with pytest.raises(ValueError):
        best_window(profile_of([1, 2, 3]), 4)


def test_top_k_prefers_lower_index_on_ties():
    assert top_k_indices(profile_of([4, 9, 4, 9, 1]), 3) == [0, 1, 3]


def test_top_k_returns_sorted_indices():
    rng = np.random.default_rng(5)
    scores = rng.integers(0, 100, size=30)
    picked = top_k_indices(profile_of(scores), 10)
    assert picked == sorted(picked)
    assert len(set(picked)) == 10
    floor = min(int(scores[i]) for i in picked)
    skipped = [int(s) for i, s in enumerate(scores) if i not in picked]
    assert all(s <= floor for s in skipped)


def test_top_k_count_validation():
    with pytest.raises(ValueError):
        top_k_indices(profile_of([1, 2]), 3)
    with pytest.raises(ValueError):
        top_k_indices(profile_of([1, 2]), 0)


def test_window_from_spacing_oasis_defaults():
    assert window_from_spacing(1.25, 175.0) == 140
    assert window_from_spacing(1.2, 175.0) == 146
    assert window_from_spacing(1000.0, 175.0) == 1
    with pytest.raises(ValueError):
        window_from_spacing(0.0, 175.0)


def test_compute_patient_roi_tracks_the_ellipse(small_phantom):
    assert compute_patient_roi(small_phantom) == BoundingBox(6, 8, 25, 39)


def test_compute_patient_roi_raises_on_blank_volume():
    blank = make_phantom(PhantomSpec(dims=(8, 8, 8), radii=(0.0, 0.0, 0.0)))
    with pytest.raises(NoForegroundError):
        compute_patient_roi(blank)


def test_select_slices_centers_on_the_equator(small_phantom):
    stack = select_slices(small_phantom, length=10)
    assert stack.window.start == 7
    assert stack.window.length == 10
    assert [s.index for s in stack.slices] == list(range(7, 17))
    for slc in stack.slices:
        assert np.array_equal(slc.pixels, slice_plane(small_phantom, slc.index))
    assert stack.subject_id == "phantom"


def test_select_slices_rejects_oversized_window(small_phantom):
    with pytest.raises(ValueError):
        select_slices(small_phantom, length=25)


def test_select_slices_entropy_method(small_phantom):
    stack = select_slices(small_phantom, length=8, method="entropy")
    assert stack.window.method == "entropy"
    assert isinstance(stack.window.total_score, float)


def test_selected_stack_validates_slice_count():
    window = WindowSelection(start=0, length=3, total_score=0, method="edge_sum")
    slices = (Slice2D(pixels=np.zeros((4, 4)), index=0),)
    with pytest.raises(ValueError):
        SelectedStack(subject_id="x", window=window, slices=slices,
                      roi=BoundingBox(0, 0, 3, 3))


def test_select_top_k_is_consistent_with_profile(small_phantom):
    indices, roi, profile = select_top_k(small_phantom, count=6)
    assert roi == compute_patient_roi(small_phantom)
    assert indices == top_k_indices(profile, 6)
    assert profile.kind == "edge_sum"


def test_window_overlap_cases():
    a = WindowSelection(start=0, length=10, total_score=0, method="edge_sum")
    b = WindowSelection(start=5, length=10, total_score=0, method="edge_sum")
    c = WindowSelection(start=20, length=5, total_score=0, method="edge_sum")
    assert window_overlap(a, a) == (10, 1.0)
    assert window_overlap(a, b) == (5, 5 / 15)
    assert window_overlap(a, c) == (0, 0.0)


def test_compare_methods_reports_both_windows(small_phantom):
    report = compare_methods(small_phantom, length=10)
    assert report.subject_id == "phantom"
    assert report.edge_window.method == "edge_sum"
    assert report.entropy_window.method == "entropy"
    overlap, jaccard = window_overlap(report.edge_window, report.entropy_window)
    assert (report.overlap_count, report.jaccard) == (overlap, jaccard)


def test_window_sensitivity_shares_one_profile(small_phantom):
    picks = window_sensitivity(small_phantom, [4, 8, 12])
    assert [w.length for w in picks] == [4, 8, 12]
    stack = select_slices(small_phantom, length=8)
    assert picks[1] == stack.window
    with pytest.raises(ValueError):
        window_sensitivity(small_phantom, [])
