"""Contiguous-window selection over per-slice score profiles.

``select_slices`` is the end-to-end pipeline step: segment every slice, reduce
the per-slice boxes to the patient ROI, score each slice (edge-pixel counts in
the ROI, or histogram entropy), and keep the contiguous run of slices whose
scores sum highest.  The result is a pure function of the volume bytes and the
parameters, so repeated runs are byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .edges import CannyParams, SliceProfile, edge_sum_profile, entropy_profile
from .roi import BoundingBox, patient_roi, segment_slice, slice_bounding_box
from .volume import Slice2D, Volume3D, slice_plane

DEFAULT_WINDOW = 140
DEFAULT_TARGET_MM = 175.0
METHODS = ("edge_sum", "entropy")


@dataclass(frozen=True)
class WindowSelection:
    """A contiguous slice range [start, start+length) and its total score."""

    start: int
    length: int
    total_score: Union[int, float]
    method: str

    @property
    def stop(self) -> int:
        return self.start + self.length


def best_window(profile: SliceProfile, length: int) -> WindowSelection:
    """Start of the length-``length`` window with the maximal score sum.

    Window sums come from one sliding pass; integer scores accumulate exactly
    in int64.  Ties resolve to the smallest start index.
    """
    n = len(profile)
    if length < 1:
        raise ValueError(f"window length must be >= 1, got {length}")
    if length > n:
        raise ValueError(f"window length {length} exceeds the {n}-slice profile")
    scores = profile.scores
    integral = np.issubdtype(scores.dtype, np.integer)
    acc = np.cumsum(scores, dtype=np.int64 if integral else np.float64)
    sums = acc[length - 1:].copy()
    sums[1:] -= acc[:n - length]
    start = int(np.argmax(sums))
    total = scores[start:start + length].sum()
    return WindowSelection(start=start, length=length,
                           total_score=int(total) if integral else float(total),
                           method=profile.kind)


def top_k_indices(profile: SliceProfile, count: int) -> list[int]:
    """Indices of the ``count`` highest-scoring slices, sorted ascending.

    Score ties prefer the lower slice index.  This drops the contiguity
    constraint and exists for ablation experiments only.
    """
    n = len(profile)
    if not 1 <= count <= n:
        raise ValueError(f"count {count} out of range 1..{n}")
    order = np.argsort(-profile.scores, kind="stable")
    return sorted(int(i) for i in order[:count])


def window_from_spacing(slice_spacing_mm: float,
                        target_mm: float = DEFAULT_TARGET_MM) -> int:
    """Window length covering ``target_mm`` of anatomy at the given spacing."""
    if slice_spacing_mm <= 0:
        raise ValueError(f"slice spacing must be positive, got {slice_spacing_mm}")
    if target_mm <= 0:
        raise ValueError(f"target extent must be positive, got {target_mm}")
    return max(1, round(target_mm / slice_spacing_mm))


def compute_patient_roi(vol: Volume3D, mode: str = "largest") -> BoundingBox:
    """Otsu-segment every slice, box the foreground, reduce to the patient ROI."""
    boxes = []
    for k in range(vol.n_slices):
        mask = segment_slice(Slice2D(pixels=slice_plane(vol, k), index=k))
        boxes.append(slice_bounding_box(mask))
    return patient_roi(boxes, mode=mode)


def _profile_for(vol: Volume3D, method: str, roi: BoundingBox,
                 params: CannyParams) -> SliceProfile:
    if method == "edge_sum":
        return edge_sum_profile(vol, roi, params)
    if method == "entropy":
        return entropy_profile(vol)
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


@dataclass(frozen=True, eq=False)
class SelectedStack:
    """The slices chosen for one subject, with the window and ROI that chose them."""

    subject_id: str
    window: WindowSelection
    slices: tuple[Slice2D, ...]
    roi: BoundingBox

    def __post_init__(self):
        slices = tuple(self.slices)
        if len(slices) != self.window.length:
            raise ValueError(
                f"{len(slices)} slices do not match window length {self.window.length}")
        object.__setattr__(self, "slices", slices)


def select_slices(vol: Volume3D, length: int = DEFAULT_WINDOW,
                  method: str = "edge_sum", params: CannyParams = CannyParams(),
                  roi_mode: str = "largest") -> SelectedStack:
    """End-to-end selection: ROI, score profile, best window, slice stack."""
    if length > vol.n_slices:
        raise ValueError(
            f"window length {length} exceeds the {vol.n_slices}-slice volume")
    roi = compute_patient_roi(vol, mode=roi_mode)
    profile = _profile_for(vol, method, roi, params)
    window = best_window(profile, length)
    slices = tuple(Slice2D(pixels=np.array(slice_plane(vol, k)), index=k)
                   for k in range(window.start, window.stop))
    return SelectedStack(subject_id=vol.subject_id, window=window,
                         slices=slices, roi=roi)


def select_top_k(vol: Volume3D, count: int = DEFAULT_WINDOW,
                 method: str = "edge_sum", params: CannyParams = CannyParams(),
                 roi_mode: str = "largest") -> tuple[list[int], BoundingBox, SliceProfile]:
    """Ablation-mode variant of ``select_slices`` without the contiguity rule.

    Returns the chosen slice indices (ascending), the ROI, and the profile.
    """
    if count > vol.n_slices:
        raise ValueError(f"count {count} exceeds the {vol.n_slices}-slice volume")
    roi = compute_patient_roi(vol, mode=roi_mode)
    profile = _profile_for(vol, method, roi, params)
    return top_k_indices(profile, count), roi, profile


def window_overlap(a: WindowSelection, b: WindowSelection) -> tuple[int, float]:
    """Overlapping slice count and Jaccard index of two windows."""
    lo = max(a.start, b.start)
    hi = min(a.stop, b.stop)
    overlap = max(0, hi - lo)
    union = a.length + b.length - overlap
    return overlap, (overlap / union if union else 0.0)


@dataclass(frozen=True)
class ComparisonReport:
    """Edge-density vs entropy window selection for one subject."""

    subject_id: str
    edge_window: WindowSelection
    entropy_window: WindowSelection
    overlap_count: int
    jaccard: float


def compare_methods(vol: Volume3D, length: int = DEFAULT_WINDOW,
                    params: CannyParams = CannyParams(),
                    roi_mode: str = "largest") -> ComparisonReport:
    """Run both scoring methods on one volume and report window agreement."""
    roi = compute_patient_roi(vol, mode=roi_mode)
    edge_window = best_window(edge_sum_profile(vol, roi, params), length)
    entropy_window = best_window(entropy_profile(vol), length)
    overlap, jaccard = window_overlap(edge_window, entropy_window)
    return ComparisonReport(subject_id=vol.subject_id, edge_window=edge_window,
                            entropy_window=entropy_window, overlap_count=overlap,
                            jaccard=jaccard)


def window_sensitivity(vol: Volume3D, lengths: Sequence[int],
                       method: str = "edge_sum", params: CannyParams = CannyParams(),
                       roi_mode: str = "largest") -> list[WindowSelection]:
    """Best window per requested length; the profile is computed once."""
    if not lengths:
        raise ValueError("no window lengths given")
    if max(lengths) > vol.n_slices:
        raise ValueError(
            f"window length {max(lengths)} exceeds the {vol.n_slices}-slice volume")
    roi = compute_patient_roi(vol, mode=roi_mode)
    profile = _profile_for(vol, method, roi, params)
    return [best_window(profile, length) for length in lengths]
