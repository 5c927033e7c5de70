"""Otsu segmentation and patient-level region-of-interest extraction.

Per-slice chain: min-max scale the intensities onto 256 histogram bins, find
the threshold bin maximizing between-class variance, mark pixels above it as
foreground, and box the foreground.  ``patient_roi`` then reduces the per-slice
boxes to a single region for the whole volume.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NoForegroundError
from .volume import Slice2D

N_BINS = 256


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned rectangle in slice pixel coordinates, inclusive on all edges.

    x is the pixel column, y the pixel row.
    """

    min_x: int
    min_y: int
    max_x: int
    max_y: int

    def __post_init__(self):
        if min(self.min_x, self.min_y) < 0:
            raise ValueError(f"negative coordinates in {self}")
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError(f"degenerate bounding box {self}")

    @property
    def width(self) -> int:
        return self.max_x - self.min_x + 1

    @property
    def height(self) -> int:
        return self.max_y - self.min_y + 1

    @property
    def area(self) -> int:
        return self.width * self.height

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(min(self.min_x, other.min_x), min(self.min_y, other.min_y),
                           max(self.max_x, other.max_x), max(self.max_y, other.max_y))


@dataclass(frozen=True, eq=False)
class Histogram256:
    """256-bin intensity histogram of one slice, with its scaling range."""

    counts: np.ndarray  # (256,), int64
    total: int
    min_val: float
    max_val: float


def bin_indices(pixels: np.ndarray, min_val: float, max_val: float) -> np.ndarray:
    """Map intensities onto bins 0..255 by min-max scaling.

    bin = floor((v - min) / (max - min) * 256), clipped to 255 so the maximum
    lands in the last bin.  A constant range maps everything to bin 0.
    """
    if max_val == min_val:
        return np.zeros(pixels.shape, dtype=np.int64)
    scale = N_BINS / (max_val - min_val)
    idx = np.floor((pixels - min_val) * scale).astype(np.int64)
    return np.clip(idx, 0, N_BINS - 1, out=idx)


def slice_histogram(slc: Slice2D) -> Histogram256:
    pixels = slc.pixels
    mn = float(pixels.min())
    mx = float(pixels.max())
    counts = np.bincount(bin_indices(pixels, mn, mx).ravel(), minlength=N_BINS)
    return Histogram256(counts=counts.astype(np.int64), total=int(pixels.size),
                        min_val=mn, max_val=mx)


@dataclass(frozen=True)
class OtsuResult:
    """Threshold bin maximizing between-class variance, or the no-split marker.

    ``threshold is None`` means only one bin is occupied so no foreground /
    background split exists; callers treat that as empty foreground.  ``score``
    is the between-class variance at the chosen threshold (0.0 for no-split).
    """

    threshold: Optional[int]
    score: float


def otsu_threshold(hist: Histogram256) -> OtsuResult:
    """Threshold with maximal between-class variance over bins 0..255.

    Bins <= t form the background class, bins > t the foreground.  Candidate
    variances are compared as exact rationals (integer cross-multiplication),
    so equal-variance ties deterministically resolve to the smallest t instead
    of depending on float rounding.
    """
    counts = hist.counts.tolist()
    total = int(hist.total)
    if total <= 0:
        raise ValueError("histogram is empty")
    weighted_total = sum(i * c for i, c in enumerate(counts))
    best_t = None
    best_num2 = best_den = 0
    c0 = s0 = 0
    for t in range(N_BINS):
        c0 += counts[t]
        s0 += t * counts[t]
        if c0 == 0:
            continue
        c1 = total - c0
        if c1 == 0:
            break
        # between-class variance is (s0*total - weighted_total*c0)^2 / (c0*c1*total^2);
        # total^2 is constant, so compare num^2/den across thresholds exactly
        num = s0 * total - weighted_total * c0
        num2 = num * num
        den = c0 * c1
        if best_t is None or num2 * best_den > best_num2 * den:
            best_num2, best_den, best_t = num2, den, t
    if best_t is None:
        return OtsuResult(threshold=None, score=0.0)
    return OtsuResult(threshold=best_t, score=best_num2 / (best_den * total * total))


def binarize(slc: Slice2D, threshold: Optional[int]) -> np.ndarray:
    """Boolean foreground mask: pixels whose bin index exceeds ``threshold``.

    Uses the same min-max binning as ``slice_histogram``, so pass the threshold
    obtained from this slice's own histogram.  ``None`` (the no-split marker)
    and constant slices yield an all-background mask.
    """
    pixels = slc.pixels
    if threshold is None:
        return np.zeros(pixels.shape, dtype=bool)
    mn = float(pixels.min())
    mx = float(pixels.max())
    if mx == mn:
        return np.zeros(pixels.shape, dtype=bool)
    return bin_indices(pixels, mn, mx) > int(threshold)


def segment_slice(slc: Slice2D) -> np.ndarray:
    """Histogram -> Otsu -> binarize, the per-slice segmentation chain."""
    return binarize(slc, otsu_threshold(slice_histogram(slc)).threshold)


def slice_bounding_box(mask: np.ndarray) -> Optional[BoundingBox]:
    """Minimal box containing every true pixel, or None for an empty mask."""
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return None
    return BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def patient_roi(boxes: Sequence[Optional[BoundingBox]], mode: str = "largest") -> BoundingBox:
    """Reduce per-slice boxes (in slice order, None entries skipped) to one ROI.

    mode="largest" keeps the maximum-area box; area ties prefer the smaller
    min_y, then the smaller min_x, then the earlier slice.  mode="union"
    returns the box covering every per-slice box.
    """
    present = [b for b in boxes if b is not None]
    if not present:
        raise NoForegroundError("no slice produced a foreground bounding box")
    if mode == "union":
        out = present[0]
        for box in present[1:]:
            out = out.union(box)
        return out
    if mode != "largest":
        raise ValueError(f"unknown ROI mode {mode!r}, expected 'largest' or 'union'")
    best = present[0]
    for box in present[1:]:
        if (box.area, -box.min_y, -box.min_x) > (best.area, -best.min_y, -best.min_x):
            best = box
    return best
