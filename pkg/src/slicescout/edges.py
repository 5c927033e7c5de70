"""Canny edge detection confined to a region of interest, plus slice profiles.

The detector runs on the ROI crop of a slice: Gaussian smoothing with edge
replication, Sobel gradients, non-maximum suppression quantized to four
direction sectors, then double-threshold hysteresis with 8-connectivity.
Thresholds are fractions of the maximum gradient magnitude inside the ROI
(or of the maximum intensity, see ``CannyParams.threshold_base``).  Pixels on
the ROI border are never edges: replication makes their gradients unreliable.

``edge_sum_profile`` and ``entropy_profile`` turn a volume into one score per
slice; window selection consumes those profiles.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import SliceScoutError
from .roi import BoundingBox, slice_histogram
from .volume import Slice2D, Volume3D, slice_plane

SOBEL_X = np.array([[-1, 0, 1],
                    [-2, 0, 2],
                    [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = np.array([[-1, -2, -1],
                    [0, 0, 0],
                    [1, 2, 1]], dtype=np.float64)

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

PROFILE_KINDS = ("edge_sum", "entropy")
PROFILE_CSV_FIELDS = ("subject_id", "slice_index", "score", "kind")


@dataclass(frozen=True)
class CannyParams:
    """Tunables for the edge detector.

    ``threshold_base`` selects what the low/high fractions multiply:
    "gradient" (default) uses the maximum gradient magnitude inside the ROI,
    "intensity" uses the maximum image intensity inside the ROI.
    """

    sigma: float = 1.4
    radius: int = 2
    low_frac: float = 0.10
    high_frac: float = 0.20
    threshold_base: str = "gradient"

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}")
        if not 0.0 < self.low_frac < self.high_frac <= 1.0:
            raise ValueError(
                f"need 0 < low_frac < high_frac <= 1, got {self.low_frac}, {self.high_frac}")
        if self.threshold_base not in ("gradient", "intensity"):
            raise ValueError(f"unknown threshold_base {self.threshold_base!r}")


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    """2-D Gaussian sampled on [-radius, radius]^2 and renormalized to sum to 1."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    kernel = np.exp(-(xx ** 2 + yy ** 2) / (2.0 * sigma ** 2)) / (2.0 * math.pi * sigma ** 2)
    return kernel / kernel.sum()


def _smooth(pixels: np.ndarray, sigma: float, radius: int) -> np.ndarray:
    # Separable passes with replicated borders.  The sampled 2-D kernel factors
    # exactly into its 1-D marginals, so this equals the full 2-D correlation.
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    k1 = np.exp(-(ax ** 2) / (2.0 * sigma ** 2))
    k1 /= k1.sum()
    out = ndimage.correlate1d(pixels, k1, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k1, axis=1, mode="nearest")


def gaussian_smooth(slc: Slice2D, sigma: float = 1.4, radius: int = 2) -> Slice2D:
    """Smooth a slice with the renormalized Gaussian kernel; borders replicate."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    return Slice2D(pixels=_smooth(slc.pixels, sigma, radius), index=slc.index)


@dataclass(frozen=True, eq=False)
class GradientField:
    """Sobel responses for one slice: components, magnitude and direction."""

    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray  # hypot(gx, gy)
    direction: np.ndarray  # atan2(gy, gx), radians


def _sobel(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gx = ndimage.correlate(pixels, SOBEL_X, mode="nearest")
    gy = ndimage.correlate(pixels, SOBEL_Y, mode="nearest")
    return gx, gy


def sobel_gradients(slc: Slice2D) -> GradientField:
    """Gradient field from the 3x3 Sobel kernels, borders replicated."""
    if slc.height < 3 or slc.width < 3:
        raise ValueError(
            f"slice {slc.height}x{slc.width} is smaller than the 3x3 Sobel kernels")
    gx, gy = _sobel(slc.pixels)
    return GradientField(gx=gx, gy=gy, magnitude=np.hypot(gx, gy),
                         direction=np.arctan2(gy, gx))


# neighbor offset (drow, dcol) for each quantized direction sector
_SECTOR_OFFSETS = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}


def _direction_sectors(direction: np.ndarray) -> np.ndarray:
    """Quantize gradient direction to the 0/45/90/135 degree sectors."""
    deg = np.degrees(direction) % 180.0
    sector = np.zeros(direction.shape, dtype=np.int8)
    sector[(deg >= 22.5) & (deg < 67.5)] = 1
    sector[(deg >= 67.5) & (deg < 112.5)] = 2
    sector[(deg >= 112.5) & (deg < 157.5)] = 3
    return sector


def _nms(magnitude: np.ndarray, sector: np.ndarray) -> np.ndarray:
    """Strict directional local-maximum mask; borders and all ties suppressed."""
    h, w = magnitude.shape
    keep = np.zeros((h, w), dtype=bool)
    if h < 3 or w < 3:
        return keep
    center = magnitude[1:-1, 1:-1]
    sec = sector[1:-1, 1:-1]
    for code, (dr, dc) in _SECTOR_OFFSETS.items():
        fwd = magnitude[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc]
        bwd = magnitude[1 - dr:h - 1 - dr, 1 - dc:w - 1 - dc]
        keep[1:-1, 1:-1] |= (sec == code) & (center > fwd) & (center > bwd)
    return keep


def _hysteresis(weak: np.ndarray, strong: np.ndarray) -> np.ndarray:
    """Keep weak pixels 8-connected (transitively) to at least one strong pixel."""
    labels, count = ndimage.label(weak, structure=_EIGHT_CONNECTED)
    if count == 0:
        return np.zeros_like(weak)
    good = np.zeros(count + 1, dtype=bool)
    good[np.unique(labels[strong])] = True
    good[0] = False
    return good[labels]


@dataclass(frozen=True, eq=False)
class CannyStages:
    """Intermediates of one ROI-confined run, for verification and debugging.

    All arrays are crop-shaped (the ROI region of the slice).
    """

    roi: BoundingBox
    smoothed: np.ndarray
    gradient: GradientField
    nms: np.ndarray      # bool: strict directional local maxima
    low: float
    high: float
    weak: np.ndarray     # nms survivors with magnitude >= low
    strong: np.ndarray   # nms survivors with magnitude >= high
    mask: np.ndarray     # final edge mask after hysteresis


def _check_roi(roi: BoundingBox, height: int, width: int) -> None:
    if roi.max_x >= width or roi.max_y >= height:
        raise ValueError(f"ROI {roi} exceeds the {height}x{width} slice bounds")


def canny_stages(slc: Slice2D, roi: BoundingBox,
                 params: CannyParams = CannyParams()) -> CannyStages:
    _check_roi(roi, slc.height, slc.width)
    crop = slc.pixels[roi.min_y:roi.max_y + 1, roi.min_x:roi.max_x + 1]
    if crop.shape[0] < 3 or crop.shape[1] < 3:
        raise ValueError(
            f"ROI {roi.height}x{roi.width} is smaller than the 3x3 gradient kernels")
    smoothed = _smooth(crop, params.sigma, params.radius)
    gx, gy = _sobel(smoothed)
    magnitude = np.hypot(gx, gy)
    gradient = GradientField(gx=gx, gy=gy, magnitude=magnitude,
                             direction=np.arctan2(gy, gx))
    nms = _nms(magnitude, _direction_sectors(gradient.direction))
    if params.threshold_base == "gradient":
        # max over the pixels actually eligible for edges (ROI interior)
        base = float(magnitude[1:-1, 1:-1].max())
    else:
        base = float(crop.max())
    high = params.high_frac * base
    low = params.low_frac * base
    if base <= 0.0:
        empty = np.zeros_like(nms)
        return CannyStages(roi=roi, smoothed=smoothed, gradient=gradient, nms=nms,
                           low=low, high=high, weak=empty, strong=empty, mask=empty)
    weak = nms & (magnitude >= low)
    strong = nms & (magnitude >= high)
    return CannyStages(roi=roi, smoothed=smoothed, gradient=gradient, nms=nms,
                       low=low, high=high, weak=weak, strong=strong,
                       mask=_hysteresis(weak, strong))


def canny_edges(slc: Slice2D, roi: BoundingBox,
                params: CannyParams = CannyParams()) -> np.ndarray:
    """Full-slice boolean edge mask; always zero outside the ROI."""
    stages = canny_stages(slc, roi, params)
    full = np.zeros((slc.height, slc.width), dtype=bool)
    full[roi.min_y:roi.max_y + 1, roi.min_x:roi.max_x + 1] = stages.mask
    return full


@dataclass(frozen=True, eq=False)
class SliceProfile:
    """Per-slice scores for one volume.

    ``kind`` is "edge_sum" (integer edge-pixel counts) or "entropy" (histogram
    entropy in bits).  Scores are nonnegative by construction.
    """

    subject_id: str
    scores: np.ndarray
    kind: str

    def __post_init__(self):
        scores = np.asarray(self.scores)
        if scores.ndim != 1:
            raise ValueError(f"profile scores must be 1-D, got shape {scores.shape}")
        if scores.size and float(scores.min()) < 0:
            raise ValueError("profile scores must be nonnegative")
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return int(self.scores.size)


def edge_sum_profile(vol: Volume3D, roi: BoundingBox,
                     params: CannyParams = CannyParams()) -> SliceProfile:
    """Edge-pixel count inside the ROI for every slice of the volume."""
    scores = np.zeros(vol.n_slices, dtype=np.int64)
    for k in range(vol.n_slices):
        slc = Slice2D(pixels=slice_plane(vol, k), index=k)
        try:
            scores[k] = int(canny_stages(slc, roi, params).mask.sum())
        except (ValueError, SliceScoutError) as exc:
            raise type(exc)(f"slice {k}: {exc}") from exc
    return SliceProfile(subject_id=vol.subject_id, scores=scores, kind="edge_sum")


def slice_entropy(slc: Slice2D) -> float:
    """Shannon entropy in bits of the slice's 256-bin min-max histogram.

    Empty bins are skipped; a constant slice has entropy 0.
    """
    hist = slice_histogram(slc)
    p = hist.counts[hist.counts > 0] / hist.total
    return float(-(p * np.log2(p)).sum())


def entropy_profile(vol: Volume3D) -> SliceProfile:
    """Per-slice histogram entropy over the full slice (no ROI restriction)."""
    scores = np.array(
        [slice_entropy(Slice2D(pixels=slice_plane(vol, k), index=k))
         for k in range(vol.n_slices)], dtype=np.float64)
    return SliceProfile(subject_id=vol.subject_id, scores=scores, kind="entropy")


def write_profile_csv(profile: SliceProfile, path) -> None:
    """Write (subject_id, slice_index, score, kind) rows with a header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_CSV_FIELDS)
        for index, score in enumerate(profile.scores.tolist()):
            writer.writerow([profile.subject_id, index, score, profile.kind])


def read_profile_csv(path) -> SliceProfile:
    """Load a single-subject profile written by ``write_profile_csv``."""
    path = Path(path)
    subjects: set[str] = set()
    kinds: set[str] = set()
    rows: list[tuple[int, float]] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != PROFILE_CSV_FIELDS:
            raise ValueError(f"{path}: expected header {','.join(PROFILE_CSV_FIELDS)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append((int(row["slice_index"]), float(row["score"])))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad row: {exc}") from exc
            subjects.add(row["subject_id"])
            kinds.add(row["kind"])
    if not rows:
        raise ValueError(f"{path}: no profile rows")
    if len(subjects) != 1 or len(kinds) != 1:
        raise ValueError(f"{path}: profile must cover exactly one subject and kind")
    kind = kinds.pop()
    rows.sort()
    if [i for i, _ in rows] != list(range(len(rows))):
        raise ValueError(f"{path}: slice indices must be 0..n-1 without gaps")
    values = [s for _, s in rows]
    scores = np.array(values, dtype=np.int64 if kind == "edge_sum" else np.float64)
    return SliceProfile(subject_id=subjects.pop(), scores=scores, kind=kind)
