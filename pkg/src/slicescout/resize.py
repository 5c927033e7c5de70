"""Integer-factor downsampling of selected slices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .volume import Slice2D
from .window import SelectedStack

RESIZE_MODES = ("area_average", "nearest")


@dataclass(frozen=True)
class ResizeSpec:
    factor: int = 2
    mode: str = "area_average"

    def __post_init__(self):
        if int(self.factor) != self.factor or self.factor < 1:
            raise ValueError(f"resize factor must be a positive integer, got {self.factor}")
        if self.mode not in RESIZE_MODES:
            raise ValueError(f"unknown resize mode {self.mode!r}")


def downsample_plane(pixels: np.ndarray, factor: int,
                     mode: str = "area_average") -> np.ndarray:
    """Shrink both dimensions by ``factor``; output dims are ceil(dim / factor).

    "area_average" fills each output pixel with the mean of its factor-by-factor
    source block; trailing partial blocks average over the pixels present, so no
    padding value is invented.  "nearest" keeps the top-left pixel of each block.
    """
    if int(factor) != factor or factor < 1:
        raise ValueError(f"resize factor must be a positive integer, got {factor}")
    height, width = pixels.shape
    if factor > height or factor > width:
        raise ValueError(f"factor {factor} exceeds the {height}x{width} slice")
    if factor == 1:
        return pixels.copy()
    if mode == "nearest":
        return pixels[::factor, ::factor].copy()
    if mode != "area_average":
        raise ValueError(f"unknown resize mode {mode!r}")
    rows = np.arange(0, height, factor)
    cols = np.arange(0, width, factor)
    sums = np.add.reduceat(np.add.reduceat(pixels, rows, axis=0), cols, axis=1)
    row_counts = np.minimum(factor, height - rows)
    col_counts = np.minimum(factor, width - cols)
    return sums / np.outer(row_counts, col_counts)


def downsample(stack: SelectedStack, spec: ResizeSpec = ResizeSpec()) -> SelectedStack:
    """Downsample every slice of a stack.

    Window, slice indices and ROI are preserved as-is; the ROI stays in
    pre-resize pixel coordinates.
    """
    slices = tuple(
        Slice2D(pixels=downsample_plane(slc.pixels, spec.factor, spec.mode),
                index=slc.index)
        for slc in stack.slices)
    return SelectedStack(subject_id=stack.subject_id, window=stack.window,
                         slices=slices, roi=stack.roi)
