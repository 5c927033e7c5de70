"""On-disk form of a selected stack: raw float64 planes plus a text manifest.

Each slice is written as ``slice_NNNN.f64`` (little-endian float64, row-major,
named by its original slice index).  The manifest is a key=value text file in
a fixed key order, so rewriting the same stack reproduces identical bytes and
manifests can be compared by hash across runs.  ``content_hash`` is a sha256
over the plane bytes in stack order.
"""
from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .edges import CannyParams
from .errors import CorruptFileError, FormatError
from .roi import BoundingBox
from .volume import Slice2D
from .window import SelectedStack, WindowSelection

MANIFEST_NAME = "manifest.txt"
MANIFEST_FORMAT = "slicescout-stack-v1"


def plane_filename(index: int) -> str:
    return f"slice_{index:04d}.f64"


def stack_content_hash(slices: Iterable[Slice2D]) -> str:
    digest = hashlib.sha256()
    for slc in slices:
        digest.update(slc.pixels.astype("<f8", copy=False).tobytes())
    return digest.hexdigest()


def _fmt(value) -> str:
    if isinstance(value, float):
        # plain-float repr; numpy scalars would otherwise print their type
        return repr(float(value))
    return str(value)


def _param_items(params: Optional[CannyParams]) -> list[tuple[str, object]]:
    if params is None:
        return []
    return [("sigma", params.sigma), ("radius", params.radius),
            ("low_frac", params.low_frac), ("high_frac", params.high_frac),
            ("threshold_base", params.threshold_base)]


def _write_planes_and_manifest(out_dir: Path, slices: Sequence[Slice2D],
                               items: list[tuple[str, object]]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    for slc in slices:
        path = out_dir / plane_filename(slc.index)
        path.write_bytes(slc.pixels.astype("<f8", copy=False).tobytes())
    items.append(("content_hash", "sha256:" + stack_content_hash(slices)))
    manifest = out_dir / MANIFEST_NAME
    manifest.write_text("".join(f"{key}={_fmt(value)}\n" for key, value in items))
    return manifest


def save_stack(stack: SelectedStack, out_dir, params: Optional[CannyParams] = None,
               extra: Optional[Mapping[str, object]] = None) -> Path:
    """Write a contiguous-window stack; returns the manifest path."""
    first = stack.slices[0]
    items: list[tuple[str, object]] = [
        ("format", MANIFEST_FORMAT),
        ("subject_id", stack.subject_id),
        ("selection", "window"),
        ("start", stack.window.start),
        ("length", stack.window.length),
        ("method", stack.window.method),
        ("total_score", stack.window.total_score),
        ("roi", f"{stack.roi.min_x}:{stack.roi.min_y}:{stack.roi.max_x}:{stack.roi.max_y}"),
        ("slice_width", first.width),
        ("slice_height", first.height),
        ("dtype", "float64-le"),
    ]
    items.extend(_param_items(params))
    items.extend((str(k), v) for k, v in (extra or {}).items())
    return _write_planes_and_manifest(Path(out_dir), stack.slices, items)


def save_top_k(subject_id: str, slices: Sequence[Slice2D], roi: BoundingBox,
               method: str, total_score, out_dir,
               params: Optional[CannyParams] = None,
               extra: Optional[Mapping[str, object]] = None) -> Path:
    """Write an unconstrained top-k stack (ablation mode); returns the manifest path."""
    first = slices[0]
    items: list[tuple[str, object]] = [
        ("format", MANIFEST_FORMAT),
        ("subject_id", subject_id),
        ("selection", "top_k"),
        ("indices", ",".join(str(s.index) for s in slices)),
        ("length", len(slices)),
        ("method", method),
        ("total_score", total_score),
        ("roi", f"{roi.min_x}:{roi.min_y}:{roi.max_x}:{roi.max_y}"),
        ("slice_width", first.width),
        ("slice_height", first.height),
        ("dtype", "float64-le"),
    ]
    items.extend(_param_items(params))
    items.extend((str(k), v) for k, v in (extra or {}).items())
    return _write_planes_and_manifest(Path(out_dir), slices, items)


def load_manifest(path) -> dict[str, str]:
    """Parse a manifest into a key -> raw string value mapping."""
    out: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"{path}: bad manifest line {line!r}")
        out[key] = value
    return out


def load_stack(directory) -> SelectedStack:
    """Reload a contiguous-window stack directory written by ``save_stack``."""
    directory = Path(directory)
    manifest = load_manifest(directory / MANIFEST_NAME)
    if manifest.get("format") != MANIFEST_FORMAT:
        raise FormatError(f"{directory}: not a {MANIFEST_FORMAT} manifest")
    if manifest.get("selection") != "window":
        raise FormatError(f"{directory}: only window-selection stacks can be reloaded")
    start = int(manifest["start"])
    length = int(manifest["length"])
    width = int(manifest["slice_width"])
    height = int(manifest["slice_height"])
    method = manifest["method"]
    raw_total = manifest["total_score"]
    total = float(raw_total) if any(c in raw_total for c in ".eE") else int(raw_total)
    slices = []
    for index in range(start, start + length):
        payload = (directory / plane_filename(index)).read_bytes()
        if len(payload) != width * height * 8:
            raise CorruptFileError(
                f"{directory / plane_filename(index)}: expected {width * height * 8} bytes")
        slices.append(Slice2D(
            pixels=np.frombuffer(payload, dtype="<f8").reshape(height, width),
            index=index))
    expected = manifest.get("content_hash", "")
    actual = "sha256:" + stack_content_hash(slices)
    if expected and expected != actual:
        raise CorruptFileError(f"{directory}: content hash mismatch")
    window = WindowSelection(start=start, length=length, total_score=total, method=method)
    roi = BoundingBox(*(int(v) for v in manifest["roi"].split(":")))
    return SelectedStack(subject_id=manifest["subject_id"], window=window,
                         slices=tuple(slices), roi=roi)
