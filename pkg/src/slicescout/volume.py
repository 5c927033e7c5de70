"""Volume loading, slicing, and synthetic phantom generation.

In-memory layout
----------------
A volume is a C-contiguous float64 array indexed ``data[z, y, x]``, so x is
the fastest-varying axis, matching the on-disk order of both supported file
formats.  ``dims`` is always reported as ``(nx, ny, nz)``.

``slice_axis`` names the axis (0=x, 1=y, 2=z) along which 2D slices are cut.
A slice keeps the remaining two axes in ascending order: the lower axis is the
pixel column (width), the higher one the pixel row (height).  For the default
``slice_axis=2`` a slice is therefore ``data[k]`` with width nx and height ny.

Supported inputs are single-file NIfTI-1 (.nii, optionally gzip-compressed)
and the toolkit's own raw format (see ``write_raw``).  Intensities are always
float64 once loaded.
"""
from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptFileError, FormatError, UnsupportedDataError

NIFTI_HEADER_SIZE = 348
NIFTI_MAGICS = (b"n+1\x00", b"ni1\x00")

# NIfTI-1 datatype code -> (numpy dtype char, expected bitpix)
_NIFTI_DTYPES = {
    2: ("u1", 8),    # uint8
    4: ("i2", 16),   # int16
    8: ("i4", 32),   # int32
    16: ("f4", 32),  # float32
    64: ("f8", 64),  # float64
}

RAW_MAGIC = b"SSCOUTV1"
_RAW_HEADER = struct.Struct("<3I3d")  # dims then spacing, little-endian
RAW_HEADER_SIZE = len(RAW_MAGIC) + _RAW_HEADER.size


@dataclass(frozen=True, eq=False)
class Volume3D:
    """A 3D intensity grid with voxel spacing and a designated slice axis.

    ``data`` is stored read-only; a loaded volume never changes, which makes
    it safe to share across worker processes and repeated pipeline runs.
    """

    data: np.ndarray                      # (nz, ny, nx), float64, read-only
    spacing: tuple[float, float, float]   # mm per voxel along (x, y, z)
    slice_axis: int = 2
    subject_id: str = ""

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"volume data must be 3-D, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("volume intensities must be finite")
        if self.slice_axis not in (0, 1, 2):
            raise ValueError(f"slice_axis must be 0, 1 or 2, got {self.slice_axis}")
        spacing = tuple(float(s) for s in self.spacing)
        if len(spacing) != 3 or any(s <= 0 for s in spacing):
            raise ValueError(f"spacing must be three positive values, got {self.spacing}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "spacing", spacing)

    @property
    def dims(self) -> tuple[int, int, int]:
        """Grid size as (nx, ny, nz)."""
        nz, ny, nx = self.data.shape
        return (nx, ny, nz)

    @property
    def n_slices(self) -> int:
        return self.dims[self.slice_axis]

    @property
    def slice_spacing(self) -> float:
        """Spacing in mm along the slice axis."""
        return self.spacing[self.slice_axis]


@dataclass(frozen=True, eq=False)
class Slice2D:
    """One 2D plane of a volume; row-major float64 pixels plus its slice index."""

    pixels: np.ndarray  # (height, width)
    index: int = 0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.pixels, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"slice pixels must be 2-D, got shape {arr.shape}")
        if self.index < 0:
            raise ValueError(f"slice index must be nonnegative, got {self.index}")
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def slice_plane(vol: Volume3D, index: int) -> np.ndarray:
    """View (no copy) of one plane orthogonal to ``vol.slice_axis``."""
    if not 0 <= index < vol.n_slices:
        raise IndexError(f"slice index {index} out of range 0..{vol.n_slices - 1}")
    if vol.slice_axis == 2:
        return vol.data[index]
    if vol.slice_axis == 1:
        return vol.data[:, index, :]
    return vol.data[:, :, index]


def extract_slices(vol: Volume3D) -> list[Slice2D]:
    """All planes along the slice axis, as independent contiguous copies."""
    return [Slice2D(pixels=np.array(slice_plane(vol, k)), index=k)
            for k in range(vol.n_slices)]


def _subject_from_path(path: Path) -> str:
    name = path.name
    for suffix in (".nii.gz", ".nii", ".ssv"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return path.stem


def read_nifti(path, slice_axis: int = 2, subject_id: str | None = None) -> Volume3D:
    """Load a single-file NIfTI-1 volume (.nii or .nii.gz).

    The header fields sizeof_hdr, dim, datatype, bitpix, pixdim, vox_offset,
    scl_slope, scl_inter and magic are honored as written; byte order is
    detected from sizeof_hdr.  Supported datatypes: uint8, int16, int32,
    float32, float64.  When scl_slope is nonzero, intensities become
    ``raw * scl_slope + scl_inter``.

    Raises FormatError for unrecognized or inconsistent headers,
    UnsupportedDataError for valid-but-unsupported files (datatype, 4D),
    and CorruptFileError for truncated payloads.
    """
    path = Path(path)
    blob = path.read_bytes()
    if blob[:2] == b"\x1f\x8b":
        try:
            blob = gzip.decompress(blob)
        except (OSError, EOFError) as exc:
            raise CorruptFileError(f"{path}: bad gzip stream: {exc}") from exc
    if len(blob) < NIFTI_HEADER_SIZE:
        raise CorruptFileError(f"{path}: {len(blob)} bytes is shorter than the 348-byte header")
    magic = blob[344:348]
    if magic not in NIFTI_MAGICS:
        raise FormatError(f"{path}: bad magic {magic!r}")
    for order in ("<", ">"):
        if struct.unpack(order + "i", blob[0:4])[0] == NIFTI_HEADER_SIZE:
            break
    else:
        raise FormatError(f"{path}: sizeof_hdr is not 348 in either byte order")
    dim = struct.unpack(order + "8h", blob[40:56])
    datatype, bitpix = struct.unpack(order + "2h", blob[70:74])
    pixdim = struct.unpack(order + "8f", blob[76:108])
    vox_offset, scl_slope, scl_inter = struct.unpack(order + "3f", blob[108:120])

    ndim = dim[0]
    if ndim < 3 or ndim > 7:
        raise UnsupportedDataError(f"{path}: dim[0]={ndim}, need a 3-D volume")
    if ndim > 3 and any(d > 1 for d in dim[4:1 + ndim]):
        raise UnsupportedDataError(f"{path}: multi-frame volumes are not supported")
    nx, ny, nz = (int(d) for d in dim[1:4])
    if min(nx, ny, nz) < 1:
        raise FormatError(f"{path}: nonpositive grid size {(nx, ny, nz)}")
    if datatype not in _NIFTI_DTYPES:
        raise UnsupportedDataError(f"{path}: datatype code {datatype} is not supported")
    np_char, want_bits = _NIFTI_DTYPES[datatype]
    if bitpix != want_bits:
        raise FormatError(f"{path}: bitpix {bitpix} inconsistent with datatype {datatype}")
    spacing = tuple(float(p) for p in pixdim[1:4])
    if any(s <= 0 or not np.isfinite(s) for s in spacing):
        raise FormatError(f"{path}: nonpositive pixdim {spacing}")
    if not np.isfinite(vox_offset) or float(vox_offset) != int(vox_offset):
        raise FormatError(f"{path}: vox_offset {vox_offset!r} is not an integral offset")
    offset = int(vox_offset)
    if offset < NIFTI_HEADER_SIZE:
        raise FormatError(f"{path}: vox_offset {offset} points inside the header")

    count = nx * ny * nz
    dtype = np.dtype(order + np_char)
    need = offset + count * dtype.itemsize
    if len(blob) < need:
        raise CorruptFileError(
            f"{path}: payload truncated, need {need} bytes but file has {len(blob)}")
    flat = np.frombuffer(blob, dtype=dtype, count=count, offset=offset)
    data = flat.astype(np.float64).reshape(nz, ny, nx)
    if not np.isfinite(scl_slope) or not np.isfinite(scl_inter):
        raise FormatError(f"{path}: non-finite scl_slope/scl_inter")
    if scl_slope != 0.0 and (scl_slope, scl_inter) != (1.0, 0.0):
        data = data * float(scl_slope) + float(scl_inter)
    if not np.isfinite(data).all():
        raise CorruptFileError(f"{path}: payload contains non-finite intensities")
    if subject_id is None:
        subject_id = _subject_from_path(path)
    return Volume3D(data=data, spacing=spacing, slice_axis=slice_axis, subject_id=subject_id)


def write_raw(vol: Volume3D, path) -> None:
    """Serialize a volume to the toolkit's raw format.

    Layout, all little-endian: 8-byte magic ``SSCOUTV1``; dims nx, ny, nz as
    uint32; spacing sx, sy, sz as float64; then nx*ny*nz float64 intensities
    with x fastest-varying.  The payload round-trips bit-exactly.
    """
    nx, ny, nz = vol.dims
    header = RAW_MAGIC + _RAW_HEADER.pack(nx, ny, nz, *vol.spacing)
    Path(path).write_bytes(header + vol.data.astype("<f8", copy=False).tobytes())


def read_raw(path, slice_axis: int = 2, subject_id: str | None = None) -> Volume3D:
    """Load a volume written by ``write_raw``."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < RAW_HEADER_SIZE:
        raise CorruptFileError(f"{path}: shorter than the {RAW_HEADER_SIZE}-byte header")
    if blob[: len(RAW_MAGIC)] != RAW_MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:len(RAW_MAGIC)]!r}")
    nx, ny, nz, sx, sy, sz = _RAW_HEADER.unpack_from(blob, len(RAW_MAGIC))
    if min(nx, ny, nz) < 1:
        raise FormatError(f"{path}: nonpositive grid size {(nx, ny, nz)}")
    count = nx * ny * nz
    need = RAW_HEADER_SIZE + count * 8
    if len(blob) < need:
        raise CorruptFileError(
            f"{path}: payload truncated, need {need} bytes but file has {len(blob)}")
    flat = np.frombuffer(blob, dtype="<f8", count=count, offset=RAW_HEADER_SIZE)
    if subject_id is None:
        subject_id = _subject_from_path(path)
    return Volume3D(data=flat.reshape(nz, ny, nx), spacing=(sx, sy, sz),
                    slice_axis=slice_axis, subject_id=subject_id)


@dataclass(frozen=True)
class PhantomSpec:
    """Ellipsoid-in-a-box synthetic volume, used by the tests and docs.

    Voxels inside the ellipsoid get ``foreground``; the rest get ``background``
    plus optional Gaussian noise drawn from a seeded generator, so phantoms are
    reproducible across runs and platforms.  ``center`` defaults to the volume
    center; ``radii`` are in voxels along (x, y, z).  A zero radius yields an
    all-background volume.
    """

    dims: tuple[int, int, int]
    radii: tuple[float, float, float]
    center: tuple[float, float, float] | None = None
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    foreground: float = 255.0
    background: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    slice_axis: int = 2
    subject_id: str = "phantom"


def make_phantom(spec: PhantomSpec) -> Volume3D:
    nx, ny, nz = spec.dims
    if min(nx, ny, nz) < 1:
        raise ValueError(f"phantom dims must be positive, got {spec.dims}")
    center = spec.center if spec.center is not None else ((nx - 1) / 2, (ny - 1) / 2, (nz - 1) / 2)
    cx, cy, cz = center
    rx, ry, rz = spec.radii
    if min(rx, ry, rz) < 0:
        raise ValueError(f"phantom radii must be nonnegative, got {spec.radii}")
    if spec.noise_sigma < 0:
        raise ValueError(f"noise_sigma must be nonnegative, got {spec.noise_sigma}")
    for c, r, n, name in ((cx, rx, nx, "x"), (cy, ry, ny, "y"), (cz, rz, nz, "z")):
        if c - r < 0 or c + r > n - 1:
            raise ValueError(f"ellipsoid exceeds the volume along {name}: "
                             f"center {c}, radius {r}, size {n}")
    zz, yy, xx = np.ogrid[0:nz, 0:ny, 0:nx]
    if rx > 0 and ry > 0 and rz > 0:
        inside = (((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2
                  + ((zz - cz) / rz) ** 2) <= 1.0
    else:
        inside = np.zeros((nz, ny, nx), dtype=bool)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        data = spec.background + rng.normal(0.0, spec.noise_sigma, size=(nz, ny, nx))
        data[inside] = spec.foreground
    else:
        data = np.where(inside, float(spec.foreground), float(spec.background))
    return Volume3D(data=data, spacing=spec.spacing, slice_axis=spec.slice_axis,
                    subject_id=spec.subject_id)
