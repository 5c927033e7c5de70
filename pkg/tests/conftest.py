"""Shared helpers: hand-assembled NIfTI blobs and common fixtures."""
from __future__ import annotations

import struct

import numpy as np
import pytest

from slicescout import PhantomSpec, make_phantom

# bitpix each header must carry for its datatype code
NIFTI_BITPIX = {2: 8, 4: 16, 8: 32, 16: 32, 64: 64}
NIFTI_NUMPY = {2: "u1", 4: "i2", 8: "i4", 16: "f4", 64: "f8"}


def nifti_bytes(data, spacing=(1.0, 1.0, 1.0), datatype=64, bitpix=None,
                vox_offset=352.0, scl_slope=0.0, scl_inter=0.0,
                magic=b"n+1\x00", order="<", ndim=3, extra_dims=(1, 1, 1, 1),
                sizeof_hdr=348) -> bytes:
    """Assemble a single-file NIfTI-1 blob from scratch.

    ``data`` is indexed [z, y, x].  Every header field is overridable so
    tests can produce deliberately broken files.
    """
    data = np.asarray(data)
    nz, ny, nx = data.shape
    header = bytearray(348)
    struct.pack_into(order + "i", header, 0, sizeof_hdr)
    struct.pack_into(order + "8h", header, 40, ndim, nx, ny, nz, *extra_dims)
    if bitpix is None:
        bitpix = NIFTI_BITPIX[datatype]
    struct.pack_into(order + "2h", header, 70, datatype, bitpix)
    struct.pack_into(order + "8f", header, 76, 0.0, *spacing, 0.0, 0.0, 0.0, 0.0)
    struct.pack_into(order + "3f", header, 108, vox_offset, scl_slope, scl_inter)
    header[344:348] = magic
    payload = data.astype(np.dtype(order + NIFTI_NUMPY[datatype])).tobytes()
    padding = b"\x00" * max(0, int(vox_offset) - 348)
    return bytes(header) + padding + payload


@pytest.fixture
def small_phantom():
    """Noise-free ellipsoid in a 32x48x24 grid; ROI spans [6,25]x[8,39]."""
    return make_phantom(PhantomSpec(dims=(32, 48, 24), radii=(10.0, 16.0, 9.0)))


@pytest.fixture
def noisy_phantom():
    """Ellipsoid spanning every slice, with mild background noise."""
    return make_phantom(PhantomSpec(
        dims=(40, 40, 30), radii=(14.0, 14.0, 14.5), center=(20.0, 20.0, 14.5),
        noise_sigma=0.5, seed=5))
