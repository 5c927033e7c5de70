"""Stack directory persistence: manifests, plane files, content hashes."""
import numpy as np
import pytest

from slicescout import (CannyParams, CorruptFileError, FormatError, load_stack,
                        save_stack, save_top_k, select_slices, select_top_k)
from slicescout.stack_io import (MANIFEST_NAME, load_manifest, plane_filename,
                                 stack_content_hash)


@pytest.fixture()
def stack(small_phantom):
    return select_slices(small_phantom, length=10)


def test_save_load_roundtrip_is_bit_exact(stack, tmp_path):
    save_stack(stack, tmp_path / "out", params=CannyParams())
    loaded = load_stack(tmp_path / "out")
    assert loaded.subject_id == stack.subject_id
    assert loaded.window == stack.window
    assert loaded.roi == stack.roi
    for a, b in zip(loaded.slices, stack.slices):
        assert a.index == b.index
        assert a.pixels.tobytes() == b.pixels.astype("<f8").tobytes()


def test_manifest_is_plain_key_value_text(stack, tmp_path):
    manifest_path = save_stack(stack, tmp_path, params=CannyParams(),
                               extra={"source": "phantom.ssv"})
    text = manifest_path.read_text()
    assert text.endswith("\n")
    manifest = load_manifest(manifest_path)
    assert manifest["format"] == "slicescout-stack-v1"
    assert manifest["selection"] == "window"
    assert manifest["start"] == "7"
    assert manifest["length"] == "10"
    assert manifest["roi"] == "6:8:25:39"
    assert manifest["sigma"] == "1.4"
    assert manifest["source"] == "phantom.ssv"
    assert manifest["content_hash"].startswith("sha256:")
    # numpy scalars must not leak their repr into the file
    assert "np.float64" not in text and "np.int64" not in text


def test_plane_files_cover_the_window(stack, tmp_path):
    save_stack(stack, tmp_path)
    names = sorted(p.name for p in tmp_path.glob("*.f64"))
    assert names == [plane_filename(i) for i in range(7, 17)]


def test_content_hash_tracks_pixel_bytes(stack):
    h1 = stack_content_hash(stack.slices)
    assert h1 == stack_content_hash(stack.slices)
    bumped = list(stack.slices)
    pixels = bumped[0].pixels.copy()
    pixels[0, 0] += 1.0
    bumped[0] = type(bumped[0])(pixels=pixels, index=bumped[0].index)
    assert stack_content_hash(bumped) != h1


def test_load_detects_corrupted_plane(stack, tmp_path):
    save_stack(stack, tmp_path)
    victim = tmp_path / plane_filename(8)
    raw = bytearray(victim.read_bytes())
    raw[3] ^= 0xFF
    victim.write_bytes(bytes(raw))
    with pytest.raises(CorruptFileError, match="hash"):
        load_stack(tmp_path)


def test_load_detects_truncated_plane(stack, tmp_path):
    save_stack(stack, tmp_path)
    victim = tmp_path / plane_filename(9)
    victim.write_bytes(victim.read_bytes()[:-8])
    with pytest.raises(CorruptFileError, match="bytes"):
        load_stack(tmp_path)


def test_load_rejects_foreign_manifest(tmp_path):
    (tmp_path / MANIFEST_NAME).write_text("format=something-else\n")
    with pytest.raises(FormatError, match="manifest"):
        load_stack(tmp_path)


def test_load_manifest_rejects_line_without_separator(tmp_path):
    path = tmp_path / MANIFEST_NAME
    path.write_text("format=slicescout-stack-v1\nnonsense\n")
    with pytest.raises(FormatError, match="nonsense"):
        load_manifest(path)


def test_top_k_manifest_records_indices(small_phantom, tmp_path):
    indices, roi, profile = select_top_k(small_phantom, count=5)
    slices = tuple(s for s in select_slices(small_phantom, 24).slices
                   if s.index in indices)
    manifest_path = save_top_k("phantom", slices, roi, profile.kind,
                               int(profile.scores[indices].sum()), tmp_path)
    manifest = load_manifest(manifest_path)
    assert manifest["selection"] == "top_k"
    assert manifest["indices"] == ",".join(str(i) for i in indices)
    assert manifest["length"] == "5"
    with pytest.raises(FormatError, match="window"):
        load_stack(tmp_path)
