import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mirrorsweep import io as mio
from mirrorsweep.geometry import CameraIntrinsics
from mirrorsweep.scenegen import SceneSpec, generate, orbit_pose


def test_dpth_header_layout():
    raw = mio.encode_depth(np.array([[1.0, 2.0, 3.0]], dtype=np.float32))
    assert raw[:4] == b"DPTH"
    assert struct.unpack("<III", raw[4:16]) == (3, 1, 0)
    assert len(raw) == 16 + 12
    assert struct.unpack("<3f", raw[16:]) == (1.0, 2.0, 3.0)


@given(arrays(np.float32, st.tuples(st.integers(1, 9), st.integers(1, 9)),
              elements=st.floats(0, 100, width=32)))
def test_dpth_round_trip(d):
    np.testing.assert_array_equal(mio.decode_depth(mio.encode_depth(d)), d)


def test_dpth_errors(tmp_path):
    good = mio.encode_depth(np.zeros((2, 2)))
    with pytest.raises(ValueError, match="magic"):
        mio.decode_depth(b"XXXX" + good[4:])
    with pytest.raises(ValueError, match="bytes"):
        mio.decode_depth(good[:-1])
    with pytest.raises(ValueError, match="header"):
        mio.decode_depth(good[:10])
    with pytest.raises(ValueError):
        mio.encode_depth(np.zeros(3))
    with pytest.raises(OSError, match="missing.depth"):
        mio.read_depth(tmp_path / "missing.depth")
    p = tmp_path / "bad.depth"
    p.write_bytes(b"junk")
    with pytest.raises(ValueError, match="bad.depth"):
        mio.read_depth(p)


def test_mask_and_image_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.random((5, 7)) > 0.5
    mio.write_mask(tmp_path / "m.png", m)
    np.testing.assert_array_equal(mio.read_mask(tmp_path / "m.png"), m)
    rgb = rng.integers(0, 256, (5, 7, 3), dtype=np.uint8)
    mio.write_image(tmp_path / "a.png", rgb, m)
    got, mask = mio.read_image(tmp_path / "a.png")
    np.testing.assert_array_equal(got, rgb)
    np.testing.assert_array_equal(mask, m)
    mio.write_image(tmp_path / "b.png", rgb)
    got, mask = mio.read_image(tmp_path / "b.png")
    np.testing.assert_array_equal(got, rgb)
    assert mask is None


def test_unreadable_image(tmp_path):
    p = tmp_path / "x.png"
    p.write_text("not a png")
    with pytest.raises(OSError, match="x.png"):
        mio.read_image(p)


def test_intrinsics_files(tmp_path):
    k = CameraIntrinsics(100.0, 101.0, 50.0, 40.0, 100, 80)
    mio.write_intrinsics(tmp_path / "k.json", k)
    assert mio.read_intrinsics(tmp_path / "k.json") == k
    (tmp_path / "bad.json").write_text("[1, 2]")
    with pytest.raises(ValueError):
        mio.read_intrinsics(tmp_path / "bad.json")
    (tmp_path / "broken.json").write_text("{")
    with pytest.raises(ValueError, match="invalid JSON"):
        mio.read_intrinsics(tmp_path / "broken.json")


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    p = tmp_path / "f.txt"
    mio.atomic_write_text(p, "one")
    mio.atomic_write_text(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in tmp_path.iterdir()] == ["f.txt"]
    with pytest.raises(OSError, match="nowhere"):
        mio.atomic_write_text(tmp_path / "nowhere" / "f.txt", "x")


def test_scene_files_round_trip(tmp_path):
    sc = generate(SceneSpec(4, "box-cluster", "checker", orbit_pose(2.5, 20.0, 30.0), image_size=(64, 64)))
    meta = mio.write_scene(tmp_path, sc)
    assert meta["scene_id"] == "scene_00000004"
    paths = mio.list_scenes(tmp_path)
    assert [p.name for p in paths] == ["scene_00000004.json"]
    back = mio.read_scene_meta(paths[0])
    np.testing.assert_allclose(back["w_gt"], sc.w_gt)
    np.testing.assert_allclose(back["pose"].r, sc.spec.pose.r)
    assert back["intrinsics"] == sc.spec.intrinsics
    depth = mio.read_depth(tmp_path / "scene_00000004.depth")
    np.testing.assert_allclose(depth, np.where(sc.mask, sc.depth, 0).astype(np.float32))
    rgb, mask = mio.read_image(tmp_path / "scene_00000004.png")
    np.testing.assert_array_equal(rgb, sc.image)
    np.testing.assert_array_equal(mask, sc.mask)


def test_list_scenes_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        mio.list_scenes(tmp_path / "nope")
    (tmp_path / "suite.json").write_text("{}")
    assert mio.list_scenes(tmp_path) == []
    (tmp_path / "a.json").write_text("{}")
    (tmp_path / "a.png").write_bytes(b"")
    with pytest.raises(ValueError, match="scene_id"):
        mio.read_scene_meta(tmp_path / "a.json")
