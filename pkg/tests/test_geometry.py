import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mirrorsweep.geometry import (
    CameraIntrinsics,
    InvalidPlaneError,
    RigidPose,
    angle_error,
    angle_errors,
    backproject,
    canonical_normal,
    canonical_normals,
    correspondence,
    mirror_homography,
    mirror_homography_offset,
    mirror_point,
    plane_normal_from_homography,
    plane_world_to_camera,
    project,
    reflection_matrix,
)

from conftest import random_intrinsics, random_plane

unit = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1)


def householder_mirror(p, w):
    # independent oracle: project onto the plane along its unit normal
    n = w / np.linalg.norm(w)
    dist = p @ n + 1.0 / np.linalg.norm(w)
    return p - 2.0 * dist * n


def test_k_embedding_maps_camera_point_to_pixel_vector(k256):
    p = np.array([0.3, -0.2, 2.5])
    x = k256.k @ np.append(p, 1.0)
    x /= x[2]
    assert x[0] == pytest.approx(k256.fx * 0.3 / 2.5 + k256.cx)
    assert x[1] == pytest.approx(k256.fy * -0.2 / 2.5 + k256.cy)
    assert x[3] == pytest.approx(1 / 2.5)
    np.testing.assert_allclose(k256.k @ k256.k_inv, np.eye(4), atol=1e-12)


def test_intrinsics_dict_round_trip(k256):
    assert CameraIntrinsics.from_dict(k256.to_dict()) == k256
    with pytest.raises(ValueError, match="cy"):
        CameraIntrinsics.from_dict({"fx": 1, "fy": 1, "cx": 0, "width": 2, "height": 2})


def test_mirror_point_hand_example():
    # plane z = 2 is w = (0, 0, -0.5)
    np.testing.assert_allclose(mirror_point([1.0, 2.0, 1.0], [0, 0, -0.5]), [1.0, 2.0, 3.0])


def test_reflection_matrix_properties():
    rng = np.random.default_rng(0)
    for _ in range(20):
        w = random_plane(rng)
        r = reflection_matrix(w)
        np.testing.assert_allclose(r @ r, np.eye(4), atol=1e-12)
        assert np.linalg.det(r) == pytest.approx(-1.0)
        p = rng.normal(size=3)
        np.testing.assert_allclose((r @ np.append(p, 1))[:3], householder_mirror(p, w), atol=1e-12)


def test_homography_matches_closed_form(k256):
    w = np.array([0.3, -0.1, -0.4])
    s = 2.0 / (w @ w)
    inner = np.eye(4) - s * np.outer(np.append(w, 0), np.append(w, 1))
    np.testing.assert_allclose(mirror_homography(k256, w), k256.k @ inner @ np.linalg.inv(k256.k), atol=1e-9)


def test_offset_form_agrees_and_is_sign_free(k256):
    w = np.array([0.2, 0.1, -0.5])
    n, off = w / np.linalg.norm(w), 1 / np.linalg.norm(w)
    c = mirror_homography(k256, w)
    np.testing.assert_allclose(mirror_homography_offset(k256, n, off), c, atol=1e-9)
    np.testing.assert_allclose(mirror_homography_offset(k256, -n, -off), c, atol=1e-9)
    np.testing.assert_allclose(mirror_homography_offset(k256, 3 * n, off), c, atol=1e-9)


@pytest.mark.parametrize("w", [[0, 0, 0], [np.nan, 0, 1], [np.inf, 0, 0]])
def test_degenerate_plane_rejected(w):
    with pytest.raises(InvalidPlaneError):
        reflection_matrix(w)


def test_singular_k_raises():
    with pytest.raises(np.linalg.LinAlgError):
        mirror_homography(np.zeros((4, 4)), [0, 0, -1])


def test_project_backproject_round_trip(k256):
    xy = np.array([[10.0, 20.0], [200.5, 100.25]])
    d = np.array([1.5, 3.0])
    p = backproject(k256, xy, d)
    np.testing.assert_allclose(p[:, 2], d)
    x = project(k256, p)
    np.testing.assert_allclose(x[:, :2], xy, atol=1e-10)
    np.testing.assert_allclose(x[:, 3], 1 / d)


def test_correspondence_behind_camera_is_invalid(k256):
    # plane z = 1 mirrors a point at depth 3 to depth -1
    c = mirror_homography(k256, [0, 0, -1.0])
    xy, dm, ok = correspondence([[100.0, 100.0]], [3.0], c)
    assert not ok[0] and np.isnan(xy[0]).all() and np.isnan(dm[0])
    with pytest.raises(ValueError):
        correspondence([[1.0, 1.0]], [0.0], c)


def test_criterion_1_property_suite():
    """1000 random (K, w, point): involution and two-route agreement."""
    rng = np.random.default_rng(1)
    worst_inv = worst_px = 0.0
    n = 0
    while n < 1000:
        k = random_intrinsics(rng)
        w = random_plane(rng)
        c = mirror_homography(k, w)
        worst_inv = max(worst_inv, np.abs(c @ c - np.eye(4)).max() / np.abs(c).max())
        xy = rng.uniform([0, 0], [k.width, k.height])
        d = rng.uniform(0.5, 10.0)
        m = householder_mirror(backproject(k, xy, d), w)
        if m[2] < 0.5:  # mirror in the same depth range as the source
            continue
        via_3d = project(k, m)[:2]
        via_px, dm, ok = correspondence(xy, d, c)
        assert ok
        worst_px = max(worst_px, np.abs(via_px - via_3d).max())
        assert dm == pytest.approx(m[2], rel=1e-9)
        n += 1
    assert worst_inv < 1e-9
    assert worst_px < 1e-7


@given(unit, st.floats(0.2, 5.0), st.sampled_from([0.5, 1.0, 2.0]))
def test_normal_from_scaled_homography(n, dist, s):
    n = np.array(n) / np.linalg.norm(n)
    k = CameraIntrinsics(300, 300, 160, 120, 320, 240)
    w = n / dist
    got = plane_normal_from_homography(k, mirror_homography(k, s * w))
    np.testing.assert_allclose(got, canonical_normal(n), atol=1e-9)


def test_plane_world_to_camera_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        pose = RigidPose(q, rng.normal(size=3) * 3)
        w = plane_world_to_camera(pose)
        # two world points on x = 0 land on the camera-space plane
        for yz in rng.normal(size=(2, 2)):
            p = pose.apply(np.array([0.0, *yz]))
            assert p @ w + 1 == pytest.approx(0, abs=1e-9)
        # the world mirror matches the camera-space mirror
        pw = rng.normal(size=3)
        np.testing.assert_allclose(
            pose.apply(pw * [-1, 1, 1]), mirror_point(pose.apply(pw), w), atol=1e-9
        )


def test_plane_through_camera_rejected():
    with pytest.raises(InvalidPlaneError):
        plane_world_to_camera(RigidPose(np.eye(3), [0.0, 0.0, 5.0]))


def test_rigid_pose_validation():
    with pytest.raises(ValueError):
        RigidPose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        RigidPose(np.eye(2), np.zeros(3))


@given(unit)
def test_canonical_normal_faces_viewer(v):
    n = canonical_normal(v)
    assert np.linalg.norm(n) == pytest.approx(1.0)
    np.testing.assert_array_equal(n, canonical_normal(-np.array(v)))
    assert n[2] <= 0


def test_canonical_normal_tie_breaks():
    np.testing.assert_array_equal(canonical_normal([1.0, 2.0, 0.0]), [-1 / np.sqrt(5), -2 / np.sqrt(5), 0.0])
    np.testing.assert_array_equal(canonical_normal([3.0, 0.0, 0.0]), [-1.0, 0.0, 0.0])


def test_angle_error_values():
    assert angle_error([1, 0, 0], [0, 1, 0]) == pytest.approx(90.0)
    assert angle_error([1, 0, 0], [-1, 0, 0]) == 0.0
    assert angle_error([1, 0, 0], [1, 1, 0]) == pytest.approx(45.0)
    tiny = angle_error([1, 0, 0], [1, 1e-9, 0])
    assert tiny == pytest.approx(np.degrees(1e-9), rel=1e-6)
    with pytest.raises(ValueError):
        angle_error([0, 0, 0], [1, 0, 0])


@given(unit, unit)
def test_angle_errors_vectorised_matches_scalar(a, b):
    assert angle_errors(np.array([a]), np.array(b))[0] == pytest.approx(angle_error(a, b), abs=1e-9)
    assert 0 <= angle_error(a, b) <= 90


def test_canonical_normals_rowwise():
    rng = np.random.default_rng(8)
    v = np.vstack([rng.normal(size=(50, 3)), [[1.0, 2.0, 0.0], [-3.0, 0.0, 0.0], [0.0, -1.0, 0.0]]])
    np.testing.assert_allclose(canonical_normals(v), np.array([canonical_normal(x) for x in v]), atol=1e-15)
    with pytest.raises(InvalidPlaneError):
        canonical_normals(np.zeros((1, 3)))
