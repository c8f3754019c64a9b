"""Closed-form camera and reflection-symmetry geometry.

Pixel vectors live in R^4 as ``[x, y, 1, 1/d]`` where ``d`` is camera-space
depth.  The 4x4 intrinsic matrix maps a homogeneous camera point
``[X, Y, Z, 1]`` to ``Z * [x, y, 1, 1/Z]``, so dividing by the third
component recovers the pixel vector.

A mirror plane is parametrized by ``w`` with ``w . p + 1 = 0`` for every
camera-space point ``p`` on the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PLANE_EPS = 1e-12


class InvalidPlaneError(ValueError):
    """The plane cannot be represented as ``w . p + 1 = 0``."""


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics embedded in the 4x4 pixel-plus-inverse-depth convention."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    @property
    def k(self) -> np.ndarray:
        return np.array(
            [
                [self.fx, 0.0, self.cx, 0.0],
                [0.0, self.fy, self.cy, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )

    @property
    def k_inv(self) -> np.ndarray:
        return np.array(
            [
                [1.0 / self.fx, 0.0, -self.cx / self.fx, 0.0],
                [0.0, 1.0 / self.fy, -self.cy / self.fy, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )

    def to_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraIntrinsics":
        missing = {"fx", "fy", "cx", "cy", "width", "height"} - set(d)
        if missing:
            raise ValueError(f"intrinsics missing fields: {sorted(missing)}")
        return cls(
            float(d["fx"]),
            float(d["fy"]),
            float(d["cx"]),
            float(d["cy"]),
            int(d["width"]),
            int(d["height"]),
        )


@dataclass(frozen=True)
class RigidPose:
    """World-to-camera transform ``p_cam = r @ p_world + t``."""

    r: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-9) or np.linalg.det(r) < 0:
            raise ValueError("rotation must be orthonormal with det +1")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float).reshape(3))

    def apply(self, p: np.ndarray) -> np.ndarray:
        return np.asarray(p) @ self.r.T + self.t


def _check_plane(w) -> np.ndarray:
    w = np.asarray(w, dtype=float).reshape(3)
    if not np.all(np.isfinite(w)) or np.linalg.norm(w) < PLANE_EPS:
        raise InvalidPlaneError(f"degenerate plane parameter w={w}")
    return w


def mirror_point(p, w) -> np.ndarray:
    """Reflect camera-space point(s) ``p`` (shape (..., 3)) across ``w . x + 1 = 0``."""
    w = _check_plane(w)
    p = np.asarray(p, dtype=float)
    s = (p @ w + 1.0) / (w @ w)
    return p - 2.0 * s[..., None] * w


def reflection_matrix(w) -> np.ndarray:
    """4x4 camera-space reflection acting on column vectors ``[p; 1]``."""
    w = _check_plane(w)
    u = np.append(w, 0.0)
    v = np.append(w, 1.0)
    return np.eye(4) - (2.0 / (w @ w)) * np.outer(u, v)


def _k_pair(k):
    if isinstance(k, CameraIntrinsics):
        return k.k, k.k_inv
    kk = np.asarray(k, dtype=float)
    return kk, np.linalg.inv(kk)


def mirror_homography(k, w) -> np.ndarray:
    """Mirror homography ``C(w) = K (I - 2/|w|^2 [w; 0][w^T 1]) K^-1``.

    ``k`` is either a :class:`CameraIntrinsics` or a raw 4x4 matrix; a
    singular matrix raises ``numpy.linalg.LinAlgError``.
    """
    kk, kk_inv = _k_pair(k)
    return kk @ reflection_matrix(w) @ kk_inv


def mirror_homography_offset(k, n, offset: float) -> np.ndarray:
    """Mirror homography of the plane ``n . p + offset = 0`` for a direction ``n``.

    Equal to ``mirror_homography(k, n / (|n| * offset))`` whenever the offset
    is non-zero, and still well defined for planes through the camera.
    ``(n, offset)`` and ``(-n, -offset)`` give the same matrix.
    """
    n = np.asarray(n, dtype=float).reshape(3)
    norm = np.linalg.norm(n)
    if norm < PLANE_EPS:
        raise InvalidPlaneError("zero-norm plane direction")
    n = n / norm
    kk, kk_inv = _k_pair(k)
    r = np.eye(4) - 2.0 * np.outer(np.append(n, 0.0), np.append(n, offset))
    return kk @ r @ kk_inv


def project(k, p) -> np.ndarray:
    """Camera-space points (..., 3) to pixel vectors (..., 4) ``[x, y, 1, 1/d]``."""
    kk = k.k if isinstance(k, CameraIntrinsics) else np.asarray(k, dtype=float)
    p = np.asarray(p, dtype=float)
    ph = np.concatenate([p, np.ones(p.shape[:-1] + (1,))], axis=-1)
    x = ph @ kk.T
    return x / x[..., 2:3]


def backproject(k, xy, d) -> np.ndarray:
    """Pixel coordinates (..., 2) at depth ``d`` to camera-space points (..., 3)."""
    kk_inv = k.k_inv if isinstance(k, CameraIntrinsics) else np.linalg.inv(k)
    xy = np.asarray(xy, dtype=float)
    d = np.asarray(d, dtype=float)
    x = np.stack(
        np.broadcast_arrays(xy[..., 0], xy[..., 1], 1.0, 1.0 / d), axis=-1
    )
    ph = x @ kk_inv.T
    return ph[..., :3] / ph[..., 3:4]


def correspondence(xy, d, c):
    """Mirror correspondence of pixel(s) ``xy`` hypothesised at depth ``d``.

    Returns ``(xy_mirror, d_mirror, in_front)``.  ``in_front`` is False where
    the mirrored point falls on or behind the camera plane; those samples
    must be treated as invalid and their coordinates are NaN.
    """
    xy = np.asarray(xy, dtype=float)
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("depth must be positive")
    c = np.asarray(c, dtype=float)
    x0, y0 = xy[..., 0], xy[..., 1]
    inv_d = 1.0 / d
    out = [c[i, 0] * x0 + c[i, 1] * y0 + c[i, 2] + c[i, 3] * inv_d for i in range(4)]
    z, q = out[2], out[3]
    # z / q is the mirrored depth; both share the sign of the original depth
    in_front = (z > 0) & (q > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        xm = np.where(in_front, out[0] / z, np.nan)
        ym = np.where(in_front, out[1] / z, np.nan)
        dm = np.where(in_front, z / q, np.nan)
    return np.stack([xm, ym], axis=-1), dm, in_front


def plane_world_to_camera(pose: RigidPose) -> np.ndarray:
    """Camera-space ``w`` of the world plane ``x = 0``."""
    n_c = pose.r[:, 0]
    offset = n_c @ pose.t
    if abs(offset) < PLANE_EPS:
        raise InvalidPlaneError("world plane x=0 passes through the camera center")
    return -n_c / offset


def plane_normal_from_homography(k, c) -> np.ndarray:
    """Unit normal of the fixed plane of a mirror homography.

    The camera-space reflection ``K^-1 C K`` equals ``I - 2 u v^T / |w|^2``;
    its first three rows of column ``j`` carry ``-2 w w_j / |w|^2``, so the
    dominant column of ``I - R`` is parallel to ``w``.
    """
    kk, kk_inv = _k_pair(k)
    a = (np.eye(4) - kk_inv @ np.asarray(c) @ kk)[:3, :3]
    j = int(np.argmax(np.linalg.norm(a, axis=0)))
    n = a[:, j] / np.linalg.norm(a[:, j])
    return canonical_normal(n)


def canonical_normal(n) -> np.ndarray:
    """Unit vector with the sign fixed so the plane faces the viewer.

    With ``|w|`` fixed, ``w`` and ``-w`` are different planes: only the one
    with ``w_z < 0`` crosses the optical axis in front of the camera.  Ties
    at ``z == 0`` fall back to ``y`` then ``x``.
    """
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n)
    if norm < PLANE_EPS:
        raise InvalidPlaneError("zero-norm direction")
    n = n / norm
    for comp in (n[2], n[1], n[0]):
        if comp != 0:
            return n if comp < 0 else -n
    return n


def canonical_normals(v) -> np.ndarray:
    """Row-wise :func:`canonical_normal` of an (N, 3) array."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v, axis=1, keepdims=True)
    if np.any(norm < PLANE_EPS):
        raise InvalidPlaneError("zero-norm direction")
    v = v / norm
    # sign of the first non-zero component among z, y, x
    key = np.where(v[:, 2] != 0, v[:, 2], np.where(v[:, 1] != 0, v[:, 1], v[:, 0]))
    return np.where((key > 0)[:, None], -v, v)


def angle_error(a, b) -> float:
    """Sign-invariant angle in degrees between the lines spanned by ``a`` and ``b``."""
    a0, a1, a2 = (float(x) for x in np.asarray(a, dtype=float).reshape(3))
    b0, b1, b2 = (float(x) for x in np.asarray(b, dtype=float).reshape(3))
    if math.hypot(a0, a1, a2) < PLANE_EPS or math.hypot(b0, b1, b2) < PLANE_EPS:
        raise ValueError("angle_error needs non-zero vectors")
    # atan2 keeps precision near 0 and 90 degrees where arccos does not;
    # scalar arithmetic because this sits inside the search loop
    cross = math.hypot(a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0)
    return math.degrees(math.atan2(cross, abs(a0 * b0 + a1 * b1 + a2 * b2)))


def angle_errors(v, ref) -> np.ndarray:
    """Vectorised :func:`angle_error` of rows of ``v`` against ``ref``."""
    v = np.asarray(v, dtype=float)
    ref = np.asarray(ref, dtype=float)
    return np.degrees(
        np.arctan2(np.linalg.norm(np.cross(v, ref), axis=-1), np.abs(v @ ref))
    )
