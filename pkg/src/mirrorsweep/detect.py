"""Symmetry-plane detection and depth extraction for a single image."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .costvolume import (
    DepthMap,
    DepthSampling,
    FeatureGrid,
    aggregate_volume,
    build_cost_volume,
    depth_probability,
    extract_features,
    score_candidate,
    sgm_volume,
    soft_argmin_depth,
)
from .geometry import CameraIntrinsics, backproject, canonical_normal, correspondence, mirror_homography_offset
from .sampler import LatticeConfig, SearchResult, coarse_to_fine


@dataclass(frozen=True)
class DetectConfig:
    lattice: LatticeConfig = LatticeConfig()
    depth: DepthSampling = DepthSampling(1.0, 4.0, 64)
    window: int = 7
    stride: int = 4
    quantile: float = 0.7
    temperature: float = 0.03
    depth_aggregate: int = 1
    sgm_p1: float = 0.1
    sgm_p2: float = 4.0
    min_shift: float | None = None


@dataclass
class Detection:
    normal: np.ndarray
    confidence: float
    offset: float  # plane n . p + offset = 0 in the reference-point gauge
    reference: np.ndarray
    search: SearchResult | None = None
    warnings: list = field(default_factory=list)

    def trace(self) -> list:
        """``(round, best_normal, confidence)`` per round."""
        if self.search is None:
            return []
        return [(r.round, r.best.copy(), r.best_score) for r in self.search.trace]


def reference_point(k: CameraIntrinsics, mask, ds: DepthSampling) -> np.ndarray:
    """Point on the mask-centroid ray at mid depth range.

    Only the plane normal is observable from one image, so every candidate
    plane is anchored through this point; the depth sweep absorbs the scale.
    """
    if mask is not None and np.any(mask):
        ys, xs = np.nonzero(mask)
        c = np.array([xs.mean(), ys.mean()])
    else:
        c = np.array([k.cx, k.cy])
    return backproject(k, c, 0.5 * (ds.d_min + ds.d_max))


def _has_texture(feat: FeatureGrid) -> bool:
    return bool(np.any(feat.mask & ~feat.flat))


def make_scorer(feat: FeatureGrid, k: CameraIntrinsics, cfg: DetectConfig, ref: np.ndarray):
    def score(n):
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        cv = build_cost_volume(feat, k, n, cfg.depth, offset=-float(n @ ref), min_shift=cfg.min_shift)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return score_candidate(cv, cfg.quantile)

    return score


def detect_plane(image, mask, k: CameraIntrinsics, cfg: DetectConfig = DetectConfig(), map_fn=None) -> Detection:
    """Coarse-to-fine search for the normal with the best photo-consistency."""
    feat = extract_features(image, cfg.window, cfg.stride, mask)
    ref = reference_point(k, mask, cfg.depth)
    notes = []
    if not _has_texture(feat):
        msg = "no textured pixels: every candidate volume is empty, confidence is 0"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
        res = coarse_to_fine(lambda n: 0.0, cfg.lattice)
    else:
        res = coarse_to_fine(make_scorer(feat, k, cfg, ref), cfg.lattice, map_fn)
        if res.score <= 0.0:
            msg = "all candidate cost volumes are empty, confidence is 0"
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            notes.append(msg)
    n = canonical_normal(res.normal)
    return Detection(n, max(0.0, float(res.score)), -float(n @ ref), ref, res, notes)


def estimate_depth(image, mask, k: CameraIntrinsics, normal, offset: float, cfg: DetectConfig = DetectConfig(), feat=None):
    """Soft-argmin depth on the feature grid for the plane ``normal . p + offset = 0``.

    Returns ``(DepthMap, FeatureGrid)``.  Depths are in the units fixed by
    ``offset``, which is the plane's distance from the camera up to sign.
    """
    if feat is None:
        feat = extract_features(image, cfg.window, cfg.stride, mask)
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    cv = build_cost_volume(feat, k, n, cfg.depth, offset=float(offset), min_shift=cfg.min_shift)
    cv = aggregate_volume(cv, cfg.depth_aggregate)
    if cfg.sgm_p2 > 0:
        cv = sgm_volume(cv, cfg.sgm_p1, cfg.sgm_p2)
    dm = soft_argmin_depth(depth_probability(cv, cfg.temperature), cfg.depth)
    return dm, feat


def plane_from_w(w) -> tuple[np.ndarray, float]:
    """``(unit normal facing the camera, offset)`` for the plane ``w . p + 1 = 0``."""
    w = np.asarray(w, dtype=float)
    r = float(np.linalg.norm(w))
    n = w / r
    off = 1.0 / r
    if not np.allclose(canonical_normal(n), n):
        n, off = -n, -off
    return n, off


def upsample_depth(dm: DepthMap, feat: FeatureGrid, shape) -> DepthMap:
    """Nearest-node expansion of a grid depth map to full resolution."""
    h, w = shape
    ys = np.clip((np.arange(h) - feat.offset + feat.stride // 2) // feat.stride, 0, feat.shape[0] - 1)
    xs = np.clip((np.arange(w) - feat.offset + feat.stride // 2) // feat.stride, 0, feat.shape[1] - 1)
    return DepthMap(dm.d[np.ix_(ys, xs)], dm.mask[np.ix_(ys, xs)])


def visible_mirror_nodes(depth_gt, mask, k: CameraIntrinsics, w_gt, feat: FeatureGrid, rel_tol: float = 0.02):
    """Grid nodes on textured foreground whose mirror point is in view and unoccluded."""
    xy = feat.pixel_coords().reshape(-1, 2)
    ix, iy = xy[:, 0], xy[:, 1]
    h, w = depth_gt.shape
    inside = (ix < w) & (iy < h)
    out = np.zeros(len(xy), dtype=bool)
    cand = np.nonzero(inside)[0]
    cand = cand[mask[iy[cand], ix[cand]] & ~feat.flat.reshape(-1)[cand]]
    d = depth_gt[iy[cand], ix[cand]].astype(float)
    cand, d = cand[d > 0], d[d > 0]
    n, off = plane_from_w(w_gt)
    c = mirror_homography_offset(k, n, off)
    xy_m, d_m, ok = correspondence(xy[cand].astype(float), d, c)
    mx = np.round(np.nan_to_num(xy_m[:, 0], nan=-1)).astype(int)
    my = np.round(np.nan_to_num(xy_m[:, 1], nan=-1)).astype(int)
    ok &= (mx >= 0) & (mx < w) & (my >= 0) & (my < h)
    sel = np.nonzero(ok)[0]
    sel = sel[mask[my[sel], mx[sel]]]
    seen = depth_gt[my[sel], mx[sel]]
    good = np.abs(seen - d_m[sel]) <= rel_tol * d_m[sel]
    out[cand[sel[good]]] = True
    return out.reshape(feat.shape)


def depth_error(dm: DepthMap, depth_gt, nodes) -> float:
    """Mean absolute depth error over ``nodes`` that also carry an estimate."""
    xy_mask = nodes & dm.mask
    if not xy_mask.any():
        raise ValueError("no pixel to evaluate depth on")
    return float(np.mean(np.abs(dm.d[xy_mask] - depth_gt[xy_mask])))


def grid_depth(depth, feat: FeatureGrid) -> np.ndarray:
    """Full-resolution depth sampled at the grid nodes."""
    return np.asarray(depth)[feat.offset :: feat.stride, feat.offset :: feat.stride][: feat.shape[0], : feat.shape[1]]
