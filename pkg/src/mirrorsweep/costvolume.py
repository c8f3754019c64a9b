"""Plane-sweep photo-consistency volumes for a candidate mirror plane.

Features are colour patches, zero-mean per channel and unit-norm overall;
two features are compared with their dot product (ZNCC).  For every feature-grid pixel and
every hypothesised depth the mirror correspondence is looked up with
bilinear interpolation.  Reads that leave the frame, land behind the
camera, or stay on top of the source pixel are invalid and never enter an
aggregate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from numba import njit
from scipy.ndimage import uniform_filter

from .geometry import CameraIntrinsics, canonical_normal, mirror_homography_offset

FLAT_EPS = 1e-3


@dataclass(frozen=True)
class DepthSampling:
    d_min: float
    d_max: float
    d_count: int = 64

    def __post_init__(self):
        if not 0 < self.d_min < self.d_max:
            raise ValueError("need 0 < d_min < d_max")
        if self.d_count < 2:
            raise ValueError("need at least two depth samples")

    @property
    def depths(self) -> np.ndarray:
        i = np.arange(self.d_count)
        return self.d_min + i / (self.d_count - 1) * (self.d_max - self.d_min)

    @property
    def step(self) -> float:
        return (self.d_max - self.d_min) / (self.d_count - 1)


@dataclass(frozen=True)
class FeatureGrid:
    """Patch descriptors sampled every ``stride`` pixels.

    Grid node ``(i, j)`` sits at image pixel ``(offset + stride * j,
    offset + stride * i)``.  Flat patches have an all-zero descriptor, so
    they correlate to 0 with everything.  ``image`` keeps the full-resolution
    (H, W, C) intensities that mirror-side patches are resampled from.
    """

    values: np.ndarray  # (H', W', window**2 * C) float32
    flat: np.ndarray  # (H', W') bool
    mask: np.ndarray  # (H', W') bool, foreground nodes
    image: np.ndarray  # (H, W, C) float32
    stride: int
    offset: int
    window: int

    @property
    def shape(self):
        return self.values.shape[:2]

    @property
    def patch_offsets(self) -> np.ndarray:
        r = self.window // 2
        dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
        return np.stack([dx.ravel(), dy.ravel()], axis=1).astype(np.float64)

    def pixel_coords(self) -> np.ndarray:
        h, w = self.shape
        ys, xs = np.mgrid[0:h, 0:w]
        return np.stack([xs, ys], axis=-1) * self.stride + self.offset


def to_float(image: np.ndarray) -> np.ndarray:
    """(H, W, C) float64 in [0, 1]; grayscale input gets one channel, alpha is dropped."""
    img = np.asarray(image)
    out = img.astype(np.float64)
    if out.ndim == 2:
        out = out[..., None]
    elif out.ndim == 3:
        out = out[..., :3]
    else:
        raise ValueError("image must be (H, W) or (H, W, C)")
    if np.issubdtype(img.dtype, np.integer):
        out = out / 255.0
    return out


def extract_features(image, window: int = 7, stride: int = 4, mask=None) -> FeatureGrid:
    """Colour ``window x window`` patches on a strided grid.

    Each channel is made zero-mean, then the whole descriptor is scaled to
    unit norm.  Patches with (almost) no variation are flagged flat.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    img = to_float(image)
    h, w, nc = img.shape
    if h < window or w < window:
        raise ValueError(f"image {w}x{h} smaller than window {window}")
    r = window // 2
    offset = stride // 2
    padded = np.pad(img, ((r, r), (r, r), (0, 0)), mode="reflect")
    patches = np.lib.stride_tricks.sliding_window_view(padded, (window, window), axis=(0, 1))
    patches = patches[offset::stride, offset::stride]  # (H', W', C, win, win)
    patches = np.moveaxis(patches, 2, -1).reshape(patches.shape[0], patches.shape[1], -1, nc)
    patches = patches - patches.mean(axis=2, keepdims=True)
    patches = patches.reshape(patches.shape[0], patches.shape[1], -1)
    norm = np.linalg.norm(patches, axis=-1)
    flat = norm < FLAT_EPS * window * np.sqrt(nc)
    values = np.where(flat[..., None], 0.0, patches / np.where(flat, 1.0, norm)[..., None])
    if mask is None:
        node_mask = np.ones(flat.shape, dtype=bool)
    else:
        node_mask = np.asarray(mask, dtype=bool)[offset::stride, offset::stride]
    return FeatureGrid(
        values.astype(np.float32), flat, node_mask, img.astype(np.float32), stride, offset, window
    )


def zncc(a, b) -> np.ndarray:
    """ZNCC of raw patches along the last axis; 0 when either side is flat."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a - a.mean(axis=-1, keepdims=True)
    b = b - b.mean(axis=-1, keepdims=True)
    den = np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1)
    num = np.sum(a * b, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 1e-12, num / den, 0.0)


@dataclass
class CostVolume:
    scores: np.ndarray  # (H', W', D); NaN where invalid
    valid: np.ndarray  # (H', W', D) bool
    pixels: np.ndarray  # (H', W') bool, source nodes that were swept

    @property
    def shape(self):
        return self.scores.shape


def bilinear(img: np.ndarray, x, y) -> np.ndarray:
    """Bilinear lookup of ``img`` (H, W[, ch]) at in-frame coordinates ``x, y``."""
    h, w = img.shape[:2]
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any((x < 0) | (x > w - 1) | (y < 0) | (y > h - 1)):
        raise ValueError("bilinear lookup outside the frame")
    x0 = np.minimum(np.floor(x).astype(np.int64), w - 2)
    y0 = np.minimum(np.floor(y).astype(np.int64), h - 2)
    fx = x - x0
    fy = y - y0
    if img.ndim == 3:
        fx, fy = fx[..., None], fy[..., None]
    top = img[y0, x0] * (1 - fx) + img[y0, x0 + 1] * fx
    bot = img[y0 + 1, x0] * (1 - fx) + img[y0 + 1, x0 + 1] * fx
    return top * (1 - fy) + bot * fy


@njit(cache=True, nogil=True)
def _sweep(img, src_xy, src_desc, offsets, c, depths, min_shift):
    h, w, nc = img.shape
    n_src = src_desc.shape[0]
    n_pix = offsets.shape[0]
    n_d = depths.shape[0]
    out = np.full((n_src, n_d), np.nan, dtype=np.float32)
    tgt = np.empty((n_pix, nc), dtype=np.float64)
    mean = np.empty(nc, dtype=np.float64)
    for i in range(n_src):
        x = src_xy[i, 0]
        y = src_xy[i, 1]
        a0 = c[0, 0] * x + c[0, 1] * y + c[0, 2]
        a1 = c[1, 0] * x + c[1, 1] * y + c[1, 2]
        a2 = c[2, 0] * x + c[2, 1] * y + c[2, 2]
        a3 = c[3, 0] * x + c[3, 1] * y + c[3, 2]
        for j in range(n_d):
            inv_d = 1.0 / depths[j]
            q0 = a0 + c[0, 3] * inv_d
            q1 = a1 + c[1, 3] * inv_d
            q2 = a2 + c[2, 3] * inv_d
            q3 = a3 + c[3, 3] * inv_d
            if q2 <= 0.0 or q3 <= 0.0:
                continue
            xm = q0 / q2
            ym = q1 / q2
            ux = xm - x
            uy = ym - y
            dist = np.sqrt(ux * ux + uy * uy)
            if dist < min_shift:
                continue
            ux /= dist
            uy /= dist
            # mirror-side patch: flipped along the match direction, scaled by
            # the depth ratio of the two points
            scale = depths[j] * q3 / q2
            j00 = scale * (1.0 - 2.0 * ux * ux)
            j01 = scale * (-2.0 * ux * uy)
            j10 = j01
            j11 = scale * (1.0 - 2.0 * uy * uy)
            inside = True
            mean[:] = 0.0
            for p in range(n_pix):
                ox = offsets[p, 0]
                oy = offsets[p, 1]
                sx = xm + j00 * ox + j01 * oy
                sy = ym + j10 * ox + j11 * oy
                if sx < 0.0 or sy < 0.0 or sx > w - 1 or sy > h - 1:
                    inside = False
                    break
                ix = min(int(sx), w - 2)
                iy = min(int(sy), h - 2)
                fx = sx - ix
                fy = sy - iy
                for ch in range(nc):
                    v = (
                        (img[iy, ix, ch] * (1.0 - fx) + img[iy, ix + 1, ch] * fx) * (1.0 - fy)
                        + (img[iy + 1, ix, ch] * (1.0 - fx) + img[iy + 1, ix + 1, ch] * fx) * fy
                    )
                    tgt[p, ch] = v
                    mean[ch] += v
            if not inside:
                continue
            for ch in range(nc):
                mean[ch] /= n_pix
            ss = 0.0
            dot = 0.0
            for p in range(n_pix):
                for ch in range(nc):
                    t = tgt[p, ch] - mean[ch]
                    ss += t * t
                    dot += t * src_desc[i, p * nc + ch]
            norm = np.sqrt(ss)
            if norm < 1e-6:
                out[i, j] = 0.0
            else:
                out[i, j] = dot / norm
    return out


def build_cost_volume(
    feat: FeatureGrid,
    k: CameraIntrinsics,
    w_hat,
    ds: DepthSampling,
    offset: float | None = None,
    min_shift: float | None = None,
) -> CostVolume:
    """ZNCC between every grid pixel and its mirror correspondence at every depth.

    The candidate plane is ``n . p + offset = 0`` with ``n = w_hat / |w_hat|``;
    by default the offset is ``1 / |w_hat|``, i.e. the plane ``w_hat``
    itself, with the sign of ``w_hat`` fixed to face the camera so that
    ``w_hat`` and ``-w_hat`` build the same volume.

    The mirror-side patch is resampled flipped along the match direction
    (lines through the mirror epipole map onto themselves with reversed
    orientation) and scaled by the source/mirror depth ratio.  Entries
    whose patch leaves the frame, whose mirror point lies behind the
    camera, or whose match sits within ``min_shift`` pixels of the source
    (default: the window size; a self-match carries no evidence) are invalid.
    """
    w_hat = np.asarray(w_hat, dtype=float)
    if offset is None:
        n = canonical_normal(w_hat)
        offset = 1.0 / np.linalg.norm(w_hat)
    else:
        n = w_hat / np.linalg.norm(w_hat)
    c = mirror_homography_offset(k, n, offset)
    if min_shift is None:
        min_shift = float(feat.window)
    src = feat.mask & ~feat.flat
    ij = np.nonzero(src)
    xy = feat.pixel_coords()[ij].astype(np.float64)
    desc = feat.values[ij].astype(np.float64)
    scores_flat = _sweep(
        feat.image, xy, desc, feat.patch_offsets, c, ds.depths, float(min_shift)
    )
    hg, wg = feat.shape
    scores = np.full((hg, wg, ds.d_count), np.nan, dtype=np.float32)
    scores[ij] = scores_flat
    valid = ~np.isnan(scores)
    return CostVolume(scores, valid, src)


def best_over_depth(cv: CostVolume) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel maximum over valid depths and the mask of pixels having any."""
    has = cv.valid.any(axis=-1)
    best = np.where(cv.valid, cv.scores, -np.inf).max(axis=-1)
    return np.where(has, best, np.nan), has


def score_candidate(cv: CostVolume, quantile: float = 0.7) -> float:
    """Confidence in [0, 1]: mean of the top ``quantile`` share of per-pixel best ZNCC.

    An all-invalid volume scores 0 and emits a ``RuntimeWarning``.
    """
    if not 0 < quantile <= 1:
        raise ValueError("quantile must lie in (0, 1]")
    best, has = best_over_depth(cv)
    vals = np.sort(best[has].astype(np.float64))[::-1]
    if vals.size == 0:
        warnings.warn("cost volume has no valid entries", RuntimeWarning, stacklevel=2)
        return 0.0
    top = vals[: max(1, int(np.ceil(quantile * vals.size)))]
    return float(np.clip((top.mean() + 1.0) / 2.0, 0.0, 1.0))


def aggregate_volume(cv: CostVolume, size: int) -> CostVolume:
    """Average each depth slice over a ``size x size`` grid window.

    Only valid neighbours enter the mean and validity is unchanged.  This
    pools evidence along edges where single patches slide freely.
    """
    if size < 1 or size % 2 == 0:
        raise ValueError("aggregation size must be odd and >= 1")
    if size == 1:
        return cv
    v = cv.valid.astype(np.float64)
    x = np.where(cv.valid, cv.scores, 0.0).astype(np.float64)
    num = uniform_filter(x, (size, size, 1), mode="constant")
    den = uniform_filter(v, (size, size, 1), mode="constant")
    agg = np.where(cv.valid, num / np.maximum(den, 1e-12), np.nan)
    return CostVolume(agg.astype(np.float32), cv.valid.copy(), cv.pixels)


SGM_DIRECTIONS = np.array(
    [[0, 1], [1, 0], [0, -1], [-1, 0], [1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=np.int64
)


@njit(cache=True, nogil=True)
def _sgm(cost, active, p1, p2, dirs):
    h, w, nd = cost.shape
    total = np.zeros((h, w, nd))
    lr = np.empty((h, w, nd))
    for r in range(dirs.shape[0]):
        dy, dx = dirs[r, 0], dirs[r, 1]
        # the predecessor along the path is always visited first in this order
        for yi in range(h):
            y = yi if dy >= 0 else h - 1 - yi
            for xi in range(w):
                x = xi if dx >= 0 else w - 1 - xi
                if not active[y, x]:
                    continue
                py, px = y - dy, x - dx
                if py < 0 or py >= h or px < 0 or px >= w or not active[py, px]:
                    for d in range(nd):
                        lr[y, x, d] = cost[y, x, d]
                else:
                    m = lr[py, px, 0]
                    for d in range(1, nd):
                        m = min(m, lr[py, px, d])
                    for d in range(nd):
                        best = min(lr[py, px, d], m + p2)
                        if d > 0:
                            best = min(best, lr[py, px, d - 1] + p1)
                        if d < nd - 1:
                            best = min(best, lr[py, px, d + 1] + p1)
                        lr[y, x, d] = cost[y, x, d] + best - m
                for d in range(nd):
                    total[y, x, d] += lr[y, x, d]
    return total / dirs.shape[0]


def sgm_volume(cv: CostVolume, p1: float = 0.1, p2: float = 4.0) -> CostVolume:
    """Semi-global smoothing of the depth scores along eight grid directions.

    The matching cost is ``1 - ZNCC``; a path pays ``p1`` for a one-sample
    depth change between neighbouring nodes and ``p2`` for a larger jump.
    Invalid entries enter as the neutral cost 1 without being read, and
    nodes with no valid entry cut every path.  Returns ``1 - mean path
    cost`` with validity unchanged.
    """
    if not 0 <= p1 <= p2:
        raise ValueError("need 0 <= p1 <= p2")
    cost = np.where(cv.valid, 1.0 - cv.scores.astype(np.float64), 1.0)
    agg = _sgm(cost, cv.valid.any(axis=-1), float(p1), float(p2), SGM_DIRECTIONS)
    scores = np.where(cv.valid, 1.0 - agg, np.nan).astype(np.float32)
    return CostVolume(scores, cv.valid.copy(), cv.pixels)


@dataclass
class DepthProbability:
    p: np.ndarray  # (H', W', D)
    mask: np.ndarray  # (H', W')


def depth_probability(cv: CostVolume, temperature: float = 0.05) -> DepthProbability:
    """Softmax over valid depths of ``score / temperature``; invalid entries get 0."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    has = cv.valid.any(axis=-1)
    logits = np.where(cv.valid, cv.scores.astype(np.float64) / temperature, -np.inf)
    m = np.where(has, logits.max(axis=-1), 0.0)
    e = np.where(cv.valid, np.exp(logits - m[..., None]), 0.0)
    z = e.sum(axis=-1, keepdims=True)
    p = np.where(has[..., None], e / np.where(z > 0, z, 1.0), 0.0)
    return DepthProbability(p, has)


@dataclass
class DepthMap:
    d: np.ndarray
    mask: np.ndarray


def soft_argmin_depth(p: DepthProbability, ds: DepthSampling) -> DepthMap:
    """Expected depth under the per-pixel distribution."""
    d = np.einsum("ijk,k->ij", p.p, ds.depths)
    return DepthMap(np.where(p.mask, d, 0.0), p.mask.copy())


def depth_l1(d_hat: DepthMap, d_gt: DepthMap) -> float:
    if d_hat.d.shape != d_gt.d.shape:
        raise ValueError(f"shape mismatch {d_hat.d.shape} vs {d_gt.d.shape}")
    both = d_hat.mask & d_gt.mask
    if not both.any():
        raise ValueError("depth maps share no valid pixel")
    return float(np.mean(np.abs(d_hat.d[both] - d_gt.d[both])))
