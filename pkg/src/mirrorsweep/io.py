"""File formats: DPTH depth rasters, 8-bit masks, PNG images and JSON sidecars."""
from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import CameraIntrinsics, RigidPose

DPTH_MAGIC = b"DPTH"
_HEADER = struct.Struct("<4sIII")


def atomic_write_bytes(path, data: bytes) -> None:
    """Write to a temp file in the same directory then rename over ``path``."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except OSError as e:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise OSError(f"cannot write {path}: {e}") from e


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def encode_depth(depth: np.ndarray) -> bytes:
    depth = np.asarray(depth)
    if depth.ndim != 2:
        raise ValueError("depth raster must be 2-D")
    h, w = depth.shape
    body = np.ascontiguousarray(depth, dtype="<f4").tobytes()
    return _HEADER.pack(DPTH_MAGIC, w, h, 0) + body


def decode_depth(data: bytes) -> np.ndarray:
    if len(data) < _HEADER.size:
        raise ValueError("truncated DPTH header")
    magic, w, h, _ = _HEADER.unpack_from(data)
    if magic != DPTH_MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {DPTH_MAGIC!r}")
    n = w * h * 4
    if len(data) - _HEADER.size != n:
        raise ValueError(f"DPTH body has {len(data) - _HEADER.size} bytes, expected {n}")
    return np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(h, w).astype(np.float32)


def write_depth(path, depth) -> None:
    atomic_write_bytes(path, encode_depth(depth))


def read_depth(path) -> np.ndarray:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise OSError(f"cannot read {path}: {e}") from e
    try:
        return decode_depth(data)
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from e


def _png_bytes(img: Image.Image) -> bytes:
    import io as _io

    buf = _io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def write_mask(path, mask) -> None:
    """8-bit grayscale PNG, 255 inside."""
    m = (np.asarray(mask, dtype=bool) * 255).astype(np.uint8)
    atomic_write_bytes(path, _png_bytes(Image.fromarray(m, mode="L")))


def read_mask(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("L")) >= 128


def write_image(path, image, mask=None) -> None:
    """RGB PNG; with a mask the alpha channel carries it."""
    rgb = np.asarray(image)
    if rgb.dtype != np.uint8:
        rgb = np.clip(np.round(rgb * 255.0), 0, 255).astype(np.uint8)
    if mask is not None:
        a = (np.asarray(mask, dtype=bool) * 255).astype(np.uint8)
        img = Image.fromarray(np.dstack([rgb, a]), mode="RGBA")
    else:
        img = Image.fromarray(rgb, mode="RGB")
    atomic_write_bytes(path, _png_bytes(img))


def read_image(path):
    """Return ``(rgb uint8 (H, W, 3), mask or None)``; alpha becomes the mask."""
    try:
        with Image.open(path) as im:
            im.load()
            mask = None
            if im.mode in ("RGBA", "LA") or "transparency" in im.info:
                rgba = np.asarray(im.convert("RGBA"))
                mask = rgba[..., 3] >= 128
            rgb = np.asarray(im.convert("RGB")).copy()
    except OSError as e:
        raise OSError(f"cannot read image {path}: {e}") from e
    return rgb, mask


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise OSError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: invalid JSON: {e}") from e


def read_intrinsics(path) -> CameraIntrinsics:
    data = read_json(path)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: intrinsics must be a JSON object")
    try:
        return CameraIntrinsics.from_dict(data)
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from e


def write_intrinsics(path, k: CameraIntrinsics) -> None:
    write_json(path, k.to_dict())


# scene triples: <id>.png (RGBA), <id>.depth (DPTH), <id>.json (sidecar)

def scene_sidecar(scene) -> dict:
    spec = scene.spec
    w = np.asarray(scene.w_gt, dtype=float)
    return {
        "scene_id": scene.scene_id,
        "seed": int(spec.seed),
        "object_kind": spec.object_kind,
        "texture": spec.texture,
        "intrinsics": spec.intrinsics.to_dict(),
        "pose": {"r": np.asarray(spec.pose.r).tolist(), "t": np.asarray(spec.pose.t).tolist()},
        "w_gt": w.tolist(),
        "normal_gt": np.asarray(scene.normal_gt, dtype=float).tolist(),
        "plane_offset": float(1.0 / np.linalg.norm(w)),
        "d_min": float(spec.d_min),
        "d_max": float(spec.d_max),
        "checks": {k: float(v) for k, v in scene.checks.items()},
    }


def write_scene(out_dir, scene) -> dict:
    out = Path(out_dir)
    sid = scene.scene_id
    write_image(out / f"{sid}.png", scene.image, scene.mask)
    write_depth(out / f"{sid}.depth", np.where(scene.mask, scene.depth, 0.0))
    meta = scene_sidecar(scene)
    write_json(out / f"{sid}.json", meta)
    return meta


def read_scene_meta(path) -> dict:
    meta = read_json(path)
    for key in ("scene_id", "intrinsics", "normal_gt", "w_gt"):
        if key not in meta:
            raise ValueError(f"{path}: missing field {key!r}")
    meta["intrinsics"] = CameraIntrinsics.from_dict(meta["intrinsics"])
    if "pose" in meta:
        meta["pose"] = RigidPose(np.array(meta["pose"]["r"]), np.array(meta["pose"]["t"]))
    meta["normal_gt"] = np.asarray(meta["normal_gt"], dtype=float)
    meta["w_gt"] = np.asarray(meta["w_gt"], dtype=float)
    return meta


def list_scenes(suite_dir) -> list[Path]:
    """Sidecar JSON paths of a suite directory, sorted by name."""
    d = Path(suite_dir)
    if not d.is_dir():
        raise FileNotFoundError(f"suite directory not found: {d}")
    out = sorted(p for p in d.glob("*.json") if (p.with_suffix(".png")).exists())
    return out
