"""Command-line entry point: ``mirrorsweep {detect,depth,synth,eval}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from . import io as mio
from .config import ConfigError, RunConfig, resolve
from .detect import (
    Detection,
    depth_error,
    detect_plane,
    estimate_depth,
    grid_depth,
    plane_from_w,
    reference_point,
    upsample_depth,
    visible_mirror_nodes,
)
from .geometry import CameraIntrinsics, canonical_normal, project
from .metrics import DetectionRecord, emit_report

log = logging.getLogger("mirrorsweep")

EXIT_OK, EXIT_PARTIAL, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------- helpers


def _load_inputs(image_path, intrinsics_path):
    try:
        rgb, mask = mio.read_image(image_path)
        k = mio.read_intrinsics(intrinsics_path)
    except (OSError, ValueError) as e:
        raise InputError(str(e)) from e
    h, w = rgb.shape[:2]
    if (k.width, k.height) != (w, h):
        raise InputError(f"image is {w}x{h} but intrinsics say {k.width}x{k.height}")
    return rgb, mask, k


def _executor(cfg: RunConfig):
    n = cfg.worker_count()
    return ThreadPoolExecutor(n) if n > 1 else None


def _vec(v) -> list:
    return [float(x) for x in np.asarray(v, dtype=float)]


def detection_json(det: Detection) -> dict:
    return {
        "normal": _vec(det.normal),
        "confidence": float(det.confidence),
        "trace": [
            {"round": int(r), "normal": _vec(n), "confidence": float(c)} for r, n, c in det.trace()
        ],
        "warnings": list(det.warnings),
    }


def plane_line(k: CameraIntrinsics, normal, ref) -> tuple | None:
    """Image segment of the plane's cut through the fronto-parallel plane at ``ref``."""
    n = np.asarray(normal, dtype=float)
    z = float(ref[2])
    d = np.cross(n, [0.0, 0.0, 1.0])
    if np.linalg.norm(d) < 1e-9:
        return None
    d /= np.linalg.norm(d)
    span = 4.0 * z
    pts = np.array([ref - span * d, ref + span * d])
    xy = project(k, pts)[:, :2]
    return tuple(map(float, xy[0])), tuple(map(float, xy[1]))


def write_overlay(path, rgb, k, det: Detection) -> None:
    img = Image.fromarray(np.asarray(rgb, dtype=np.uint8)).convert("RGB")
    seg = plane_line(k, det.normal, det.reference)
    if seg is not None:
        ImageDraw.Draw(img).line([seg[0], seg[1]], fill=(255, 40, 40), width=2)
    import io as _io

    buf = _io.BytesIO()
    img.save(buf, format="PNG")
    mio.atomic_write_bytes(path, buf.getvalue())


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"cannot create output directory {out}: {e}") from e
    return out


# ---------------------------------------------------------------- commands


def cmd_detect(image_path, intrinsics_path, cfg: RunConfig, out_dir=".") -> dict:
    rgb, mask, k = _load_inputs(image_path, intrinsics_path)
    out = _out_dir(out_dir)
    ex = _executor(cfg)
    try:
        det = detect_plane(rgb, mask, k, cfg.detect_config(), ex.map if ex else None)
    finally:
        if ex:
            ex.shutdown()
    stem = Path(image_path).stem
    result = detection_json(det)
    mio.write_json(out / f"{stem}.detect.json", result)
    if cfg.overlay:
        write_overlay(out / f"{stem}.overlay.png", rgb, k, det)
    return result


def parse_plane(text: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as e:
        raise InputError(f"--plane expects nx,ny,nz[,offset], got {text!r}") from e
    if len(vals) not in (3, 4) or not np.all(np.isfinite(vals)) or np.linalg.norm(vals[:3]) == 0:
        raise InputError(f"--plane expects a non-zero nx,ny,nz[,offset], got {text!r}")
    return np.array(vals[:3]), (vals[3] if len(vals) == 4 else None)


def cmd_depth(image_path, intrinsics_path, cfg: RunConfig, out_dir=".", plane=None) -> dict:
    rgb, mask, k = _load_inputs(image_path, intrinsics_path)
    out = _out_dir(out_dir)
    dc = cfg.detect_config()
    if plane is None:
        ex = _executor(cfg)
        try:
            det = detect_plane(rgb, mask, k, dc, ex.map if ex else None)
        finally:
            if ex:
                ex.shutdown()
        normal, offset = det.normal, det.offset
    else:
        normal, offset = plane
        normal = normal / np.linalg.norm(normal)
        if offset is None:
            normal = canonical_normal(normal)
            offset = -float(normal @ reference_point(k, mask, dc.depth))
    dm, feat = estimate_depth(rgb, mask, k, normal, offset, dc)
    full = upsample_depth(dm, feat, rgb.shape[:2])
    keep = full.mask if mask is None else full.mask & mask
    stem = Path(image_path).stem
    mio.write_depth(out / f"{stem}.depth", np.where(keep, full.d, 0.0))
    mio.write_mask(out / f"{stem}.mask.png", keep)
    return {"normal": _vec(normal), "offset": float(offset), "width": int(rgb.shape[1]), "height": int(rgb.shape[0])}


def cmd_synth(count: int, seed: int, out_dir) -> list:
    from .scenegen import sample_suite

    out = _out_dir(out_dir)
    metas = [mio.write_scene(out, sc) for sc in sample_suite(count, seed)]
    mio.write_json(out / "suite.json", {"count": count, "seed": seed,
                                        "scenes": [m["scene_id"] for m in metas]})
    return metas


def evaluate_scene(meta_path: Path, cfg: RunConfig, map_fn=None) -> tuple[DetectionRecord, dict]:
    meta = mio.read_scene_meta(meta_path)
    rgb, mask = mio.read_image(meta_path.with_suffix(".png"))
    depth = mio.read_depth(meta_path.with_suffix(".depth"))
    k = meta["intrinsics"]
    dc = cfg.detect_config()
    t0 = time.perf_counter()
    det = detect_plane(rgb, mask, k, dc, map_fn)
    wall = (time.perf_counter() - t0) * 1000.0
    n_gt, off_gt = plane_from_w(meta["w_gt"])
    dm_gt, feat = estimate_depth(rgb, mask, k, n_gt, off_gt, dc)
    # predicted normal at the true plane distance: the scale is unobservable
    side = 1.0 if float(det.normal @ n_gt) >= 0 else -1.0
    dm_pred, _ = estimate_depth(rgb, mask, k, det.normal, side * off_gt, dc, feat=feat)
    nodes = visible_mirror_nodes(depth, mask, k, meta["w_gt"], feat)
    gd = grid_depth(depth, feat)
    l1_gt, l1_pred = (_safe_depth_error(dm, gd, nodes) for dm in (dm_gt, dm_pred))
    rec = DetectionRecord.from_normals(
        meta["scene_id"], n_gt, det.normal, per_round_trace=det.trace(), depth_l1=l1_pred, wall_time_ms=wall
    )
    detail = {
        "scene_id": meta["scene_id"],
        "confidence": float(det.confidence),
        "angle_err_deg": rec.angle_err_deg,
        "depth_l1_pred_plane": None if np.isnan(l1_pred) else l1_pred,
        "depth_l1_gt_plane": None if np.isnan(l1_gt) else l1_gt,
        "depth_nodes": int(nodes.sum()),
        "trace": detection_json(det)["trace"],
        "warnings": list(det.warnings),
    }
    return rec, detail


def _safe_depth_error(dm, gd, nodes) -> float:
    # NaN when the plane leaves no estimate on any evaluated node
    try:
        return depth_error(dm, gd, nodes)
    except ValueError:
        return float("nan")


def cmd_eval(suite_dir, cfg: RunConfig, out_dir) -> int:
    try:
        scenes = mio.list_scenes(suite_dir)
    except FileNotFoundError as e:
        raise InputError(str(e)) from e
    if not scenes:
        raise InputError(f"no scenes found in {suite_dir} (expected <id>.json + <id>.png pairs)")
    if cfg.limit is not None:
        scenes = scenes[: cfg.limit]
    out = _out_dir(out_dir)
    n_workers = cfg.worker_count()

    def run(path):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                return evaluate_scene(path, cfg)
        except Exception as e:  # recorded per scene, run continues
            return e

    if n_workers > 1 and len(scenes) > 1:
        with ThreadPoolExecutor(n_workers) as ex:
            results = list(ex.map(run, scenes))
    else:
        results = [run(p) for p in scenes]

    records, details, failures = [], [], []
    for path, res in zip(scenes, results):
        if isinstance(res, Exception):
            log.error("scene %s failed: %s", path.stem, res)
            failures.append({"scene_id": path.stem, "error": f"{type(res).__name__}: {res}"})
        else:
            records.append(res[0])
            details.append(res[1])
    if records:
        emit_report(records, out)
        if cfg.figures:
            from .plotting import render_figures

            render_figures(records, out)
    mio.write_json(out / "details.json", {"scenes": details, "failures": failures,
                                          "config": {k: v for k, v in cfg.to_dict().items() if k != "threads"}})
    if not records:
        log.error("every scene failed")
    return EXIT_PARTIAL if failures else EXIT_OK


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    common.add_argument("--out", default=".", help="output directory")

    p = argparse.ArgumentParser(prog="mirrorsweep", description="Reflection-symmetry plane detection by plane-sweep photo-consistency.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", parents=[common], help="detect the symmetry plane of one image")
    d.add_argument("image")
    d.add_argument("intrinsics")
    d.add_argument("--no-overlay", dest="overlay", action="store_const", const=False)

    z = sub.add_parser("depth", parents=[common], help="soft-argmin depth for one image")
    z.add_argument("image")
    z.add_argument("intrinsics")
    z.add_argument("--plane", help="nx,ny,nz[,offset] to skip detection")

    s = sub.add_parser("synth", parents=[common], help="render a synthetic suite")
    s.add_argument("--count", type=int)
    s.add_argument("--seed", type=int)

    e = sub.add_parser("eval", parents=[common], help="evaluate detection on a suite directory")
    e.add_argument("suite")
    e.add_argument("--limit", type=int)
    e.add_argument("--figures", action="store_const", const=True, help="also render PNG figures")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    flags = {"threads": args.threads}
    for key in ("overlay", "count", "seed", "limit", "figures"):
        if hasattr(args, key):
            flags[key] = getattr(args, key)
    try:
        cfg = resolve(args.config, flags)
        if args.command == "detect":
            res = cmd_detect(args.image, args.intrinsics, cfg, args.out)
            print(json.dumps({"normal": res["normal"], "confidence": res["confidence"]}))
            return EXIT_OK
        if args.command == "depth":
            plane = parse_plane(args.plane) if args.plane else None
            cmd_depth(args.image, args.intrinsics, cfg, args.out, plane)
            return EXIT_OK
        if args.command == "synth":
            metas = cmd_synth(cfg.count, cfg.seed, args.out)
            print(f"wrote {len(metas)} scenes to {args.out}")
            return EXIT_OK
        code = cmd_eval(args.suite, cfg, args.out)
        return code
    except (ConfigError, InputError) as e:
        log.error("%s", e)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
