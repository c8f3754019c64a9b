"""Angle-error statistics and the CSV / JSON / SVG evaluation report."""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import angle_error
from .io import atomic_write_text

THRESHOLDS = (0.5, 1.0, 2.0, 4.0)
CSV_COLUMNS = (
    "scene_id",
    "gt_nx",
    "gt_ny",
    "gt_nz",
    "pred_nx",
    "pred_ny",
    "pred_nz",
    "angle_err_deg",
    "depth_l1",
    "wall_time_ms",
)
RECORD_TOL = 1e-9


@dataclass
class DetectionRecord:
    scene_id: str
    normal_gt: np.ndarray
    normal_pred: np.ndarray
    angle_err_deg: float
    per_round_trace: list = field(default_factory=list)  # (round, best_normal, confidence)
    depth_l1: float | None = None
    wall_time_ms: float = 0.0

    def __post_init__(self):
        self.normal_gt = np.asarray(self.normal_gt, dtype=float).reshape(3)
        self.normal_pred = np.asarray(self.normal_pred, dtype=float).reshape(3)
        self.angle_err_deg = float(self.angle_err_deg)

    @classmethod
    def from_normals(cls, scene_id, normal_gt, normal_pred, **kw) -> "DetectionRecord":
        return cls(scene_id, normal_gt, normal_pred, angle_error(normal_pred, normal_gt), **kw)

    def check(self) -> None:
        """Raise if the stored error disagrees with the normals."""
        e = angle_error(self.normal_pred, self.normal_gt)
        if abs(e - self.angle_err_deg) > RECORD_TOL:
            raise ValueError(
                f"{self.scene_id}: stored angle error {self.angle_err_deg} != recomputed {e}"
            )


@dataclass(frozen=True)
class MetricsSummary:
    median_deg: float
    mean_deg: float
    acc_at: dict
    n: int

    def to_dict(self) -> dict:
        out = {"median_deg": self.median_deg, "mean_deg": self.mean_deg}
        for t in THRESHOLDS:
            out[_acc_key(t)] = self.acc_at[t]
        out["n"] = self.n
        return out


def _acc_key(t: float) -> str:
    return "acc_" + f"{t:.1f}".replace(".", "_")


def _errors(records) -> np.ndarray:
    if len(records) == 0:
        raise ValueError("no records to summarize")
    for r in records:
        r.check()
    return np.array([r.angle_err_deg for r in records], dtype=float)


def lower_median(values) -> float:
    v = np.sort(np.asarray(values, dtype=float))
    return float(v[(len(v) - 1) // 2])


def summarize(records) -> MetricsSummary:
    """Median (lower for even counts), mean, and fraction of errors strictly below each threshold."""
    e = _errors(records)
    acc = {t: float(np.count_nonzero(e < t)) / len(e) for t in THRESHOLDS}
    # fsum is exactly rounded, so the mean does not depend on record order
    return MetricsSummary(lower_median(e), math.fsum(e) / len(e), acc, len(e))


def cumulative_curve(records, max_deg: float, steps: int):
    """``steps`` evenly spaced thresholds in [0, max_deg] with the fraction of errors below each."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not max_deg > 0:
        raise ValueError("max_deg must be positive")
    e = np.sort(_errors(records))
    ts = np.linspace(0.0, max_deg, steps)
    frac = np.searchsorted(e, ts, side="left") / len(e)
    return [(float(t), float(f)) for t, f in zip(ts, frac)]


# ---------------------------------------------------------------- report


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def records_to_csv(records) -> str:
    buf = _io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    for r in records:
        wr.writerow(
            [r.scene_id, *map(_fmt, r.normal_gt), *map(_fmt, r.normal_pred),
             _fmt(r.angle_err_deg), _fmt(r.depth_l1), _fmt(r.wall_time_ms)]
        )
    return buf.getvalue()


def records_from_csv(text: str) -> list[DetectionRecord]:
    rd = csv.DictReader(_io.StringIO(text))
    if tuple(rd.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {rd.fieldnames}")
    out = []
    for row in rd:
        out.append(
            DetectionRecord(
                row["scene_id"],
                [float(row[c]) for c in ("gt_nx", "gt_ny", "gt_nz")],
                [float(row[c]) for c in ("pred_nx", "pred_ny", "pred_nz")],
                float(row["angle_err_deg"]),
                depth_l1=float(row["depth_l1"]) if row["depth_l1"] else None,
                wall_time_ms=float(row["wall_time_ms"]) if row["wall_time_ms"] else 0.0,
            )
        )
    return out


def curve_svg(curve, width: int = 480, height: int = 320, marks=THRESHOLDS) -> str:
    """Cumulative step curve as a standalone SVG document."""
    pad = 40
    t_max = curve[-1][0]
    sx = lambda t: pad + (width - 2 * pad) * t / t_max  # noqa: E731
    sy = lambda f: height - pad - (height - 2 * pad) * f  # noqa: E731
    pts = []
    prev = None
    for t, f in curve:
        if prev is not None:
            pts.append(f"{sx(t):.2f},{sy(prev):.2f}")
        pts.append(f"{sx(t):.2f},{sy(f):.2f}")
        prev = f
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{" ".join(pts)}"/>',
    ]
    for t in marks:
        if t <= t_max:
            lines.append(
                f'<line x1="{sx(t):.2f}" y1="{pad}" x2="{sx(t):.2f}" y2="{height - pad}" '
                'stroke="#bbbbbb" stroke-dasharray="3,3"/>'
            )
            lines.append(
                f'<text x="{sx(t):.2f}" y="{height - pad + 14}" font-size="10" '
                f'text-anchor="middle">{t:g}</text>'
            )
    for f in (0.0, 0.5, 1.0):
        lines.append(
            f'<text x="{pad - 6}" y="{sy(f) + 3:.2f}" font-size="10" text-anchor="end">{f:g}</text>'
        )
    lines.append(
        f'<text x="{width / 2}" y="{height - 6}" font-size="11" text-anchor="middle">'
        "angle error (deg)</text>"
    )
    lines.append(
        f'<text x="12" y="{height / 2}" font-size="11" text-anchor="middle" '
        f'transform="rotate(-90 12 {height / 2})">fraction below</text>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def summary_json(summary: MetricsSummary) -> str:
    return json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"


def emit_report(records, out_dir, max_deg: float = 10.0, steps: int = 201) -> dict:
    """Write ``records.csv``, ``summary.json`` and ``curve.svg`` into ``out_dir``.

    Every file is replaced atomically.  Returns the written paths by kind.
    """
    out = Path(out_dir)
    if not out.is_dir():
        raise OSError(f"output directory does not exist: {out}")
    summary = summarize(records)
    paths = {
        "csv": out / "records.csv",
        "summary": out / "summary.json",
        "svg": out / "curve.svg",
    }
    atomic_write_text(paths["csv"], records_to_csv(records))
    atomic_write_text(paths["summary"], summary_json(summary))
    atomic_write_text(paths["svg"], curve_svg(cumulative_curve(records, max_deg, steps)))
    return paths
