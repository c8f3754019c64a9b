"""Optional matplotlib figures for an evaluation report."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .metrics import THRESHOLDS, cumulative_curve


def render_figures(records, out_dir, max_deg: float = 10.0, steps: int = 201) -> list[Path]:
    """Cumulative accuracy curve and error histogram as PNG files in ``out_dir``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    curve = np.array(cumulative_curve(records, max_deg, steps))
    errs = np.array([r.angle_err_deg for r in records])
    written = []

    fig, ax = plt.subplots(figsize=(5, 3.5), dpi=100)
    ax.step(curve[:, 0], curve[:, 1], where="post")
    for t in THRESHOLDS:
        ax.axvline(t, color="0.75", ls="--", lw=0.8)
    ax.set_xlim(0, max_deg)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("angle error (deg)")
    ax.set_ylabel("fraction below")
    fig.tight_layout()
    p = out / "curve.png"
    fig.savefig(p, metadata={"Software": None})
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(5, 3.5), dpi=100)
    clipped = np.clip(errs, 0, max_deg)
    ax.hist(clipped, bins=40, range=(0, max_deg))
    ax.set_xlabel(f"angle error (deg, clipped at {max_deg:g})")
    ax.set_ylabel("scenes")
    fig.tight_layout()
    p = out / "errors.png"
    fig.savefig(p, metadata={"Software": None})
    plt.close(fig)
    written.append(p)
    return written
