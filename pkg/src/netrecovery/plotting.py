"""Static SVG figure of grid medians: one row per m, one column per metric."""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simharness import MedianRow, TrialRecord, _medians  # noqa: E402

__all__ = ["emit_plot", "METRIC_COLUMNS"]

METRIC_COLUMNS = ("frobenius", "accuracy", "recovery")
_TITLES = {"frobenius": "Frobenius", "accuracy": "Accuracy", "recovery": "Recovery"}


def emit_plot(rows: Sequence[TrialRecord | MedianRow], path: str | os.PathLike) -> str:
    """Write the figure to ``path`` as SVG and return the path.

    ``rows`` may be per-trial records (medians are taken here) or median
    rows.  Each curve is tagged with the SVG id ``<metric>-m<m>-n<n>``.
    """
    if not rows:
        raise ValueError("cannot plot an empty table")
    if isinstance(rows[0], TrialRecord):
        rows = _medians(rows)
    ms = sorted({r.m for r in rows})
    ns = sorted({r.n for r in rows})
    colors = plt.get_cmap("viridis")(
        [0.15 + 0.7 * k / max(1, len(ns) - 1) for k in range(len(ns))]
    )

    with plt.rc_context({"svg.hashsalt": "netrecovery", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(len(ms), 3, figsize=(9, 2.6 * len(ms)), squeeze=False, sharex=True)
        for r_idx, m in enumerate(ms):
            for c_idx, metric in enumerate(METRIC_COLUMNS):
                ax = axes[r_idx][c_idx]
                for color, n in zip(colors, ns):
                    pts = sorted((r.sqrt_beta_log_n, getattr(r, metric)) for r in rows if r.m == m and r.n == n)
                    if not pts:
                        continue
                    xs, ys = zip(*pts)
                    (line,) = ax.plot(xs, ys, marker="o", ms=3, color=color, label=f"n={n}")
                    line.set_gid(f"{metric}-m{m}-n{n}")
                ax.set_ylim(-0.05, 1.05)
                if r_idx == 0:
                    ax.set_title(_TITLES[metric])
                if c_idx == 0:
                    ax.set_ylabel(f"m = {m}")
                if r_idx == len(ms) - 1:
                    ax.set_xlabel(r"$\sqrt{\beta}\,\log n$")
        axes[0][-1].legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return str(path)
