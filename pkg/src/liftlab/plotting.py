"""Figures for experiment output, written straight to image files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "savefig.dpi": 120,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_curve(rows: Sequence, path, title: str = "", xlabel: str = "a", logy: bool = True) -> Path:
    """Empirical frequencies against the exact law or bound.

    ``rows`` are (a, empirical, exact_or_bound, N) tuples; one pair of lines
    is drawn per distinct N.
    """
    groups: dict = {}
    for a, emp, ref, N in rows:
        groups.setdefault(N, []).append((a, emp, ref))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for N, pts in groups.items():
            pts.sort()
            xs = [p[0] for p in pts]
            tag = "" if N is None else f" (N={N})"
            (line,) = ax.plot(xs, [p[1] for p in pts], "o", ms=3, label="empirical" + tag)
            ax.plot(xs, [p[2] for p in pts], "-", color=line.get_color(), label="exact / bound" + tag)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("probability")
        ax.set_title(title)
        ax.legend(fontsize="small")
        return _save(fig, path)


def plot_sweep(summaries: Sequence[dict], path, title: str = "") -> Path:
    """Per-stage failure hazards with Wilson intervals against h."""
    hs = [s["h"] for s in summaries]
    stages = list(summaries[0]["hazards"])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for st in stages + ["success"]:
            pts = [
                (h, s["success"] if st == "success" else s["hazards"][st]) for h, s in zip(hs, summaries)
            ]
            pts = [(h, e) for h, e in pts if e is not None]
            if not pts or all(e["estimate"] == 0 for _, e in pts):
                continue
            xs = [h for h, _ in pts]
            ys = [e["estimate"] for _, e in pts]
            lo = [e["estimate"] - e["low"] for _, e in pts]
            hi = [e["high"] - e["estimate"] for _, e in pts]
            ax.errorbar(xs, ys, yerr=[lo, hi], marker="o", capsize=3, label=st)
        ax.set_xscale("log")
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("h")
        ax.set_ylabel("frequency among trials reaching the stage")
        ax.set_title(title)
        ax.legend(fontsize="small")
        return _save(fig, path)
