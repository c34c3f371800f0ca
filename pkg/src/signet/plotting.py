"""Line-chart rendering for run reports.

Figures are written as SVG next to the delimited output.  Rendering is
deterministic: the SVG hash salt is pinned to the config hash and no
date metadata is embedded, so identical configs reproduce identical
bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .engine import EnsembleStats, SERIES_KEYS  # noqa: E402

_LABELS = {
    "s": "susceptible fraction",
    "a": "alerted fraction",
    "rho": "infected fraction",
    "r": "friendly-link fraction",
    "e_pair": "pairwise energy",
    "e_triad": "triad energy",
    "e_total": "weighted energy",
    "balanced": "balanced-triad fraction",
    "e_min": "running minimum energy",
}


def render_timeseries_figures(
    stats: EnsembleStats,
    outdir: str | Path,
    *,
    x_axis: str = "step",
    dt: float | None = None,
    hashsalt: str = "signet",
    fmt: str = "svg",
) -> list[Path]:
    """One chart per recorded quantity; mean with a +-std band for ensembles."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    x = stats.steps if x_axis == "step" else stats.t
    xlabel = "step" if x_axis == "step" else "t"
    written = []
    with plt.rc_context({"svg.hashsalt": hashsalt}):
        for key in SERIES_KEYS:
            fig, ax = plt.subplots(figsize=(5.0, 3.2), dpi=100)
            mean = stats.mean[key]
            ax.plot(x, mean, lw=1.2, color="#1f77b4")
            if stats.runs > 1:
                std = stats.std[key]
                ax.fill_between(x, mean - std, mean + std, alpha=0.25,
                                color="#1f77b4", linewidth=0)
            ax.set_xlabel(xlabel)
            ax.set_ylabel(_LABELS[key])
            ax.grid(True, alpha=0.3)
            fig.tight_layout()
            path = outdir / f"{key}.{fmt}"
            fig.savefig(path, metadata={"Date": None} if fmt == "svg" else None)
            plt.close(fig)
            written.append(path)
    return written
