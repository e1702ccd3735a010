"""Static figures written next to the CSV reports.

Uses the object-oriented matplotlib API (no pyplot global state) so figures
can be produced from worker threads. Output format follows the file suffix.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .spectral import GapCurve

# fixed hash salt and no timestamp keep SVG output byte-stable
matplotlib.rcParams["svg.hashsalt"] = "aqcknap"

_STYLE = {
    "font.size": 10,
    "axes.grid": True,
    "grid.linestyle": "--",
    "grid.linewidth": 0.5,
    "lines.linewidth": 1.5,
}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower() or "svg"
    metadata = {"Date": None} if fmt in ("svg", "pdf") else None
    fig.savefig(path, format=fmt, metadata=metadata, bbox_inches="tight")
    return path


def plot_gap_curve(curve: GapCurve, path, title: str | None = None, zoom: float | None = None) -> Path:
    """Energies and gap versus ``s`` (left) and the gap near its minimum (right).

    ``zoom`` is the right panel's upper ``s`` limit; by default it is
    ``max(0.1, 2 * argmin_s)`` clipped to 1.
    """
    with matplotlib.rc_context(_STYLE):
        fig = Figure(figsize=(10, 4))
        ax1, ax2 = fig.subplots(1, 2)
        ax1.plot(curve.s, curve.E0, label="$E_0$")
        ax1.plot(curve.s, curve.E1, label="$E_1$")
        ax1.plot(curve.s, curve.gap, label="$E_1 - E_0$")
        ax1.set_xlabel("$s = t/T$")
        ax1.set_ylabel("energy")
        ax1.legend(loc="best")

        hi = zoom if zoom is not None else min(1.0, max(0.1, 2 * curve.argmin_s))
        s = np.concatenate([curve.s, curve.refined_s])
        g = np.concatenate([curve.gap, curve.refined_gap])
        order = np.argsort(s, kind="stable")
        s, g = s[order], g[order]
        mask = s <= hi
        ax2.plot(s[mask], g[mask], marker=".", markersize=3)
        ax2.axvline(curve.argmin_s, color="0.5", linewidth=0.8)
        ax2.set_xlabel("$s = t/T$")
        ax2.set_ylabel("gap")
        ax2.set_title(f"min gap {curve.min_gap:.4g} at s = {curve.argmin_s:.4g}", fontsize=9)
        if title:
            fig.suptitle(title)
        return _save(fig, path)


def plot_phase(rows, path, title: str | None = None) -> Path:
    """Scaled energy and critical kappa versus alpha, one line per mu."""
    with matplotlib.rc_context(_STYLE):
        fig = Figure(figsize=(10, 4))
        ax1, ax2 = fig.subplots(1, 2)
        mus = sorted({r["mu"] for r in rows})
        for mu in mus:
            sel = sorted((r for r in rows if r["mu"] == mu), key=lambda r: r["alpha"])
            a = [r["alpha"] for r in sel]
            label = f"mu = {mu:g}" if len(mus) > 1 else None
            ax1.plot(a, [r["x_quad"] for r in sel], label=label)
            ax2.plot(a, [r["kappa_quad"] for r in sel], label=label)
        ax1.set_xlabel(r"$\alpha$")
        ax1.set_ylabel("$x = E/(NL)$")
        ax2.set_xlabel(r"$\alpha$")
        ax2.set_ylabel(r"$\kappa_c$")
        if len(mus) > 1:
            ax1.legend(loc="best", fontsize=8)
        if title:
            fig.suptitle(title)
        return _save(fig, path)
