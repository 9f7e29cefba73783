"""Support plots for bivariate series and sieve certificates.

Figures are written to files with the Agg backend; nothing here opens a
window.  Only coefficient supports are drawn (nonzero vs zero), never values.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .series import BiSeries  # noqa: E402


def support_mask(F: BiSeries) -> np.ndarray:
    """Boolean ``ny x nx`` array, True where the coefficient of ``x^a y^b`` is nonzero."""
    mask = np.zeros((F.ny, F.nx), dtype=bool)
    for (a, b) in F.terms():
        mask[b, a] = True
    return mask


def plot_support(F: BiSeries, path: str | Path, title: str = "", highlight_rows=(), shade_rows=()) -> Path:
    """Scatter the support of ``F``; optionally mark pillar rows and shade zero windows.

    ``highlight_rows`` are y-exponents drawn as horizontal lines, ``shade_rows``
    inclusive ``(lo, hi)`` ranges drawn as bands.
    """
    path = Path(path)
    mask = support_mask(F)
    ys, xs = np.nonzero(mask)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(xs, ys, s=4, c="k", marker="s", linewidths=0)
    for lo, hi in shade_rows:
        ax.axhspan(lo - 0.5, hi + 0.5, color="tab:blue", alpha=0.15, linewidth=0)
    for j in highlight_rows:
        ax.axhline(j, color="tab:red", linewidth=0.8)
    ax.set_xlim(-0.5, F.nx - 0.5)
    ax.set_ylim(-0.5, F.ny - 0.5)
    ax.set_xlabel("exponent of x")
    ax.set_ylabel("exponent of y")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_sieve(F: BiSeries, cert, path: str | Path) -> Path:
    """Support of ``F`` with the certificate's pillars and zero windows marked."""
    title = f"n={cert.n}, d={cert.d} sieve at m={cert.m} (mod {cert.p})"
    return plot_support(F, path, title, cert.pillar_indices, cert.zero_windows)
