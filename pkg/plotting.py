"""
Static SVG figures of entropy curves and holographic comparisons.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from constants import PLOT_HEIGHT, PLOT_MARKERS, PLOT_WIDTH

logger = logging.getLogger(__name__)


def plot_entropy_curves(curves: Sequence, path, logx: bool = False, per_length: bool = False,
                        fits: Optional[Dict[int, Sequence]] = None, title: str = "", bits: bool = False) -> Path:
    """S (or S/L) against L for several curves, one marker style each.

    Args:
        curves: EntropyCurve objects
        path: Output file; the suffix picks the format
        logx: Logarithmic L axis
        per_length: Plot S/L, the form used for 2-d area laws
        fits: Optional map curve position -> ScalingFit list drawn as lines
        title: Figure title
        bits: Entropy in bits instead of nats
    """
    fig, ax = plt.subplots(figsize=(PLOT_WIDTH, PLOT_HEIGHT))
    unit = np.log(2.0) if bits else 1.0
    for i, curve in enumerate(curves):
        y = curve.S / unit
        if per_length:
            y = y / curve.L
        ax.plot(curve.L, y, PLOT_MARKERS[i % len(PLOT_MARKERS)], markersize=4, fillstyle="none",
                label=curve.model.label)
        for fit in (fits or {}).get(i, []):
            L = curve.L[(curve.L >= fit.window[0]) & (curve.L <= fit.window[1])].astype(float)
            if L.size == 0:
                continue
            line = fit.predict(L, curve.lattice.extent[0]) / unit
            ax.plot(L, line / L if per_length else line, "-", linewidth=1)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel("L")
    ax.set_ylabel("S/L" if per_length else "S")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    return _save(fig, path)


def plot_holography(L: np.ndarray, S_lattice: np.ndarray, S_holographic: np.ndarray, path, logx: bool = False,
                    title: str = "", reference: Optional[np.ndarray] = None) -> Path:
    """Lattice entropy as markers with the holographic curve as a line.

    ``reference`` is drawn dashed, typically the pure AdS entropy at the same scale.
    """
    fig, ax = plt.subplots(figsize=(PLOT_WIDTH, PLOT_HEIGHT))
    ax.plot(L, S_lattice, "o", markersize=4, fillstyle="none", label="lattice")
    ax.plot(L, S_holographic, "-", label="geodesic")
    if reference is not None:
        ax.plot(L, reference, "--", linewidth=1, label="pure AdS")
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel("L")
    ax.set_ylabel("S")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    logger.info("saved figure %s", path)
    return path
