"""Matplotlib rendering of trajectories (PNG/PDF next to the CSV and SVG exports)."""

from __future__ import annotations

from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dynamics import CONSERVED, EmptyRecord, TrajectoryRecord  # noqa: E402


def render_trajectory(record: TrajectoryRecord, path, title: Optional[str] = None) -> None:
    """Orbit of (Re q1, Re q2) on the left, conserved-quantity drift on the right."""
    if len(record) == 0:
        raise EmptyRecord("cannot plot an empty trajectory")
    q = record.states[:, :2].real
    fig, (ax, bx) = plt.subplots(1, 2, figsize=(9, 4), constrained_layout=True)
    ax.plot(q[:, 0], q[:, 1], lw=0.8, color="k")
    ax.plot(q[0, 0], q[0, 1], "o", color="tab:red", ms=4, label="start")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("Re q1")
    ax.set_ylabel("Re q2")
    ax.legend(loc="best", fontsize="small")

    ref = record.conserved[0]
    for k, name in enumerate(CONSERVED):
        scale = abs(ref[k]) or 1.0
        dev = np.abs(record.conserved[:, k] - ref[k]) / scale
        # log axis cannot show exact zeros
        bx.semilogy(record.times, np.maximum(dev, 1e-18), lw=0.8, label=name)
    bx.set_xlabel("t")
    bx.set_ylabel("relative drift")
    bx.legend(loc="best", fontsize="small")
    if title:
        fig.suptitle(title)
    fig.savefig(path, dpi=120)
    plt.close(fig)
