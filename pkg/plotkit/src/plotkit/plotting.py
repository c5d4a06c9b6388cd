"""Figure rendering: one stacked panel per field, one curve per snapshot."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .io import Snapshot, read_snapshot_csv  # noqa: E402

__all__ = ["FIELD_LABELS", "PlotSpec", "plot"]

FIELD_LABELS = {
    "rho": ("density", r"$\rho$ (kg/m$^3$)"),
    "v": ("velocity", r"$v$ (m/s)"),
    "s11": ("deviatoric stress", r"$S_{11}$ (Pa)"),
    "p": ("pressure", r"$p$ (Pa)"),
    "t11": ("axial stress", r"$T_{11}$ (Pa)"),
}


@dataclass(frozen=True)
class PlotSpec:
    """What to render: inputs, fields, and the output image path."""

    inputs: tuple[str, ...]
    fields: tuple[str, ...]
    output: str
    overlay: bool = False
    title: str | None = None
    dpi: int = 150

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("at least one input snapshot is required")
        if not self.fields:
            raise ValueError("at least one field is required")
        unknown = [f for f in self.fields if f not in FIELD_LABELS]
        if unknown:
            raise ValueError(
                f"unknown fields {unknown}; choose from "
                f"{', '.join(FIELD_LABELS)}")
        if len(self.inputs) > 1 and not self.overlay:
            raise ValueError("multiple inputs require overlay mode")


def _curve_label(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def plot(spec: PlotSpec) -> str:
    """Render the spec to its output image; returns the written path."""
    snapshots: list[Snapshot] = [read_snapshot_csv(p) for p in spec.inputs]

    n = len(spec.fields)
    fig, axes = plt.subplots(n, 1, figsize=(8.0, 2.8 * n), sharex=True,
                             squeeze=False)
    for ax, name in zip(axes[:, 0], spec.fields):
        short, unit = FIELD_LABELS[name]
        for snap in snapshots:
            ax.plot(snap.x, snap.field(name), lw=1.2,
                    label=_curve_label(snap.path))
        ax.set_ylabel(unit)
        ax.set_title(short, fontsize="medium", loc="left")
        ax.grid(True, alpha=0.3)
        if spec.overlay and len(snapshots) > 1:
            ax.legend(fontsize="x-small", ncols=2)
    axes[-1, 0].set_xlabel("position $x$ (m)")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    out_dir = os.path.dirname(os.path.abspath(spec.output))
    os.makedirs(out_dir, exist_ok=True)
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return spec.output
