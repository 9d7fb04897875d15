"""FER curve rendering: log-scaled FER vs iterations (or vs SNR) with Wilson
confidence bands, one curve per schedule."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

COLUMNS = ["schedule", "ebno_db", "iter_cap", "frames", "errors",
           "fer", "ci_lo", "ci_hi"]
MODES = ("fer-vs-iter", "fer-vs-snr")


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str | Path
    mode: str  # fer-vs-iter | fer-vs-snr
    out_path: str | Path
    fixed: float | None = None  # Eb/N0 for fer-vs-iter, iteration cap for fer-vs-snr
    schedules: tuple = ()  # empty = all

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


def read_fer_csv(path: str | Path) -> list[dict]:
    """Parse the simulator CSV into row dicts with typed fields."""
    with open(path, newline="", encoding="ascii") as fp:
        reader = csv.DictReader(fp)
        if reader.fieldnames != COLUMNS:
            raise ValueError(
                f"unexpected CSV columns {reader.fieldnames}, need {COLUMNS}")
        rows = []
        for rec in reader:
            rows.append({
                "schedule": rec["schedule"],
                "ebno_db": float(rec["ebno_db"]),
                "iter_cap": int(rec["iter_cap"]),
                "frames": int(rec["frames"]),
                "errors": int(rec["errors"]),
                "fer": float(rec["fer"]),
                "ci_lo": float(rec["ci_lo"]),
                "ci_hi": float(rec["ci_hi"]),
            })
    return rows


def _select(rows: list[dict], spec: PlotSpec) -> tuple[list[dict], float]:
    if spec.schedules:
        rows = [r for r in rows if r["schedule"] in spec.schedules]
    axis = "ebno_db" if spec.mode == "fer-vs-iter" else "iter_cap"
    fixed = spec.fixed
    if fixed is None:
        values = sorted({r[axis] for r in rows})
        if len(values) != 1:
            raise ValueError(
                f"--fixed is required: CSV holds several {axis} values {values}")
        fixed = values[0]
    if spec.mode == "fer-vs-snr":
        fixed = int(fixed)
    rows = [r for r in rows if r[axis] == fixed]
    if not rows:
        raise ValueError(f"no rows match {axis} = {fixed}")
    return rows, fixed


def build_figure(rows: list[dict], spec: PlotSpec):
    """Figure with one log-FER curve per schedule; zero-FER points leave
    gaps rather than distorting the log axis."""
    rows, fixed = _select(rows, spec)
    if spec.mode == "fer-vs-iter":
        x_field, x_label = "iter_cap", "iterations"
        title = f"FER vs. iterations at {fixed} dB"
    else:
        x_field, x_label = "ebno_db", "Eb/N0 (dB)"
        title = f"FER vs. Eb/N0 at {fixed} iterations"

    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    for schedule in sorted({r["schedule"] for r in rows}):
        pts = sorted((r for r in rows if r["schedule"] == schedule),
                     key=lambda r: r[x_field])
        xs = [p[x_field] for p in pts]
        ys = [p["fer"] if p["fer"] > 0 else math.nan for p in pts]
        band_lo = [max(p["ci_lo"], 1e-12) for p in pts]
        band_hi = [max(p["ci_hi"], 1e-12) for p in pts]
        line, = ax.plot(xs, ys, marker=".", markersize=4, linewidth=1.2,
                        label=schedule)
        ax.fill_between(xs, band_lo, band_hi, color=line.get_color(), alpha=0.15,
                        linewidth=0)
    ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel("FER")
    ax.set_title(title)
    ax.grid(True, which="both", linestyle=":", linewidth=0.5)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> Path:
    """Read the CSV, build the figure, and write it to spec.out_path."""
    rows = read_fer_csv(spec.csv_path)
    fig = build_figure(rows, spec)
    out = Path(spec.out_path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
