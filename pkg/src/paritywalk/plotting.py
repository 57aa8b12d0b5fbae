"""Figure rendering: byte-deterministic SVG line and stacked-bar charts.

Records are lists of rows with keys series/x/y/yerr; the same record always
renders to identical bytes (fixed hash salt, no embedded date).
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import InvalidArgumentError  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "paritywalk"

_SERIES_COLORS = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def _group_by_series(rows):
    series: dict[str, list] = {}
    for row in rows:
        series.setdefault(str(row["series"]), []).append(row)
    for pts in series.values():
        pts.sort(key=lambda r: float(r["x"]))
    return series


def render_record(rows, out_path, *, kind: str = "line", xlabel: str = "",
                  ylabel: str = "", title: str = "", logy: bool = False,
                  vlines: dict[str, float] | None = None) -> list[str]:
    """Render a record to an SVG file; returns warnings (e.g. NaN gaps)."""
    rows = list(rows)
    if not rows:
        raise InvalidArgumentError("cannot plot an empty record")
    if kind not in ("line", "stacked_bar"):
        raise InvalidArgumentError(f"unknown plot kind {kind!r}")
    warnings: list[str] = []
    series = _group_by_series(rows)

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=100)
    if kind == "line":
        for i, (name, pts) in enumerate(series.items()):
            xs = [float(p["x"]) for p in pts]
            ys = [float(p["y"]) for p in pts]
            errs = [float(p.get("yerr", 0) or 0) for p in pts]
            for x, y in zip(xs, ys):
                if math.isnan(y):
                    warnings.append(f"NaN value in series {name!r} at x={x}; rendered as gap")
            color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
            if any(e > 0 for e in errs):
                ax.errorbar(xs, ys, yerr=errs, label=name, color=color,
                            linewidth=1.2, capsize=2)
            else:
                ax.plot(xs, ys, label=name, color=color, linewidth=1.2)
    else:
        names = list(series)
        xs = sorted({float(p["x"]) for p in rows})
        width = 0.8 * min(
            (b - a for a, b in zip(xs, xs[1:])), default=1.0
        )
        bottom = {x: 0.0 for x in xs}
        for i, name in enumerate(names):
            pts = {float(p["x"]): float(p["y"]) for p in series[name]}
            heights = []
            for x in xs:
                y = pts.get(x, 0.0)
                if math.isnan(y):
                    warnings.append(f"NaN value in series {name!r} at x={x}; rendered as gap")
                    y = 0.0
                heights.append(y)
            ax.bar(xs, heights, width=width,
                   bottom=[bottom[x] for x in xs],
                   label=name, color=_SERIES_COLORS[i % len(_SERIES_COLORS)])
            for x, h in zip(xs, heights):
                bottom[x] += h

    for label, x in (vlines or {}).items():
        ax.axvline(x, linestyle=":", linewidth=1.0, color="#444444")
        ax.text(x, ax.get_ylim()[1], label, rotation=90, fontsize=7,
                va="top", ha="right", color="#444444")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(series) > 1 or next(iter(series), "") != "":
        ax.legend(fontsize=8)
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return warnings
