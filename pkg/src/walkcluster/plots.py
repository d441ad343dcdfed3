"""Render sweep CSVs as SVG line charts (solid BT, dashed NBT)."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .pipeline import RESULT_COLUMNS  # noqa: E402

_NUMERIC = {"n", "k", "c", "lambda", "l", "r", "w", "trial", "ccr", "nmi",
            "wall_time_seconds"}


def _read_rows(csv_path) -> list[dict]:
    with open(csv_path) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RESULT_COLUMNS:
            raise ValueError(f"{csv_path} does not carry the sweep schema "
                             f"{','.join(RESULT_COLUMNS)}")
        rows = []
        for raw in reader:
            row = {key: (float(val) if key in _NUMERIC else val)
                   for key, val in raw.items()}
            rows.append(row)
    if not rows:
        raise ValueError(f"{csv_path} contains no result rows")
    return rows


def _mean_std(values: list[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, var ** 0.5


def emit_plot(csv_path, x: str, out_path, panel_by: str | None = None) -> Path:
    """One SVG chart: NMI on a 0-1 axis, CCR as a percentage on 100/K-100.

    ``x`` selects the sweep column for the horizontal axis; ``panel_by``
    draws one panel per distinct value of another column. Trials are
    aggregated to mean with a +-1 std band.
    """
    rows = _read_rows(csv_path)
    for column in filter(None, (x, panel_by)):
        if column not in RESULT_COLUMNS:
            raise ValueError(f"unknown column {column!r}; choose from "
                             f"{','.join(RESULT_COLUMNS)}")

    panels = sorted({row[panel_by] for row in rows}) if panel_by else [None]
    ncols = min(2, len(panels))
    nrows = -(-len(panels) // ncols)
    fig, axes = plt.subplots(nrows, ncols, squeeze=False,
                             figsize=(6.4 * ncols, 4.2 * nrows))

    for idx, panel in enumerate(panels):
        ax = axes[idx // ncols][idx % ncols]
        sub = [r for r in rows if panel_by is None or r[panel_by] == panel]
        k_max = max(int(r["k"]) for r in sub)
        ax_ccr = ax.twinx()
        grouped: dict[tuple[str, float], dict[str, list[float]]] = defaultdict(
            lambda: {"ccr": [], "nmi": []})
        for r in sub:
            grouped[(r["arm"], r[x])]["ccr"].append(r["ccr"])
            grouped[(r["arm"], r[x])]["nmi"].append(r["nmi"])
        for arm in sorted({r["arm"] for r in sub}):
            xs = sorted({key[1] for key in grouped if key[0] == arm})
            style = "-" if arm == "BT" else "--"
            nmi_mean, nmi_std, ccr_mean, ccr_std = [], [], [], []
            for xv in xs:
                mean, std = _mean_std(grouped[(arm, xv)]["nmi"])
                nmi_mean.append(mean)
                nmi_std.append(std)
                mean, std = _mean_std(grouped[(arm, xv)]["ccr"])
                ccr_mean.append(100.0 * mean)
                ccr_std.append(100.0 * std)
            ax.plot(xs, nmi_mean, style, color="tab:blue",
                    label=f"{arm} NMI", marker="o", markersize=3)
            ax.fill_between(xs, [m - s for m, s in zip(nmi_mean, nmi_std)],
                            [m + s for m, s in zip(nmi_mean, nmi_std)],
                            color="tab:blue", alpha=0.15)
            ax_ccr.plot(xs, ccr_mean, style, color="tab:red",
                        label=f"{arm} CCR", marker="s", markersize=3)
            ax_ccr.fill_between(xs, [m - s for m, s in zip(ccr_mean, ccr_std)],
                                [m + s for m, s in zip(ccr_mean, ccr_std)],
                                color="tab:red", alpha=0.15)
        ax.set_xlabel(x)
        ax.set_ylabel("NMI", color="tab:blue")
        ax.set_ylim(0.0, 1.0)
        ax_ccr.set_ylabel("CCR (%)", color="tab:red")
        ax_ccr.set_ylim(100.0 / k_max, 100.0)
        if panel_by:
            ax.set_title(f"{panel_by} = {panel:g}")
        handles1, labels1 = ax.get_legend_handles_labels()
        handles2, labels2 = ax_ccr.get_legend_handles_labels()
        ax.legend(handles1 + handles2, labels1 + labels2, fontsize=8,
                  loc="lower right")
    for idx in range(len(panels), nrows * ncols):
        axes[idx // ncols][idx % ncols].set_visible(False)

    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path
