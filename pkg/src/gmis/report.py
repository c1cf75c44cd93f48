"""Figure rendering from result tables.

The CSV is the primary artifact; this module turns an existing results
file into log-log MSE-versus-sample-size figures (one per estimator
kind), written next to the CSV. Rendering uses the non-interactive Agg
backend so it works headless.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import InputError


def read_results(path: str) -> list:
    if not os.path.exists(path):
        raise InputError(f"results file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise InputError(f"no result rows in {path}")
    return rows


def render_report(csv_path: str, out_dir: str = None) -> list:
    """Render one figure per estimator kind found in the results file.

    Returns the list of written figure paths.
    """
    rows = read_results(csv_path)
    out_dir = out_dir or os.path.dirname(os.path.abspath(csv_path))
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(csv_path))[0]
    by_estimator = defaultdict(lambda: defaultdict(list))
    for row in rows:
        by_estimator[row["estimator"]][row["scheme"]].append(
            (int(row["M"]), float(row["empirical_mse"])))
    written = []
    for est, series in sorted(by_estimator.items()):
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        for scheme, points in sorted(series.items()):
            points.sort()
            ms = [m for m, _ in points]
            mses = [v for _, v in points]
            if len(ms) > 1:
                ax.plot(ms, mses, marker="o", label=scheme)
            else:
                ax.plot(ms, mses, marker="o", linestyle="none", label=scheme)
        ax.set_xscale("log")
        positive = [v for s in series.values() for _, v in s if v > 0]
        if positive:
            ax.set_yscale("log")
        ax.set_xlabel("samples M")
        ax.set_ylabel("empirical MSE")
        ax.set_title(f"{rows[0]['experiment']} — {est} estimator")
        ax.legend(fontsize="small")
        fig.tight_layout()
        path = os.path.join(out_dir, f"{stem}_{est}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
