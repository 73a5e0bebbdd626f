"""Figure rendering from simulation CSV outputs.

Each figure consumes one documented CSV table plus the run's summary.json;
no statistics are recomputed here. All inferential quantities (CI bands,
fitted slopes, clustered SEs, p-values) come from the summary file.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureJob", "SchemaError", "render", "FIGURE_IDS"]

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4")

# figure id -> (csv columns required, summary section required)
_SCHEMAS = {
    "fig1": (("p", "replicate", "Q"), "exp1"),
    "fig2": (("agent_id", "p", "Q", "B_hat", "ci_low", "ci_high"), "exp2"),
    "fig3": (("bin", "mean_resid_overlap", "mean_resid_gain"), "exp3"),
    "fig4": (("instance_id", "r_triad", "r_control", "delta"), "exp4"),
}


class SchemaError(ValueError):
    """Input does not match the documented CSV/summary schema."""


@dataclass(frozen=True)
class FigureJob:
    figure_id: str
    input_csv: str
    output_path: str
    summary_path: str | None = None
    fmt: str = "png"

    def validate(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise SchemaError(f"unknown figure id {self.figure_id!r}; expected one of {FIGURE_IDS}")
        if self.fmt not in ("png", "svg"):
            raise SchemaError(f"format must be png or svg, got {self.fmt!r}")

    def resolved_summary(self) -> str:
        if self.summary_path:
            return self.summary_path
        # default: the summary written next to the CSV by the engine
        return os.path.join(os.path.dirname(os.path.abspath(self.input_csv)), "summary.json")


def _read_csv(path, required):
    if not os.path.exists(path):
        raise SchemaError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: missing required column {col!r} (header: {header})")
        cols = {c: [] for c in required}
        for row in reader:
            for c in required:
                cols[c].append(float(row[c]))
    if not cols[required[0]]:
        raise SchemaError(f"{path}: no data rows")
    return {c: np.asarray(v) for c, v in cols.items()}


def _read_summary(path, section):
    if not os.path.exists(path):
        raise SchemaError(f"summary file not found: {path}")
    with open(path) as fh:
        data = json.load(fh)
    if section not in data:
        raise SchemaError(f"{path}: missing section {section!r}")
    return data[section]


def _fig1(ax, cols, summary):
    per_p = summary.get("per_p_mean_ci")
    if not per_p:
        raise SchemaError("summary exp1: missing per_p_mean_ci")
    p = np.array([c["p"] for c in per_p])
    mean = np.array([c["mean_q"] for c in per_p])
    lo = np.array([c["ci_low"] for c in per_p])
    hi = np.array([c["ci_high"] for c in per_p])
    ax.fill_between(p, lo, hi, alpha=0.25, color="tab:blue", linewidth=0, label="95% bootstrap CI")
    ax.plot(p, mean, "o-", color="tab:blue", label="mean Q")
    ax.set_xlabel("p")
    ax.set_ylabel("Q")
    ax.legend(frameon=False)
    return {"x": p, "y": mean, "band": (lo, hi)}


def _fig2(ax, cols, summary):
    fit = summary.get("ols_linear")
    if not fit:
        raise SchemaError("summary exp2: missing ols_linear")
    q, b = cols["Q"], cols["B_hat"]
    ax.scatter(q, b, s=8, alpha=0.4, color="tab:blue", label="agents")
    xs = np.linspace(q.min(), q.max(), 100)
    b0, b1 = fit["coefficients"][:2]
    ax.plot(xs, b0 + b1 * xs, color="tab:red", label="linear fit")
    # envelope over the coefficient CI corners
    corners = [
        lo0 + lo1 * xs
        for lo0 in (fit["ci_low"][0], fit["ci_high"][0])
        for lo1 in (fit["ci_low"][1], fit["ci_high"][1])
    ]
    ax.fill_between(xs, np.min(corners, axis=0), np.max(corners, axis=0), alpha=0.15, color="tab:red", linewidth=0)
    ax.set_xlabel("Q")
    ax.set_ylabel("B̂")
    ax.legend(frameon=False)
    return {"x": q, "y": b, "line": (b0, b1)}


def _fig3(ax, cols, summary):
    if "beta" not in summary:
        raise SchemaError("summary exp3: missing beta")
    beta = summary["beta"]
    bx, by = cols["mean_resid_overlap"], cols["mean_resid_gain"]
    ax.scatter(bx, by, s=12, alpha=0.6, color="tab:blue", label="bins")
    xs = np.linspace(bx.min(), bx.max(), 100)
    line_y = beta * xs
    ax.plot(xs, line_y, color="tab:red", label=f"slope β̂ = {beta:.2f}")
    ax.set_xlabel("overlap (residualized)")
    ax.set_ylabel("gain (residualized)")
    ax.legend(frameon=False)
    return {"x": bx, "y": by, "line_x": xs, "line_y": line_y, "beta": beta}


def _fig4(ax, cols, summary):
    for key in ("mean_r_triad", "mean_r_control", "se_r_triad", "se_r_control", "p_value"):
        if key not in summary:
            raise SchemaError(f"summary exp4: missing {key}")
    means = [summary["mean_r_triad"], summary["mean_r_control"]]
    ses = [summary["se_r_triad"], summary["se_r_control"]]
    ax.bar([0, 1], means, yerr=ses, capsize=6, width=0.6,
           color=["tab:orange", "tab:blue"], tick_label=["Triad", "Control"])
    p = summary["p_value"]
    stars = "***" if p < 0.001 else "**" if p < 0.01 else "*" if p < 0.05 else "n.s."
    top = max(m + s for m, s in zip(means, ses))
    ax.plot([0, 0, 1, 1], [top * 1.05, top * 1.1, top * 1.1, top * 1.05], color="black", linewidth=1)
    ax.text(0.5, top * 1.12, stars, ha="center", va="bottom")
    ax.set_ylabel("overlap R")
    return {"means": means, "ses": ses, "p_value": p}


_RENDERERS = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4}


def render(job: FigureJob):
    """Render one figure; returns the plotted data for assertion-style tests."""
    job.validate()
    required, section = _SCHEMAS[job.figure_id]
    cols = _read_csv(job.input_csv, required)
    summary = _read_summary(job.resolved_summary(), section)
    fig, ax = plt.subplots(figsize=(5.0, 3.6), dpi=150)
    try:
        plotted = _RENDERERS[job.figure_id](ax, cols, summary)
        fig.tight_layout()
        fig.savefig(job.output_path, format=job.fmt, metadata=_no_timestamp(job.fmt))
    finally:
        plt.close(fig)
    return plotted


def _no_timestamp(fmt):
    # keep repeated renders byte-identical
    if fmt == "png":
        return {"Software": None}
    if fmt == "svg":
        return {"Date": None}
    return None
