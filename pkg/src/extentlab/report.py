"""Serialization and figure rendering for experiment results.

Each experiment lands on disk as three artifacts in one directory:

    <experiment>.jsonl         one trial record per line
    <experiment>.summary.json  the summary dict with a schema_version
    <experiment>.png           a figure of the headline quantity

plus an optional CSV mirror of the records. Record content is deterministic
given (experiment id, master seed); only the keys in
:data:`extentlab.experiments.VOLATILE_KEYS` vary between reruns.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ExperimentResult

SCHEMA_VERSION = 1


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_records(result: ExperimentResult, path) -> None:
    """JSON-lines, one record per line, keys in record order."""
    with open(path, "w") as fh:
        for rec in result.records:
            fh.write(json.dumps(_jsonable(rec)) + "\n")


def write_summary(result: ExperimentResult, path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "experiment": result.experiment,
        "master_seed": result.master_seed,
        "trials": len(result.records),
        "summary": _jsonable(result.summary),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_csv(result: ExperimentResult, path) -> None:
    if not result.records:
        Path(path).write_text("")
        return
    fields = list(result.records[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for rec in result.records:
            writer.writerow({k: _jsonable(rec.get(k)) for k in fields})


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def _fig_overlap_tail(result: ExperimentResult, ax) -> None:
    pts = result.summary["points"]
    x = [p["x"] for p in pts]
    ax.semilogy(x, [p["exact"] for p in pts], "k-", label="$(1-x)^{d-1}$")
    ax.errorbar(x, [p["empirical"] for p in pts],
                yerr=[3 * p["mc_sigma"] for p in pts],
                fmt="o", capsize=3, label="empirical $\\pm 3\\sigma$")
    ax.set_xlabel("$x$")
    ax.set_ylabel("$\\Pr[|\\langle\\omega,\\psi\\rangle|^2 \\geq x]$")
    ax.legend()


def _fig_concentration(result: ExperimentResult, ax) -> None:
    fids = [r["fidelity"] for r in result.records]
    ax.hist(fids, bins=40)
    thr = result.summary["threshold"]
    ax.axvline(thr, color="r", linestyle="--",
               label=f"threshold {thr:.3f} (freq {result.summary['event_frequency']:.3f})")
    ax.set_xlabel("stabilizer fidelity")
    ax.set_ylabel("trials")
    ax.legend()


def _fig_product(result: ExperimentResult, ax) -> None:
    t = [r["trial"] for r in result.records]
    ax.semilogy(t, [max(r["deviation"], 1e-16) for r in result.records], ".",
                label="$|\\xi_{prod} - \\xi_1\\xi_2|$")
    ax.semilogy(t, [r["gap_sum"] for r in result.records], "k.", alpha=0.4,
                label="summed duality gaps")
    ax.set_xlabel("trial")
    ax.set_ylabel("deviation")
    ax.legend()


def _fig_add_phi(result: ExperimentResult, ax) -> None:
    key = "phi_overlap" if "phi_overlap" in result.records[0] else "witness_norm_sq"
    vals = [r[key] for r in result.records]
    trig = [r[key] for r in result.records if r["trigger"]]
    bins = np.histogram_bin_edges(vals, bins=30)
    ax.hist(vals, bins=bins, label="all trials")
    if trig:
        ax.hist(trig, bins=bins, label="trigger fired")
    ax.axvline(1.0, color="r", linestyle="--", label="infeasibility bound")
    ax.set_xlabel(key)
    ax.set_ylabel("trials")
    ax.legend()


def _fig_optimality(result: ExperimentResult, ax) -> None:
    counts = np.bincount([r["max_per_basis"] for r in result.records])
    ax.bar(range(len(counts)), counts)
    ax.set_xticks(range(len(counts)))
    ax.set_xlabel("max support words per orthonormal basis")
    ax.set_ylabel("trials")


_FIGURES = {
    "overlap-tail": _fig_overlap_tail,
    "concentration": _fig_concentration,
    "product-multiplicativity": _fig_product,
    "add-phi": _fig_add_phi,
    "optimality": _fig_optimality,
}


def render_figure(result: ExperimentResult, path) -> bool:
    """Render the experiment's figure to ``path``; False if no renderer."""
    fn = None
    for prefix, candidate in _FIGURES.items():
        if result.experiment.startswith(prefix):
            fn = candidate
            break
    if fn is None or not result.records:
        return False
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    fn(result, ax)
    ax.set_title(f"{result.experiment} (seed {result.master_seed})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True


def save_result(result: ExperimentResult, out_dir, figures: bool = True,
                csv_mirror: bool = False) -> dict:
    """Write all artifacts for one experiment; returns the path map."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = result.experiment
    paths = {
        "records": out / f"{stem}.jsonl",
        "summary": out / f"{stem}.summary.json",
    }
    write_records(result, paths["records"])
    write_summary(result, paths["summary"])
    if csv_mirror:
        paths["csv"] = out / f"{stem}.csv"
        write_csv(result, paths["csv"])
    if figures:
        fig_path = out / f"{stem}.png"
        if render_figure(result, fig_path):
            paths["figure"] = fig_path
    return {k: str(v) for k, v in paths.items()}
