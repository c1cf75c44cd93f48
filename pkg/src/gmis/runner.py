"""Experiment runner: executes a validated config over its full
(scheme, sample size, estimator) grid and serializes deterministic
result tables.

Determinism contract: replicate seeds derive from (master seed, grid
cell, chunk index) through `numpy.random.SeedSequence`, chunks have a
fixed size, and per-chunk results merge in chunk order — so output
bytes depend only on (config, seed), never on the worker count. CSV
uses '.' decimals, LF line endings and a fixed column order.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adaptive import adaptive_estimates, run_adaptive
from .config import (build_adaptive, build_estimand, build_pool, build_schemes,
                     build_target)
from .errors import InputError
from .indexing import SamplingMode
from .replicates import simulate_estimates
from .schemes import SchemeSpec
from .variance import (RunningExampleConfig, analytic_variance_Z,
                       analytic_variance_mean, mse_entry)
from .weights import WeightingOption

CSV_COLUMNS = ("experiment", "scheme", "M", "R", "estimator",
               "empirical_mse", "stderr", "analytic_variance",
               "target_evals", "proposal_evals", "wall_time")

_CHUNK = 20000  # replicates per seeding chunk; fixed for determinism


@dataclass
class ResultRow:
    experiment: str
    scheme: str
    M: int
    R: int
    estimator: str
    empirical_mse: float
    stderr: float
    analytic_variance: Optional[float]
    target_evals: int
    proposal_evals: int
    wall_time: Optional[float] = None

    def as_record(self) -> dict:
        rec = {
            "experiment": self.experiment, "scheme": self.scheme,
            "M": self.M, "R": self.R, "estimator": self.estimator,
            "empirical_mse": _fmt(self.empirical_mse),
            "stderr": _fmt(self.stderr),
            "analytic_variance": ("" if self.analytic_variance is None
                                  else _fmt(self.analytic_variance)),
            "target_evals": self.target_evals,
            "proposal_evals": self.proposal_evals,
            "wall_time": ("" if self.wall_time is None
                          else _fmt(self.wall_time)),
        }
        return rec


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def _raw_proposal_evals(spec: SchemeSpec, N: int) -> int:
    """Deterministic multiset size of all weight denominators per block."""
    mode, option = spec.mode, spec.option
    if option is WeightingOption.SELECTED:
        per = N
    elif option is WeightingOption.CONDITIONAL:
        per = {SamplingMode.WITH_REPLACEMENT: N * N,
               SamplingMode.RANDOM_PERMUTATION: N * (N + 1) // 2,
               SamplingMode.DETERMINISTIC: N}[mode]
    elif option is WeightingOption.MARGINAL:
        per = N if mode is SamplingMode.DETERMINISTIC else N * N
    else:  # REALIZED_MIXTURE or FULL_MIXTURE
        per = N * N
    return per * spec.blocks


def _cell_seed(master: int, *indices) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master),
                                                         *map(int, indices)]))


def _simulate_cell(spec, target, pool, g, replicates, master, si, mi,
                   threads) -> dict:
    """Per-replicate estimates for one grid cell, chunk-seeded so the
    result is independent of the worker count."""
    starts = list(range(0, replicates, _CHUNK))

    def job(ci):
        rng = _cell_seed(master, si, mi, ci)
        n = min(_CHUNK, replicates - starts[ci])
        return simulate_estimates(spec, target, pool, g, n, rng)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool_exec:
            parts = list(pool_exec.map(job, range(len(starts))))
    else:
        parts = [job(ci) for ci in range(len(starts))]
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def run_static(doc: dict, seed: int, replicates: int,
               threads: int = 1, timings: bool = False) -> list:
    """Execute a static (pool + schemes) experiment grid."""
    target = build_target(doc)
    pool = build_pool(doc, np.random.default_rng(
        np.random.SeedSequence([int(seed), 0xA11CE])))
    g = build_estimand(doc)
    estimators = doc.get("estimators", ["self"])
    truth_mean = target.ground_truth()["mean"]
    oracle = doc.get("analytic_oracle")
    cfg = (RunningExampleConfig(oracle["mu"], oracle["sigma"])
           if oracle else None)
    rows = []
    for mi, M in enumerate(doc["sample_sizes"]):
        for si, spec in enumerate(build_schemes(doc, pool.size, M)):
            t0 = time.perf_counter()
            sims = _simulate_cell(spec, target, pool, g, replicates,
                                  seed, si, mi, threads)
            elapsed = time.perf_counter() - t0
            for est in estimators:
                truth = target.known_Z if est == "z" else truth_mean
                analytic = None
                if cfg is not None and spec.name in ("R1", "R2", "R3",
                                                     "N1", "N2", "N3"):
                    base = (analytic_variance_Z(cfg, spec.name) if est == "z"
                            else analytic_variance_mean(cfg, spec.name)
                            if est == "mean" else None)
                    if base is not None:
                        analytic = base / spec.blocks
                entry = mse_entry(spec.label, est, sims[est], truth, analytic)
                rows.append(ResultRow(
                    doc["experiment"], spec.label, M, replicates, est,
                    entry.empirical, entry.stderr, analytic,
                    target_evals=M * replicates,
                    proposal_evals=_raw_proposal_evals(spec, pool.size) * replicates,
                    wall_time=elapsed if timings else None))
    rows.sort(key=lambda r: (r.scheme, r.M, r.estimator))
    return rows


def run_adaptive_experiment(doc: dict, seed: int, runs: int,
                            timings: bool = False) -> tuple:
    """Execute an adaptive experiment: `runs` independent adaptive runs,
    MSE of the Z and self-normalized mean estimates, plus per-run
    diagnostics rows."""
    target = build_target(doc)
    acfg = build_adaptive(doc)
    truth_mean = target.ground_truth()["mean"]
    label = f"{acfg.adapter}:{acfg.weighting}"
    zs = np.empty(runs)
    means = np.empty((runs, target.dim))
    diag_rows = []
    t0 = time.perf_counter()
    for r in range(runs):
        rng = _cell_seed(seed, 1, r)
        result = run_adaptive(acfg, target, rng)
        est = adaptive_estimates(result)
        zs[r] = est["z"]
        means[r] = est["self"]
        ess = result.diagnostics.get("ess_proxy", np.array([]))
        acc = result.diagnostics.get("acceptance_rate", "")
        for t, e in enumerate(ess):
            diag_rows.append({"experiment": doc["experiment"], "run": r,
                              "iteration": t + 1,
                              "acceptance_rate": _fmt(acc) if acc != "" else "",
                              "ess_proxy": _fmt(e)})
    elapsed = time.perf_counter() - t0
    M = acfg.chains * acfg.iterations
    rows = [
        ResultRow(doc["experiment"], label, M, runs, "z",
                  *_mse(zs, target.known_Z), None, M * runs, M * runs,
                  elapsed if timings else None),
        ResultRow(doc["experiment"], label, M, runs, "self",
                  *_mse(means, truth_mean), None, M * runs, M * runs,
                  elapsed if timings else None),
    ]
    return rows, diag_rows


def _mse(estimates, truth):
    entry = mse_entry("", "", estimates, truth)
    return entry.empirical, entry.stderr


def run_experiment(doc: dict, seed: Optional[int] = None,
                   replicates: Optional[int] = None, threads: int = 1,
                   timings: bool = False) -> tuple:
    """Run one validated config; returns (result rows, diagnostic rows)."""
    seed = doc["seed"] if seed is None else seed
    replicates = doc["replicates"] if replicates is None else replicates
    if "adaptive" in doc:
        return run_adaptive_experiment(doc, seed, replicates, timings)
    return run_static(doc, seed, replicates, threads, timings), []


def check_finite(rows: list):
    """Raise naming the first non-finite result cell, if any."""
    for row in rows:
        for field in ("empirical_mse", "stderr"):
            v = getattr(row, field)
            if not np.isfinite(v):
                raise InputError(
                    f"non-finite {field} in cell scheme={row.scheme} "
                    f"M={row.M} estimator={row.estimator}")


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_record())
    return buf.getvalue()


def rows_to_json(rows: list) -> str:
    return json.dumps([row.as_record() for row in rows], indent=2) + "\n"


def diagnostics_to_csv(diag_rows: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf, fieldnames=("experiment", "run", "iteration", "acceptance_rate",
                         "ess_proxy"), lineterminator="\n")
    writer.writeheader()
    for row in diag_rows:
        writer.writerow(row)
    return buf.getvalue()
