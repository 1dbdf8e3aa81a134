"""Run benchmark plans to a content-addressed output tree.

Layout under the output directory:

    cells/<key>/summary.json    merged cell config plus aggregate stats
    cells/<key>/records.jsonl   one line per trajectory
    index.json                  plan name and the cells it mapped to

A cell whose summary already exists is skipped, so interrupting and
re-running a plan resumes where it left off. The target energy for the
stop criterion comes from brute force unless the cell pins one; cells too
large to enumerate must pin it.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from pathlib import Path

import numpy as np

from ..baselines import SaConfig, brute_force, sa_ensemble
from ..driver import FirstGroundState, QaoaConfig, run_ensemble, write_records_jsonl
from ..problem import RotamerProblem, random_problem
from .plans import BenchPlan, CellSpec, cell_key

__all__ = [
    "run_experiment",
    "run_cell",
    "cell_problem",
    "cell_target_energy",
    "load_summaries",
]

BRUTE_FORCE_CAP = 10**7


def cell_problem(cell: CellSpec) -> RotamerProblem:
    return random_problem(
        cell.num_residues,
        cell.rotamers,
        seed=cell.problem_seed,
        self_scale=cell.self_scale,
        pair_scale=cell.pair_scale,
        decay=cell.decay,
    )


def cell_target_energy(cell: CellSpec, problem: RotamerProblem) -> float:
    if cell.target_energy is not None:
        return cell.target_energy
    total = 1
    for c in problem.rotamer_counts:
        total *= c
    if total > BRUTE_FORCE_CAP:
        raise ValueError(
            f"cell has {total} assignments, too many to enumerate;"
            " set target_energy explicitly"
        )
    return brute_force(problem, cap=BRUTE_FORCE_CAP).ground_energy


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def run_cell(cell: CellSpec, cell_dir: Path, *, workers: int = 1) -> dict:
    """Execute one cell and write its summary and records."""
    start = time.perf_counter()
    problem = cell_problem(cell)
    target = cell_target_energy(cell, problem)

    cell_dir.mkdir(parents=True, exist_ok=True)
    records_path = cell_dir / "records.jsonl"

    if cell.solver == "qaoa":
        config = QaoaConfig(
            **cell.qaoa, stop_mode=FirstGroundState(target_energy=target)
        )
        result = run_ensemble(
            problem, config, cell.trajectories, workers=workers
        )
        write_records_jsonl(result.records, records_path)
        aggregate = result.summary_dict()
        aggregate["success_ratio"] = aggregate.pop("convergence_ratio")
        cost_unit = "shots"
        per_iteration = config.resolved_shots(problem.num_qubits)
    else:
        config = SaConfig(**cell.sa)
        method = "gsa" if cell.solver == "sa" else "discrete"
        result = sa_ensemble(
            problem,
            config,
            cell.trajectories,
            target_energy=target,
            method=method,
        )
        with open(records_path, "w") as fh:
            for r in result.results:
                fh.write(
                    json.dumps(dataclasses.asdict(r), sort_keys=True) + "\n"
                )
        aggregate = result.summary_dict()
        cost_unit = "evaluations"
        per_iteration = config.max_iterations

    summary = {
        "cell": dataclasses.asdict(cell),
        "key": cell_key(cell),
        "series": cell.series_name(),
        "num_qubits": problem.num_qubits,
        "target_energy": _jsonable(target),
        "cost_unit": cost_unit,
        "per_iteration": per_iteration,
        "aggregate": {k: _jsonable(v) for k, v in aggregate.items()},
        "wall_time": time.perf_counter() - start,
    }
    with open(cell_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def run_experiment(
    plan: BenchPlan, out_dir: str | Path, *, workers: int | None = None
) -> list[dict]:
    """Run every cell of a plan, skipping cells already summarized."""
    out = Path(out_dir)
    cells_dir = out / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    if workers is None:
        workers = int(os.environ.get("BENCH_WORKERS", "1"))

    summaries = []
    index = {"plan": plan.name, "cells": []}
    for cell in plan.cells:
        key = cell_key(cell)
        cell_dir = cells_dir / key
        summary_path = cell_dir / "summary.json"
        if summary_path.exists():
            with open(summary_path) as fh:
                summary = json.load(fh)
            status = "cached"
        else:
            summary = run_cell(cell, cell_dir, workers=workers)
            status = "ran"
        summaries.append(summary)
        index["cells"].append(
            {"key": key, "series": summary["series"], "status": status}
        )
    with open(out / "index.json", "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summaries


def load_summaries(out_dir: str | Path) -> list[dict]:
    """All cell summaries under an output tree, sorted by qubit count."""
    cells_dir = Path(out_dir) / "cells"
    summaries = []
    if cells_dir.is_dir():
        for summary_path in sorted(cells_dir.glob("*/summary.json")):
            with open(summary_path) as fh:
                summaries.append(json.load(fh))
    summaries.sort(key=lambda s: (s["series"], s["num_qubits"]))
    return summaries
