"""Benchmark plans: which cells to run, with what solver settings.

A plan is a JSON document with a name, optional per-cell defaults, and a
list of cells. Each cell pins one problem shape (residues and rotamers per
residue), one solver, and a trajectory count. Cells are content-addressed:
the key is a SHA-256 prefix of the canonical JSON of the fully merged cell,
so editing any knob yields a fresh key while re-running an unchanged plan
reuses finished cells.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SOLVERS = ("qaoa", "sa", "sa-discrete")

_CELL_DEFAULTS: dict[str, Any] = {
    "solver": "qaoa",
    "trajectories": 8,
    "problem_seed": 7,
    "decay": 0.0,
    "self_scale": 1.0,
    "pair_scale": 1.0,
    "target_energy": None,
    "series": None,
    "qaoa": {},
    "sa": {},
}


@dataclass(frozen=True)
class CellSpec:
    num_residues: int
    rotamers: int
    solver: str = "qaoa"
    trajectories: int = 8
    problem_seed: int = 7
    decay: float = 0.0
    self_scale: float = 1.0
    pair_scale: float = 1.0
    target_energy: float | None = None
    series: str | None = None
    qaoa: dict = field(default_factory=dict)
    sa: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.num_residues < 1 or self.rotamers < 1:
            raise ValueError("cells need at least one residue and one rotamer")
        if self.trajectories < 1:
            raise ValueError("trajectories must be at least 1")

    @property
    def num_qubits(self) -> int:
        return self.num_residues * self.rotamers

    def series_name(self) -> str:
        if self.series is not None:
            return self.series
        if self.solver == "qaoa":
            regime = self.qaoa.get("regime", "xy")
            backend = self.qaoa.get("backend", "statevector")
            return f"qaoa-{regime}-{backend}"
        return self.solver


@dataclass(frozen=True)
class BenchPlan:
    name: str
    cells: tuple[CellSpec, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("a plan needs at least one cell")


def cell_key(cell: CellSpec) -> str:
    """Content hash of the merged cell settings."""
    canonical = json.dumps(
        dataclasses.asdict(cell), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def load_plan(path: str | Path) -> BenchPlan:
    with open(path) as fh:
        raw = json.load(fh)
    if "name" not in raw:
        raise ValueError("plan is missing a name")
    if not isinstance(raw.get("cells"), list) or not raw["cells"]:
        raise ValueError("plan has no cells")
    defaults = {**_CELL_DEFAULTS, **raw.get("defaults", {})}
    cells = []
    for entry in raw["cells"]:
        merged = {**defaults, **entry}
        unknown = set(merged) - set(_CELL_DEFAULTS) - {"num_residues", "rotamers"}
        if unknown:
            raise ValueError(f"unknown cell fields: {sorted(unknown)}")
        cells.append(CellSpec(**merged))
    return BenchPlan(name=raw["name"], cells=tuple(cells))


def save_plan(plan: BenchPlan, path: str | Path) -> None:
    doc = {
        "name": plan.name,
        "cells": [dataclasses.asdict(c) for c in plan.cells],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
