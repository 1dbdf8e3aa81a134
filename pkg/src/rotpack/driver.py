"""The hybrid QAOA loop.

One *trajectory* is: draw initial angles, then repeatedly simulate the
ansatz, sample a batch of shots, scan the batch for a valid ground-state
bitstring (stopping immediately on a hit), and otherwise feed the batch's
CVaR to a gradient-free optimizer for the next angles. Cost is counted in
circuits executed: iterations times shots per iteration, with the final
iteration always charged in full because batches execute whole.

The CVaR objective is evaluated under the Hamiltonian the ansatz actually
evolves (penalized in the penalty regime, bare otherwise), while hit
detection and ``best_energy`` always use the physical (unpenalized) energy
of valid samples.

Trajectories are seed-isolated: trajectory k of base seed s uses the hashed
child seed ``trajectory_seed(s, k)``, so ensembles parallelize and single
trajectories reproduce in isolation.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ._rng import generator, trajectory_seed
from .circuits import AnsatzSpec, REGIMES, assemble_ansatz, build_initial_state, build_mixer
from .mps import run_circuit_mps
from .optimizers import make_optimizer
from .problem import RotamerProblem, valid_mask
from .qubo import IsingHamiltonian, all_bitstring_energies, build_qubo
from . import statevector as sv
from .circuits import ansatz_hamiltonian

__all__ = [
    "FirstGroundState",
    "ParameterConvergence",
    "QaoaConfig",
    "RunRecord",
    "EnsembleResult",
    "cvar",
    "cvar_of_values",
    "init_params",
    "optimize",
    "run_ensemble",
    "aggregate_records",
    "write_records_jsonl",
]

BACKENDS = ("statevector", "mps")


@dataclass(frozen=True)
class FirstGroundState:
    """Stop a trajectory the moment a sampled valid bitstring hits the target."""

    target_energy: float
    tol: float = 1e-9


@dataclass(frozen=True)
class ParameterConvergence:
    """Run until the optimizer itself terminates (or the budget runs out)."""


@dataclass(frozen=True)
class QaoaConfig:
    """Everything a trajectory needs besides the problem itself.

    ``shots_per_iteration`` and ``max_iterations`` default per backend:
    statevector runs use 10 shots per qubit clamped to [10, 100] and a
    500-iteration budget; MPS runs use 1000 shots and 2000 iterations.
    """

    regime: str
    p: int = 4
    shots_per_iteration: int | None = None
    cvar_alpha: float = 0.2
    max_iterations: int | None = None
    gamma_range: tuple[float, float] = (-0.1, 0.1)
    beta_range: tuple[float, float] = (-1.0, 1.0)
    seed: int = 0
    backend: str = "statevector"
    max_bond: int = 64
    truncation_threshold: float = 1e-10
    penalty: float | None = None
    optimizer: str = "cobyla"
    init_config: tuple[int, ...] | None = None
    stop_mode: FirstGroundState | ParameterConvergence = ParameterConvergence()

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if not 0.0 < self.cvar_alpha <= 1.0:
            raise ValueError("cvar_alpha must be in (0, 1]")
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.penalty is not None and self.regime != "penalty":
            raise ValueError("penalty weight only applies to the penalty regime")

    def resolved_shots(self, num_qubits: int) -> int:
        if self.shots_per_iteration is not None:
            return self.shots_per_iteration
        if self.backend == "statevector":
            return int(min(max(10 * num_qubits, 10), 100))
        return 1000

    def resolved_max_iterations(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 500 if self.backend == "statevector" else 2000


@dataclass(frozen=True)
class RunRecord:
    """Per-trajectory log, JSON-serializable."""

    trajectory_id: int
    seed: int
    regime: str
    p: int
    backend: str
    shots_per_iteration: int
    iterations_used: int
    total_shots: int
    first_hit_iteration: int | None
    first_hit_shot: int | None
    converged: bool
    best_energy: float | None
    best_bitstring: str | None
    final_cvar: float | None
    optimizer_restarts: int
    wall_time: float
    rng_family: str = "philox"
    max_bond_reached: int | None = None
    discarded_weight: float | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


def cvar_of_values(values: Sequence[float], alpha: float) -> float:
    """Mean of the lowest ceil(alpha * len) values."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cvar of an empty sample set")
    k = math.ceil(alpha * values.size)
    return float(np.partition(values, k - 1)[:k].mean())


def cvar(samples: np.ndarray, h: IsingHamiltonian, alpha: float) -> float:
    """CVaR of a sampled batch under a spin Hamiltonian."""
    return cvar_of_values(h.energies_of_bits(samples), alpha)


def init_params(
    p: int,
    rng: np.random.Generator,
    gamma_range: tuple[float, float] = (-0.1, 0.1),
    beta_range: tuple[float, float] = (-1.0, 1.0),
) -> np.ndarray:
    """Starting angles (gamma_1, beta_1, ..., gamma_p, beta_p).

    All gammas are drawn first, then all betas, then the two vectors are
    interleaved; the draw order is part of the reproducibility contract.
    """
    gammas = rng.uniform(gamma_range[0], gamma_range[1], size=p)
    betas = rng.uniform(beta_range[0], beta_range[1], size=p)
    out = np.empty(2 * p)
    out[0::2] = gammas
    out[1::2] = betas
    return out


def _bits_to_string(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)


def optimize(
    problem: RotamerProblem,
    config: QaoaConfig,
    trajectory_id: int = 0,
) -> RunRecord:
    """Run one seeded trajectory and return its record."""
    start = time.perf_counter()
    m = problem.num_qubits
    shots = config.resolved_shots(m)
    budget = config.resolved_max_iterations()
    seed = trajectory_seed(config.seed, trajectory_id)
    rng = generator(seed)

    spec = AnsatzSpec(
        regime=config.regime,
        p=config.p,
        penalty=config.penalty if config.regime == "penalty" else None,
        init_config=config.init_config,
        shots=shots,
    )
    h_opt = ansatz_hamiltonian(problem, spec)
    bare_qubo = build_qubo(problem)

    if config.backend == "statevector":
        init_circuit = build_initial_state(
            spec.regime, problem.blocks, config=spec.init_config, num_qubits=m
        )
        state0 = sv.run_circuit(init_circuit)
        # the cost layer is diagonal: apply it as one exact phase profile
        phase_profile = all_bitstring_energies(h_opt)

        def run_iteration(params: np.ndarray) -> tuple[np.ndarray, dict]:
            state = state0.copy()
            for k in range(spec.p):
                state *= np.exp(-1j * float(params[2 * k]) * phase_profile)
                mixer = build_mixer(
                    spec.regime, problem.blocks, float(params[2 * k + 1]), num_qubits=m
                )
                for g in mixer.gates:
                    sv.apply_gate(state, g)
            return sv.sample_state(state, shots, rng), {}

    else:

        def run_iteration(params: np.ndarray) -> tuple[np.ndarray, dict]:
            circuit = assemble_ansatz(problem, spec, params)
            mstate = run_circuit_mps(
                circuit,
                max_bond=config.max_bond,
                threshold=config.truncation_threshold,
            )
            meta = {
                "max_bond_reached": mstate.max_bond_reached,
                "discarded_weight": mstate.discarded_weight,
            }
            return mstate.sample(shots, rng), meta

    x0 = init_params(config.p, rng, config.gamma_range, config.beta_range)
    optimizer = make_optimizer(config.optimizer, x0, budget)
    restarts = 0
    asks_this_round = 0

    iterations = 0
    best_cvar = math.inf
    best_params = x0
    last_cvar: float | None = None
    best_energy: float | None = None
    best_bits: str | None = None
    first_hit: tuple[int, int] | None = None
    converged = False
    max_bond_seen: int | None = None
    worst_discard: float | None = None

    while iterations < budget:
        params = optimizer.ask()
        if params is None:
            if isinstance(config.stop_mode, ParameterConvergence):
                converged = True
                break
            if asks_this_round == 0:
                # the restarted optimizer gave up without proposing anything
                break
            optimizer = make_optimizer(
                config.optimizer, best_params, budget - iterations
            )
            restarts += 1
            asks_this_round = 0
            continue
        asks_this_round += 1
        iterations += 1
        bits, meta = run_iteration(params)
        if "max_bond_reached" in meta:
            max_bond_seen = max(max_bond_seen or 0, meta["max_bond_reached"])
            worst_discard = max(worst_discard or 0.0, meta["discarded_weight"])

        energies = bare_qubo.energies(bits)
        valid = valid_mask(bits, problem)
        if valid.any():
            local = np.flatnonzero(valid)
            best_local = local[np.argmin(energies[local])]
            if best_energy is None or energies[best_local] < best_energy:
                best_energy = float(energies[best_local])
                best_bits = _bits_to_string(bits[best_local])
        if isinstance(config.stop_mode, FirstGroundState):
            hits = valid & (
                np.abs(energies - config.stop_mode.target_energy)
                <= config.stop_mode.tol
            )
            if hits.any():
                first_hit = (iterations, int(np.flatnonzero(hits)[0]) + 1)
                converged = True
                break

        value = cvar(bits, h_opt, config.cvar_alpha)
        last_cvar = value
        if value < best_cvar:
            best_cvar = value
            best_params = np.array(params, copy=True)
        optimizer.tell(value)

    optimizer.close(best_cvar if math.isfinite(best_cvar) else 0.0)

    return RunRecord(
        trajectory_id=trajectory_id,
        seed=seed,
        regime=config.regime,
        p=config.p,
        backend=config.backend,
        shots_per_iteration=shots,
        iterations_used=iterations,
        total_shots=iterations * shots,
        first_hit_iteration=first_hit[0] if first_hit else None,
        first_hit_shot=first_hit[1] if first_hit else None,
        converged=converged,
        best_energy=best_energy,
        best_bitstring=best_bits,
        final_cvar=last_cvar,
        optimizer_restarts=restarts,
        wall_time=time.perf_counter() - start,
        max_bond_reached=max_bond_seen,
        discarded_weight=worst_discard,
    )


@dataclass(frozen=True)
class EnsembleResult:
    records: tuple[RunRecord, ...]
    convergence_ratio: float
    mean_cost: float | None
    std_cost: float | None

    def summary_dict(self) -> dict:
        return {
            "num_trajectories": len(self.records),
            "convergence_ratio": self.convergence_ratio,
            "mean_cost": self.mean_cost,
            "std_cost": self.std_cost,
        }


def aggregate_records(records: Sequence[RunRecord]) -> EnsembleResult:
    """Convergence ratio and ratio-normalized cost statistics.

    Cost of a converged trajectory is its total shots; the ensemble mean
    (and std) over converged trajectories is divided by the convergence
    ratio so that unreliable settings pay for their failures. With zero
    converged trajectories the costs are undefined and reported as None.
    """
    records = tuple(records)
    if not records:
        raise ValueError("no records to aggregate")
    converged = [r for r in records if r.converged]
    ratio = len(converged) / len(records)
    if not converged:
        return EnsembleResult(records, 0.0, None, None)
    costs = np.array([r.total_shots for r in converged], dtype=float)
    return EnsembleResult(
        records=records,
        convergence_ratio=ratio,
        mean_cost=float(costs.mean()) / ratio,
        std_cost=float(costs.std()) / ratio,
    )


def _ensemble_worker(args: tuple[RotamerProblem, QaoaConfig, int]) -> RunRecord:
    problem, config, tid = args
    return optimize(problem, config, trajectory_id=tid)


def run_ensemble(
    problem: RotamerProblem,
    config: QaoaConfig,
    num_trajectories: int,
    *,
    workers: int = 1,
) -> EnsembleResult:
    """Independent seeded trajectories plus aggregate statistics."""
    if num_trajectories < 1:
        raise ValueError("need at least one trajectory")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(
                pool.map(
                    _ensemble_worker,
                    [(problem, config, tid) for tid in range(num_trajectories)],
                )
            )
    else:
        records = [
            optimize(problem, config, trajectory_id=tid)
            for tid in range(num_trajectories)
        ]
    return aggregate_records(records)


def write_records_jsonl(records: Sequence[RunRecord], path: str | Path) -> None:
    """One JSON document per line, one line per trajectory."""
    with open(path, "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
