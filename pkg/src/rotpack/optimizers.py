"""Gradient-free optimizers behind an ask/tell contract.

The driver owns the evaluation loop (it needs to simulate, sample, scan for
ground-state hits, and account shots between proposals), so optimizers are
inverted: ``ask()`` yields the next parameter vector, ``tell(value)``
returns its objective value, and ``ask()`` returns None once the underlying
method has terminated.

Scipy's COBYLA and Nelder-Mead run in a worker thread with the objective
relaying points and values over a pair of one-slot queues. ``close`` lets a
caller abandon an optimization early (ground state found): the remaining
proposals are answered with a constant fill value, which makes the method
converge on its own within a handful of cheap callbacks; nothing is raised
across the scipy boundary and the worker always terminates.
"""

from __future__ import annotations

import queue
import threading
from typing import Protocol

import numpy as np
from scipy.optimize import minimize

__all__ = ["AskTellOptimizer", "ScipyAskTell", "OPTIMIZER_METHODS", "make_optimizer"]

OPTIMIZER_METHODS = ("cobyla", "nelder-mead")


class AskTellOptimizer(Protocol):
    def ask(self) -> np.ndarray | None: ...

    def tell(self, value: float) -> None: ...

    def close(self, fill_value: float) -> None: ...


class ScipyAskTell:
    """One scipy minimize call, inverted to ask/tell. Not thread-safe."""

    def __init__(self, method: str, x0: np.ndarray, max_evals: int) -> None:
        method = method.lower()
        if method not in OPTIMIZER_METHODS:
            raise ValueError(f"unknown optimizer {method!r}")
        scipy_name = {"cobyla": "COBYLA", "nelder-mead": "Nelder-Mead"}[method]
        if scipy_name == "COBYLA":
            options = {"maxiter": max_evals}
        else:
            options = {"maxiter": max_evals, "maxfev": max_evals}
        self._ask_q: queue.Queue = queue.Queue(maxsize=1)
        self._tell_q: queue.Queue = queue.Queue(maxsize=1)
        self._done = False
        self._pending = False

        def objective(x: np.ndarray) -> float:
            self._ask_q.put(np.array(x, copy=True))
            return self._tell_q.get()

        def worker() -> None:
            try:
                minimize(objective, np.asarray(x0, dtype=float), method=scipy_name,
                         options=options)
            finally:
                self._ask_q.put(None)

        self._thread = threading.Thread(target=worker, daemon=True)
        self._thread.start()

    def ask(self) -> np.ndarray | None:
        if self._done:
            return None
        x = self._ask_q.get()
        if x is None:
            self._done = True
            self._thread.join()
            return None
        self._pending = True
        return x

    def tell(self, value: float) -> None:
        if not self._pending:
            raise RuntimeError("tell without a pending ask")
        self._pending = False
        self._tell_q.put(float(value))

    def close(self, fill_value: float) -> None:
        """Finish the worker by answering everything left with a constant."""
        if self._pending:
            self.tell(fill_value)
        while self.ask() is not None:
            self.tell(fill_value)


def make_optimizer(method: str, x0: np.ndarray, max_evals: int) -> ScipyAskTell:
    return ScipyAskTell(method, x0, max_evals)
