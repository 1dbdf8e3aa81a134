"""Seeded random number generation.

Every stochastic routine in the package draws from a counter-based
:class:`numpy.random.Generator` (Philox) built here, so runs are reproducible
from a single integer seed and trajectories can be re-run independently.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["generator", "trajectory_seed"]


def generator(seed: int) -> np.random.Generator:
    """Return a Philox-backed generator for ``seed``."""
    return np.random.Generator(np.random.Philox(seed))


def trajectory_seed(base_seed: int, trajectory_id: int) -> int:
    """Derive an independent child seed for one trajectory.

    The derivation hashes ``base_seed`` and ``trajectory_id`` together, so
    trajectory streams never overlap and trajectory ``k`` can be reproduced
    without generating trajectories ``0..k-1``.
    """
    digest = hashlib.blake2b(
        f"{base_seed}:{trajectory_id}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")
