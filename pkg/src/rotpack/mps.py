"""Matrix-product-state simulation with bond truncation.

The state is a chain of rank-3 tensors (left bond, physical, right bond),
site q holding qubit q, kept in mixed-canonical form around a moving
orthogonality center. Two-qubit gates contract the two neighboring tensors,
apply the 4x4 unitary, and split back with an SVD truncated to the bond cap
and singular-value threshold; the relative weight thrown away accumulates
in ``discarded_weight``. Gates on non-adjacent qubits are routed with
temporary SWAPs (applied and undone), which costs simulator time but never
appears in circuit depth accounting.
"""

from __future__ import annotations

import numpy as np

from .circuits import Circuit, Gate, gate_matrix

__all__ = ["MpsState", "run_circuit_mps"]

_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class MpsState:
    """Mutable MPS of ``num_qubits`` sites, starting as |0...0>.

    Parameters
    ----------
    num_qubits:
        Chain length.
    max_bond:
        Bond-dimension cap (None leaves bonds unbounded).
    threshold:
        Relative singular-value cutoff: values below
        ``threshold * s_max`` are dropped at each split.
    """

    def __init__(
        self,
        num_qubits: int,
        *,
        max_bond: int | None = 64,
        threshold: float = 1e-10,
    ) -> None:
        if num_qubits < 1:
            raise ValueError("need at least one site")
        if max_bond is not None and max_bond < 1:
            raise ValueError("max_bond must be positive")
        self.num_qubits = num_qubits
        self.max_bond = max_bond
        self.threshold = float(threshold)
        self.tensors: list[np.ndarray] = []
        for _ in range(num_qubits):
            t = np.zeros((1, 2, 1), dtype=complex)
            t[0, 0, 0] = 1.0
            self.tensors.append(t)
        self.center = 0
        self.discarded_weight = 0.0
        self.max_bond_reached = 1

    # -- canonical form ----------------------------------------------------

    def _shift_center_right(self) -> None:
        i = self.center
        t = self.tensors[i]
        l, _, r = t.shape
        q, rmat = np.linalg.qr(t.reshape(l * 2, r))
        self.tensors[i] = q.reshape(l, 2, -1)
        self.tensors[i + 1] = np.einsum("ab,bpr->apr", rmat, self.tensors[i + 1])
        self.center = i + 1

    def _shift_center_left(self) -> None:
        i = self.center
        t = self.tensors[i]
        l, _, r = t.shape
        # LQ via QR of the transpose
        q, rmat = np.linalg.qr(t.reshape(l, 2 * r).T)
        self.tensors[i] = q.T.reshape(-1, 2, r)
        self.tensors[i - 1] = np.einsum("lpa,ba->lpb", self.tensors[i - 1], rmat)
        self.center = i - 1

    def move_center(self, site: int) -> None:
        while self.center < site:
            self._shift_center_right()
        while self.center > site:
            self._shift_center_left()

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensors[self.center]))

    def bond_dimensions(self) -> tuple[int, ...]:
        return tuple(t.shape[2] for t in self.tensors[:-1])

    # -- gate application --------------------------------------------------

    def apply_gate(self, gate: Gate) -> None:
        if any(q >= self.num_qubits for q in gate.qubits):
            raise IndexError(f"gate {gate} out of range")
        matrix = gate_matrix(gate)
        if len(gate.qubits) == 1:
            q = gate.qubits[0]
            self.tensors[q] = np.einsum("ab,lbr->lar", matrix, self.tensors[q])
            return
        qa, qb = gate.qubits
        lo, hi = min(qa, qb), max(qa, qb)
        if qa != lo:
            # matrix treats its first qubit as the pair's high bit; after
            # placing the pair as (left site, right site) = (lo, hi) the
            # combined physical index is 2*bit(lo) + bit(hi)
            matrix = matrix.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
        # route hi next to lo, apply, route back
        for site in range(hi - 1, lo, -1):
            self._apply_adjacent(site, _SWAP)
        self._apply_adjacent(lo, matrix)
        for site in range(lo + 1, hi):
            self._apply_adjacent(site, _SWAP)

    def _apply_adjacent(self, site: int, matrix: np.ndarray) -> None:
        """Apply a 4x4 unitary on (site, site+1), index = 2*bit_left + bit_right."""
        self.move_center(site)
        left, right = self.tensors[site], self.tensors[site + 1]
        l = left.shape[0]
        r = right.shape[2]
        theta = np.einsum("lpa,aqr->lpqr", left, right).reshape(l, 4, r)
        theta = np.einsum("st,ltr->lsr", matrix, theta)
        u, s, vh = np.linalg.svd(
            theta.reshape(l, 2, 2, r).reshape(l * 2, 2 * r),
            full_matrices=False,
        )
        total = float(np.sum(s**2))
        keep = int(np.sum(s > self.threshold * s[0])) if s[0] > 0 else 1
        keep = max(keep, 1)
        if self.max_bond is not None:
            keep = min(keep, self.max_bond)
        kept = float(np.sum(s[:keep] ** 2))
        if total > 0.0:
            self.discarded_weight += (total - kept) / total
        s = s[:keep] / np.sqrt(kept)
        self.tensors[site] = u[:, :keep].reshape(l, 2, keep)
        self.tensors[site + 1] = (s[:, None] * vh[:keep]).reshape(keep, 2, r)
        self.center = site + 1
        self.max_bond_reached = max(self.max_bond_reached, keep)

    def scale(self, factor: complex) -> None:
        self.tensors[self.center] = self.tensors[self.center] * factor

    # -- readout -----------------------------------------------------------

    def amplitudes(self) -> np.ndarray:
        """Full amplitude vector (qubit 0 = least-significant index bit).

        Exponential in size; guarded to small chains for cross-checks.
        """
        if self.num_qubits > 16:
            raise ValueError("amplitude readout limited to 16 qubits")
        acc = np.ones((1, 1), dtype=complex)  # (batch of bit-prefixes, bond)
        for t in self.tensors:
            acc = np.tensordot(acc, t, axes=([-1], [0]))
            acc = acc.reshape(-1, t.shape[2])
        amps = acc.reshape((2,) * self.num_qubits)
        # prefix axes are site 0 first; index wants qubit 0 fastest-varying
        return np.ascontiguousarray(amps.transpose(range(self.num_qubits - 1, -1, -1))).ravel()

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Sequential exact sampling; returns a (shots, M) bit array.

        Moves the center to site 0 so every tensor to the right is
        right-orthonormal, then draws each qubit from its conditional
        distribution given the bits already drawn, batched over shots.
        """
        if shots < 1:
            raise ValueError("need at least one shot")
        self.move_center(0)
        tensor0 = self.tensors[0]
        nrm = np.linalg.norm(tensor0)
        if nrm == 0.0:
            raise ValueError("cannot sample the zero state")
        env = np.ones((shots, 1), dtype=complex)
        bits = np.empty((shots, self.num_qubits), dtype=np.uint8)
        for site, t in enumerate(self.tensors):
            if site == 0:
                t = t / nrm
            amp0 = env @ t[:, 0, :]
            amp1 = env @ t[:, 1, :]
            p0 = np.einsum("sr,sr->s", amp0, amp0.conj()).real
            p1 = np.einsum("sr,sr->s", amp1, amp1.conj()).real
            prob0 = p0 / (p0 + p1)
            draw = rng.uniform(size=shots)
            chose1 = draw >= prob0
            bits[:, site] = chose1
            env = np.where(chose1[:, None], amp1, amp0)
            env /= np.sqrt(np.where(chose1, p1, p0))[:, None]
        return bits


def run_circuit_mps(
    circuit: Circuit,
    *,
    max_bond: int | None = 64,
    threshold: float = 1e-10,
) -> MpsState:
    """Simulate a circuit from |0...0> as an MPS."""
    state = MpsState(circuit.num_qubits, max_bond=max_bond, threshold=threshold)
    for gate in circuit.gates:
        state.apply_gate(gate)
    if circuit.phase != 0.0:
        state.scale(np.exp(1j * circuit.phase))
    return state
