"""Exact pure-state simulation.

Bit ordering: qubit 0 is the most significant bit of the basis index, so the
amplitude vector reshaped to ``(2,) * n`` has qubit ``k`` on axis ``k``.  Data
encoders (BAS pixels, images, discretized PDFs) use the same convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GateInstance


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state not normalized (norm^2 = {norm})")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amps) -> StateVector:
        amps = np.asarray(amps)
        n = int(round(np.log2(len(amps))))
        return cls(n, amps / np.linalg.norm(amps))


def init_basis_state(n: int, x: int = 0) -> StateVector:
    if not 0 <= x < 2**n:
        raise IndexError(f"basis index {x} out of range for {n} qubits")
    amps = np.zeros(2**n)
    amps[x] = 1.0
    return StateVector(n, amps)


# --- kernel ---------------------------------------------------------------

def apply_matrix(psi: np.ndarray, mat: np.ndarray, qubits, n: int) -> np.ndarray:
    """Return ``mat`` (2x2 or 4x4) applied to ``qubits`` of the flat vector ``psi``.

    ``psi`` may carry leading batch axes, shape ``(..., 2**n)``.  ``mat`` need
    not be unitary (derivative matrices go through here too).  Zero entries are
    skipped, so the sparse pool gates are cheap, and a real matrix acting on a
    real vector stays real.
    """
    dtype = np.result_type(psi, mat)
    batch = psi.size >> n
    if len(qubits) == 1:
        q = qubits[0]
        v = psi.reshape(batch, 1 << q, 2, 1 << (n - q - 1))
        out = np.empty(v.shape, dtype=dtype)
        blocks = [v[:, :, 0], v[:, :, 1]]
        targets = [out[:, :, 0], out[:, :, 1]]
    else:
        i, j = qubits
        lo, hi = (i, j) if i < j else (j, i)
        v = psi.reshape(batch, 1 << lo, 2, 1 << (hi - lo - 1), 2, 1 << (n - hi - 1))
        out = np.empty(v.shape, dtype=dtype)
        order = _ORDER_IJ if i < j else _ORDER_JI
        blocks = [v[:, :, a, :, b] for a, b in order]
        targets = [out[:, :, a, :, b] for a, b in order]
    for row, tgt in zip(mat.tolist(), targets):
        first = True
        for m, blk in zip(row, blocks):
            if m == 0:
                continue
            if first:
                np.multiply(blk, m, out=tgt)
                first = False
            elif m == 1:
                tgt += blk
            elif m == -1:
                tgt -= blk
            else:
                tgt += m * blk
        if first:
            tgt[...] = 0
    return out.reshape(psi.shape)


_ORDER_IJ = ((0, 0), (0, 1), (1, 0), (1, 1))
_ORDER_JI = ((0, 0), (1, 0), (0, 1), (1, 1))


def _check_gate(g: GateInstance, n: int):
    if any(q < 0 or q >= n for q in g.qubits):
        raise IndexError(f"gate {g} out of range for {n} qubits")


def apply_gate(state: StateVector, gate: GateInstance, theta_val: float = 0.0) -> StateVector:
    _check_gate(gate, state.n_qubits)
    amps = apply_matrix(state.amplitudes, gate.matrix(theta_val), gate.qubits, state.n_qubits)
    return StateVector(state.n_qubits, amps)


def simulate(circuit: Circuit, theta, psi0: np.ndarray | None = None) -> np.ndarray:
    """Run ``circuit`` and return the raw amplitude array (no validation)."""
    n = circuit.n_qubits
    if psi0 is None:
        psi = np.zeros(2**n)
        psi[0] = 1.0
    else:
        psi = psi0
    for g in circuit.gates:
        t = theta[g.slot] if g.slot is not None else 0.0
        psi = apply_matrix(psi, g.matrix(t), g.qubits, n)
    return psi


def run_circuit(circuit: Circuit, theta) -> StateVector:
    theta = np.asarray(theta, dtype=float)
    if len(theta) != circuit.n_params:
        raise ValueError(f"expected {circuit.n_params} parameters, got {len(theta)}")
    return StateVector(circuit.n_qubits, simulate(circuit, theta))


def born_probabilities(state: StateVector | np.ndarray) -> np.ndarray:
    amps = state.amplitudes if isinstance(state, StateVector) else state
    if np.iscomplexobj(amps):
        return amps.real**2 + amps.imag**2
    return amps * amps


def reduced_density_2q(state: StateVector | np.ndarray, i: int, j: int) -> np.ndarray:
    """4x4 reduced density matrix of qubits (i, j); i is the left tensor factor."""
    amps = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    n = int(round(np.log2(amps.size)))
    if i == j:
        raise ValueError("need two distinct qubits")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"qubits ({i}, {j}) out of range for {n} qubits")
    rest = [k for k in range(n) if k not in (i, j)]
    m = np.transpose(amps.reshape((2,) * n), [i, j] + rest).reshape(4, -1)
    return m @ m.conj().T
