"""The adaptive operator pool: SO(4) two-qubit rotations, CRY and RY."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import gates
from .circuit import GateInstance

# Change of basis mapping the local Pauli algebra onto so(4).
Q_MATRIX = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]]
) / np.sqrt(2)


def so4_generator_set() -> list[np.ndarray]:
    """The six real antisymmetric generators -(i/2){ZY, YI, XY, IY, -YZ, YX}.

    They coincide with (i/2) Q^dag {XI, YI, ZI, IX, IY, IZ} Q, in that order.
    """
    P = gates.pauli_matrix
    labels = [("ZY", 1), ("YI", 1), ("XY", 1), ("IY", 1), ("YZ", -1), ("YX", 1)]
    return [np.real(-0.5j * sign * P(lab)) for lab, sign in labels]


def conjugated_local_paulis() -> list[np.ndarray]:
    """(i/2) Q^dag P Q for P in XI, YI, ZI, IX, IY, IZ (computed, not tabulated)."""
    Qd = Q_MATRIX.conj().T
    return [0.5j * Qd @ gates.pauli_matrix(lab) @ Q_MATRIX for lab in ("XI", "YI", "ZI", "IX", "IY", "IZ")]


@dataclass(frozen=True)
class PoolOperator:
    kind: str
    qubits: tuple[int, ...]
    pauli: str = ""

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        # reuse GateInstance validation
        self.to_gate(0)

    def to_gate(self, slot: int) -> GateInstance:
        return GateInstance(self.kind, self.qubits, slot, self.pauli)

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2


@dataclass(frozen=True)
class OperatorPool:
    n_qubits: int
    operators: tuple[PoolOperator, ...]

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))
        if len(set(self.operators)) != len(self.operators):
            raise ValueError("duplicate operators in pool")
        for op in self.operators:
            if max(op.qubits) >= self.n_qubits:
                raise IndexError(f"{op} out of range for {self.n_qubits} qubits")

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __getitem__(self, k):
        return self.operators[k]

    def to_json(self) -> str:
        ops = [{"kind": op.kind, "qubits": list(op.qubits)} | ({"pauli": op.pauli} if op.pauli else {})
               for op in self.operators]
        return json.dumps({"n_qubits": self.n_qubits, "operators": ops})

    @classmethod
    def from_json(cls, text: str) -> OperatorPool:
        d = json.loads(text)
        ops = [PoolOperator(o["kind"], tuple(o["qubits"]), o.get("pauli", "")) for o in d["operators"]]
        return cls(d["n_qubits"], ops)


def build_full_pool(n: int) -> OperatorPool:
    """ZY, XY and CRY on every ordered pair plus RY on every qubit: 3n(n-1) + n."""
    if n < 2:
        raise ValueError("the pool needs at least two qubits")
    ops = []
    for kind in ("ZY", "XY", "CRY"):
        ops += [PoolOperator(kind, (i, j)) for i in range(n) for j in range(n) if i != j]
    ops += [PoolOperator("RY", (i,)) for i in range(n)]
    return OperatorPool(n, ops)


def build_reduced_pool(pool: OperatorPool, mi, r: float) -> OperatorPool:
    """Keep two-qubit operators on pairs with I(i, j) >= r * max I; keep all RY."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"reduction rate must lie in [0, 1], got {r}")
    mi = np.asarray(mi, dtype=float)
    if mi.shape != (pool.n_qubits, pool.n_qubits):
        raise ValueError("mutual-information matrix has the wrong shape")
    if not np.allclose(mi, mi.T) or np.any(mi < -1e-10):
        raise ValueError("mutual-information matrix must be symmetric and nonnegative")
    cut = r * mi.max()
    ops = [op for op in pool if not op.is_two_qubit or mi[op.qubits] >= cut]
    return OperatorPool(pool.n_qubits, ops)
