"""Circuit description, resource accounting and JSON persistence."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gates


@dataclass(frozen=True)
class GateInstance:
    """One gate placed in a circuit.

    ``slot`` indexes the parameter vector; it is ``None`` for fixed gates
    (CZ, CX).  ``pauli`` is only used by the ``PAULI`` kind.
    """

    kind: str
    qubits: tuple[int, ...]
    slot: int | None = None
    pauli: str = ""

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        nq = gates.n_qubits_of(self.kind)
        if len(self.qubits) != nq:
            raise ValueError(f"{self.kind} acts on {nq} qubit(s), got {self.qubits}")
        if nq == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} needs distinct qubits, got {self.qubits}")
        if gates.is_parameterized(self.kind) != (self.slot is not None):
            raise ValueError(f"slot mismatch for {self.kind}: slot={self.slot}")
        if self.kind == "PAULI":
            if len(self.pauli) != 2 or set(self.pauli) - set("IXYZ") or self.pauli == "II":
                raise ValueError(f"bad Pauli label {self.pauli!r}")

    def matrix(self, theta: float = 0.0) -> np.ndarray:
        return gates.matrix(self.kind, theta, self.pauli)

    def derivative(self, theta: float = 0.0) -> np.ndarray:
        return gates.derivative(self.kind, theta, self.pauli)


@dataclass
class Circuit:
    """Ordered gate list on ``n_qubits``; parameters live outside in a vector."""

    n_qubits: int
    gates: list[GateInstance] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: GateInstance):
        if any(q < 0 or q >= self.n_qubits for q in g.qubits):
            raise IndexError(f"gate {g} out of range for {self.n_qubits} qubits")

    @property
    def n_params(self) -> int:
        slots = [g.slot for g in self.gates if g.slot is not None]
        return max(slots) + 1 if slots else 0

    def append(self, kind: str, qubits, pauli: str = "", slot: int | None = None) -> GateInstance:
        """Append a gate; parameterized gates get a fresh slot unless one is given."""
        if slot is None and gates.is_parameterized(kind):
            slot = self.n_params
        g = GateInstance(kind, tuple(qubits), slot, pauli)
        self._check(g)
        self.gates.append(g)
        return g

    def copy(self) -> Circuit:
        return Circuit(self.n_qubits, list(self.gates))

    def validate(self, theta=None):
        """Check that every slot in [0, n_params) is used (and theta fits)."""
        used = {g.slot for g in self.gates if g.slot is not None}
        if used != set(range(self.n_params)):
            raise ValueError("parameter slots are not contiguous")
        if theta is not None and len(theta) != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {len(theta)}")


# --- resources ------------------------------------------------------------

def gate_cost(g: GateInstance) -> tuple[int, int, int]:
    """(one-qubit gates, two-qubit gates, layers) of the native decomposition.

    Two-body Pauli rotations compile to basis changes, a CNOT pair and an RZ,
    so ZY and XY take 5 layers.  CRY, CRZ, CZ and single-qubit rotations are
    native single-layer gates.
    """
    label = {"ZY": "ZY", "XY": "XY", "PAULI": g.pauli}.get(g.kind)
    if label is None:
        return (1, 0, 1) if len(g.qubits) == 1 else (0, 1, 1)
    active = [c for c in label if c != "I"]
    if len(active) == 1:
        return 1, 0, 1
    changes = sum(c != "Z" for c in active)
    return 2 * changes + 1, 2, (5 if changes else 3)


def resources(circuit: Circuit) -> dict:
    one = two = 0
    level = [0] * circuit.n_qubits
    for g in circuit.gates:
        a, b, layers = gate_cost(g)
        one += a
        two += b
        start = max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = start + layers
    return {
        "parameters": circuit.n_params,
        "one_qubit_gates": one,
        "two_qubit_gates": two,
        "depth": max(level, default=0),
    }


# --- persistence ----------------------------------------------------------

def circuit_to_dict(circuit: Circuit, theta) -> dict:
    circuit.validate(theta)
    out = []
    for g in circuit.gates:
        d = {"kind": g.kind, "qubits": list(g.qubits), "slot": g.slot}
        if g.pauli:
            d["pauli"] = g.pauli
        out.append(d)
    return {"n_qubits": circuit.n_qubits, "gates": out, "theta": [float(t) for t in theta]}


def circuit_from_dict(d: dict) -> tuple[Circuit, np.ndarray]:
    c = Circuit(int(d["n_qubits"]))
    for g in d["gates"]:
        c.append(g["kind"].upper(), g["qubits"], g.get("pauli", ""), g.get("slot"))
    theta = np.array(d["theta"], dtype=float)
    c.validate(theta)
    return c, theta


def save_circuit(path, circuit: Circuit, theta):
    # json writes floats with repr(), which round-trips float64 exactly
    Path(path).write_text(json.dumps(circuit_to_dict(circuit, theta), indent=1) + "\n", encoding="utf-8")


def load_circuit(path) -> tuple[Circuit, np.ndarray]:
    return circuit_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
