from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from bornforge.circuit import Circuit

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])
I2 = np.eye(2, dtype=complex)
P1 = {"I": I2, "X": X, "Y": Y, "Z": Z}

ALL_KINDS = ("RY", "RX", "RZ", "ZY", "XY", "CRY", "CRZ", "PAULI", "CZ", "CX")


def pauli_string(label: str) -> np.ndarray:
    out = np.eye(1)
    for ch in label:
        out = np.kron(out, P1[ch])
    return out


def reference_gate(kind: str, theta: float = 0.0, pauli: str = "") -> np.ndarray:
    """Gate matrix built from scipy's expm, independent of the package."""
    labels = {"RY": "Y", "RX": "X", "RZ": "Z", "ZY": "ZY", "XY": "XY", "PAULI": pauli}
    if kind in labels:
        return expm(-0.5j * theta * pauli_string(labels[kind]))
    proj0, proj1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    if kind in ("CRY", "CRZ"):
        return np.kron(proj0, I2) + np.kron(proj1, expm(-0.5j * theta * P1[kind[-1]]))
    if kind == "CZ":
        return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    if kind == "CX":
        return np.kron(proj0, I2) + np.kron(proj1, X)
    raise ValueError(kind)


def embed(mat: np.ndarray, qubits, n: int) -> np.ndarray:
    """Dense 2^n matrix of ``mat`` on ``qubits`` by explicit index bookkeeping.

    Qubit 0 is the most significant bit and the first listed qubit is the
    left tensor factor of ``mat``.
    """
    dim = 2**n
    k = len(qubits)
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_in = 0
        for q in qubits:
            sub_in = 2 * sub_in + bits[q]
        for sub_out in range(2**k):
            amp = mat[sub_out, sub_in]
            if amp == 0:
                continue
            new = list(bits)
            for pos, q in enumerate(qubits):
                new[q] = (sub_out >> (k - 1 - pos)) & 1
            row = int("".join(map(str, new)), 2)
            full[row, col] += amp
    return full


def dense_state(circuit: Circuit, theta) -> np.ndarray:
    n = circuit.n_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for g in circuit.gates:
        t = theta[g.slot] if g.slot is not None else 0.0
        psi = embed(reference_gate(g.kind, t, g.pauli), g.qubits, n) @ psi
    return psi


def random_circuit(rng: np.random.Generator, n: int, depth: int, kinds=ALL_KINDS) -> tuple[Circuit, np.ndarray]:
    """Random circuit with a trainable RY(pi/2) layer first so q has full support."""
    c = Circuit(n)
    for q in range(n):
        c.append("RY", (q,))
    for _ in range(depth):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("RY", "RX", "RZ"):
            c.append(kind, (int(rng.integers(n)),))
        else:
            i, j = rng.choice(n, size=2, replace=False)
            pauli = ""
            if kind == "PAULI":
                pauli = "II"
                while pauli == "II":
                    pauli = "".join(rng.choice(list("IXYZ"), size=2))
            c.append(kind, (int(i), int(j)), pauli=pauli)
    theta = rng.uniform(-np.pi, np.pi, size=c.n_params)
    theta[:n] = np.pi / 2 + rng.uniform(-0.3, 0.3, size=n)
    return c, theta


def random_distribution(rng: np.random.Generator, size: int, sparse: bool = False) -> np.ndarray:
    p = rng.random(size) ** 2
    if sparse:
        p[rng.random(size) < 0.5] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
    return p / p.sum()


def random_state(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    v = rng.normal(size=2**n)
    if not real:
        v = v + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
