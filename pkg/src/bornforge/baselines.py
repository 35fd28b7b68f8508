"""Fixed-topology comparison circuits and their trainer.

* Structure 1: k+1 layers of RX RY RX on every qubit interleaved with k rings
  of CZ on (i, i+1 mod n).
* Structure 2: k blocks of an RY layer followed by a CRZ ring i -> i+1 mod n.
* MPS: k staircase sweeps over neighbouring pairs (q, q+1), each block a
  product of the 15 non-identity two-qubit Pauli rotations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .losses import LossKind, check_distribution
from .optim import AdamState
from .trainer import TrainConfig, TrainReport, final_metrics, optimize_parameters

FAMILIES = ("structure1", "structure2", "mps")

# XX, XY, XZ, XI, YX, ..., IZ: lexicographic in the order X < Y < Z < I
MPS_PAULIS = tuple(a + b for a, b in itertools.product("XYZI", repeat=2) if a + b != "II")

INIT_SIGMA = np.pi / 8


def _check(n: int, k: int):
    if n < 2:
        raise ValueError("fixed ansatz circuits need at least 2 qubits")
    if k < 0:
        raise ValueError("depth must be nonnegative")


def _ring(n: int) -> list[tuple[int, int]]:
    return [(i, (i + 1) % n) for i in range(n)]


def build_structure1(n: int, k: int) -> Circuit:
    """3n(k+1) parameters.  For n = 2 the CZ ring has a single edge (CZ is symmetric)."""
    _check(n, k)
    c = Circuit(n)
    edges = [(0, 1)] if n == 2 else _ring(n)
    for layer in range(k + 1):
        for q in range(n):
            for kind in ("RX", "RY", "RX"):
                c.append(kind, (q,))
        if layer < k:
            for e in edges:
                c.append("CZ", e)
    return c


def build_structure2(n: int, k: int) -> Circuit:
    """2kn parameters: both ring edges are kept for n = 2 since CRZ is directed."""
    _check(n, k)
    c = Circuit(n)
    for _ in range(k):
        for q in range(n):
            c.append("RY", (q,))
        for e in _ring(n):
            c.append("CRZ", e)
    return c


def build_mps_circuit(n: int, k: int) -> Circuit:
    """15 k (n-1) parameters."""
    _check(n, k)
    c = Circuit(n)
    for _ in range(k):
        for q in range(n - 1):
            for label in MPS_PAULIS:
                c.append("PAULI", (q, q + 1), pauli=label)
    return c


_BUILDERS = {"structure1": build_structure1, "structure2": build_structure2, "mps": build_mps_circuit}


@dataclass(frozen=True)
class FixedAnsatzSpec:
    family: str
    n_qubits: int
    depth: int
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown ansatz family {self.family!r}; choose from {FAMILIES}")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")

    def build(self) -> Circuit:
        return _BUILDERS[self.family](self.n_qubits, self.depth)

    def initial_theta(self, n_params: int) -> np.ndarray:
        return np.random.default_rng(self.seed).normal(0.0, INIT_SIGMA, size=n_params)


def train_fixed(circuit: Circuit, target, loss: LossKind | None = None, lr: float = 0.05,
                max_epochs: int = 2000, eps2: float = 1e-6, theta0=None, seed: int = 0,
                beta1: float = 0.9, beta2: float = 0.999, adam_eps: float = 1e-8) -> tuple[np.ndarray, TrainReport]:
    """ADAM with a fixed learning rate on every parameter of a fixed circuit.

    ``theta0`` defaults to a seeded N(0, (pi/8)^2) draw.  The report uses the
    same history format as the adaptive trainer, with iteration fixed at 1.
    """
    target = check_distribution(target)
    if target.size != 2**circuit.n_qubits:
        raise ValueError(f"target has {target.size} entries but the circuit acts on {circuit.n_qubits} qubits")
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    circuit.validate()
    if theta0 is None:
        theta = np.random.default_rng(seed).normal(0.0, INIT_SIGMA, size=circuit.n_params)
    else:
        theta = np.array(theta0, dtype=float)
        circuit.validate(theta)
    config = TrainConfig(eps2=eps2, max_epochs=max_epochs, loss=loss or LossKind(),
                         beta1=beta1, beta2=beta2, adam_eps=adam_eps, seed=seed)
    report = TrainReport()
    theta, _, measurements, epochs, _ = optimize_parameters(
        circuit, theta, target, config, AdamState.zeros(len(theta)), report, 1, 0, lambda g: lr)
    report.final = final_metrics(circuit, theta, target, config.loss)
    report.final.update(epochs=epochs, cumulative_measurements=measurements, floor_events=report.floor_events)
    return theta, report
