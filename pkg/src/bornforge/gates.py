"""Gate kinds, their matrices and derivative matrices.

Two-qubit matrices are written in the basis |a b> with the FIRST listed qubit
as the left tensor factor (the control for controlled kinds).  Every
parameterized kind except the controlled ones has the form exp(-i theta P / 2)
with P**2 = I.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

I2 = np.eye(2)
X = np.array([[0.0, 1.0], [1.0, 0.0]])
Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
Z = np.array([[1.0, 0.0], [0.0, -1.0]])
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

# kind -> (number of qubits, parameterized)
KINDS = {
    "RY": (1, True),
    "RX": (1, True),
    "RZ": (1, True),
    "ZY": (2, True),
    "XY": (2, True),
    "CRY": (2, True),
    "CRZ": (2, True),
    "PAULI": (2, True),
    "CZ": (2, False),
    "CX": (2, False),
}

# Kinds appearing in the adaptive operator pool.  All have real matrices.
POOL_KINDS = ("ZY", "XY", "CRY", "RY")

# Generators P (with U = exp(-i theta P / 2)) of the plain rotation kinds.
_ROTATION_GENERATORS = {
    "RY": Y,
    "RX": X,
    "RZ": Z,
    "ZY": np.kron(Z, Y),
    "XY": np.kron(X, Y),
}
_CONTROLLED_TARGET = {"CRY": Y, "CRZ": Z}


def n_qubits_of(kind: str) -> int:
    try:
        return KINDS[kind][0]
    except KeyError:
        raise ValueError(f"unknown gate kind {kind!r}") from None


def is_parameterized(kind: str) -> bool:
    return KINDS[kind][1]


@lru_cache(maxsize=None)
def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of a Pauli string such as ``"ZX"`` (leftmost = first qubit)."""
    out = np.eye(1)
    for ch in label:
        out = np.kron(out, PAULI[ch])
    if np.allclose(out.imag, 0.0):
        out = out.real
    out.setflags(write=False)
    return out


def generator(kind: str, pauli: str = "") -> np.ndarray | None:
    """Return P for rotation kinds, None for controlled and fixed kinds."""
    if kind == "PAULI":
        return pauli_matrix(pauli)
    return _ROTATION_GENERATORS.get(kind)


def _rotation(P: np.ndarray, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = c * np.eye(P.shape[0]) - 1j * s * P
    return _maybe_real(out)


def _rotation_derivative(P: np.ndarray, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = -0.5 * s * np.eye(P.shape[0]) - 0.5j * c * P
    return _maybe_real(out)


def _maybe_real(m: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(m) and not np.any(m.imag):
        return np.ascontiguousarray(m.real)
    return m


def _controlled(block: np.ndarray, ident: bool = True) -> np.ndarray:
    out = np.zeros((4, 4), dtype=block.dtype)
    if ident:
        out[0, 0] = out[1, 1] = 1.0
    out[2:, 2:] = block
    return out


def _pool_matrix(kind: str, c: float, s: float) -> np.ndarray:
    # closed forms of the pool rotations; cross-checked against expm in tests
    if kind == "RY":
        return np.array([[c, -s], [s, c]])
    if kind == "ZY":
        return np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, c, s], [0, 0, -s, c]], dtype=float)
    if kind == "XY":
        return np.array([[c, 0, 0, -s], [0, c, s, 0], [0, -s, c, 0], [s, 0, 0, c]], dtype=float)
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, c, -s], [0, 0, s, c]], dtype=float)


def matrix(kind: str, theta: float = 0.0, pauli: str = "") -> np.ndarray:
    """Unitary matrix of ``kind`` at angle ``theta`` (radians)."""
    if kind in POOL_KINDS:
        return _pool_matrix(kind, np.cos(theta / 2), np.sin(theta / 2))
    if kind == "CZ":
        return np.diag([1.0, 1.0, 1.0, -1.0])
    if kind == "CX":
        return _controlled(X)
    if kind in _CONTROLLED_TARGET:
        return _controlled(_rotation(_CONTROLLED_TARGET[kind], theta))
    P = generator(kind, pauli)
    if P is None:
        raise ValueError(f"unknown gate kind {kind!r}")
    return _rotation(P, theta)


def derivative(kind: str, theta: float = 0.0, pauli: str = "") -> np.ndarray:
    """d/dtheta of :func:`matrix`."""
    if kind in _CONTROLLED_TARGET:
        return _controlled(_rotation_derivative(_CONTROLLED_TARGET[kind], theta), ident=False)
    P = generator(kind, pauli)
    if P is None:
        raise ValueError(f"{kind} has no parameter")
    return _rotation_derivative(P, theta)


@lru_cache(maxsize=None)
def _tangent(kind: str, pauli: str) -> np.ndarray:
    if kind in _CONTROLLED_TARGET:
        out = _controlled(_maybe_real(-0.5j * _CONTROLLED_TARGET[kind]), ident=False)
    else:
        P = generator(kind, pauli)
        if P is None:
            raise ValueError(f"{kind} has no parameter")
        out = _maybe_real(-0.5j * P)
    out.setflags(write=False)
    return out


def tangent(kind: str, pauli: str = "") -> np.ndarray:
    """The angle-independent T with d/dtheta U(theta) = T @ U(theta).

    T = -(i/2) P for rotations and |1><1| (x) -(i/2) P for controlled
    rotations.  For the pool kinds T is real and antisymmetric.
    """
    return _tangent(kind, pauli)
