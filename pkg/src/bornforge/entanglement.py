"""Two-qubit correlation diagnostics: entropy, mutual information, concurrence, EOF.

All logarithms are base 2.  Target distributions are analysed through the
phase-free state sum_x sqrt(p(x)) |x>.
"""
from __future__ import annotations

import numpy as np

from .statevector import StateVector, reduced_density_2q

EIG_TOL = 1e-12
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10

_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _check_density(rho, dim: int | None = None) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or (dim is not None and rho.shape[0] != dim):
        raise ValueError(f"expected a square density matrix, got shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=HERMITIAN_TOL, rtol=0):
        raise ValueError("density matrix is not Hermitian")
    return rho


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    """-sum lambda log(lambda) over eigenvalues above 1e-12."""
    rho = _check_density(rho)
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > EIG_TOL]
    return float(max(0.0, -np.sum(lam * np.log(lam)) / np.log(base)))


def partial_trace_2q(rho: np.ndarray, keep: int) -> np.ndarray:
    """Single-qubit marginal of a 4x4 matrix; ``keep`` is 0 (left factor) or 1."""
    r = rho.reshape(2, 2, 2, 2)
    return np.einsum("ajbj->ab", r) if keep == 0 else np.einsum("jajb->ab", r)


def mutual_information(rho) -> float:
    rho = _check_density(rho, 4)
    return (von_neumann_entropy(partial_trace_2q(rho, 0)) + von_neumann_entropy(partial_trace_2q(rho, 1))
            - von_neumann_entropy(rho))


def _amplitudes(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.amplitudes
    return np.asarray(state)


def target_state(p) -> np.ndarray:
    """Phase-free amplitude encoding sqrt(p)."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("p must be a normalized probability vector")
    return np.sqrt(p)


def pairwise_matrix(state, metric) -> np.ndarray:
    """Symmetric n x n matrix of ``metric(rho_ij)``, zero diagonal.

    Each unordered pair is evaluated once and mirrored, so symmetry is exact.
    """
    amps = _amplitudes(state)
    n = int(round(np.log2(amps.size)))
    if n < 2:
        raise ValueError("need at least two qubits")
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = metric(reduced_density_2q(amps, i, j))
    return out


def mutual_information_matrix(state) -> np.ndarray:
    return pairwise_matrix(state, mutual_information)


def concurrence(rho) -> float:
    """Wootters concurrence.

    Uses the Hermitian form R = sqrt(sqrt(rho) rho~ sqrt(rho)), whose
    eigenvalues are the square roots of those of rho rho~.
    """
    rho = _check_density(rho, 4)
    lam, vec = np.linalg.eigh(rho)
    if lam.min() < -PSD_TOL:
        raise ValueError(f"density matrix is not positive semidefinite (eigenvalue {lam.min():.3e})")
    sqrt_rho = (vec * np.sqrt(np.clip(lam, 0.0, None))) @ vec.conj().T
    rho_tilde = _YY @ rho.conj() @ _YY
    m = sqrt_rho @ rho_tilde @ sqrt_rho
    ev = np.linalg.eigvalsh((m + m.conj().T) / 2)
    s = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    return float(min(1.0, max(0.0, s[0] - s[1] - s[2] - s[3])))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def eof_from_concurrence(c: float) -> float:
    return binary_entropy((1 + np.sqrt(max(0.0, 1 - c * c))) / 2)


def entanglement_of_formation(rho) -> float:
    return eof_from_concurrence(concurrence(rho))


def eof_matrix(state) -> np.ndarray:
    return pairwise_matrix(state, entanglement_of_formation)
