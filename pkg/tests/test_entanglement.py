from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bornforge.data import bas_distribution
from bornforge.entanglement import (binary_entropy, concurrence, entanglement_of_formation, eof_from_concurrence,
                                    eof_matrix, mutual_information, mutual_information_matrix, target_state,
                                    von_neumann_entropy)
from bornforge.statevector import reduced_density_2q

from conftest import random_state

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


def _random_density(rng, dim, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_entropy_examples():
    assert von_neumann_entropy(np.outer(BELL, BELL)) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)
    assert von_neumann_entropy(np.eye(2) / 2, base=math.e) == pytest.approx(math.log(2))


def test_entropy_matches_eigen_oracle(rng):
    from scipy.linalg import eigvalsh
    rho = _random_density(rng, 4)
    lam = eigvalsh(rho)
    ref = -sum(x * math.log2(x) for x in lam if x > 1e-12)
    assert von_neumann_entropy(rho) == pytest.approx(ref, abs=1e-12)


def test_entropy_rejects_non_hermitian():
    with pytest.raises(ValueError):
        von_neumann_entropy(np.array([[0.5, 0.3], [0.0, 0.5]]))


def test_qmi_examples():
    rng = np.random.default_rng(1)
    prod = np.kron(np.kron(random_state(rng, 1), random_state(rng, 1)), random_state(rng, 1))
    assert np.allclose(mutual_information_matrix(prod), 0, atol=1e-10)
    assert mutual_information_matrix(BELL)[0, 1] == pytest.approx(2.0, abs=1e-10)
    ghz = np.zeros(8)
    ghz[[0, 7]] = 1 / math.sqrt(2)
    m = mutual_information_matrix(ghz)
    assert np.allclose(m + np.eye(3), 1, atol=1e-10)


def test_concurrence_examples():
    assert concurrence(np.outer(BELL, BELL)) == pytest.approx(1.0, abs=1e-10)
    prod = np.kron([0.6, 0.8], [1 / math.sqrt(2), -1j / math.sqrt(2)])
    assert concurrence(np.outer(prod, prod.conj())) == pytest.approx(0.0, abs=1e-7)
    for p in (0.9, 0.6, 0.2):
        w = p * np.outer(BELL, BELL) + (1 - p) * np.eye(4) / 4
        assert concurrence(w) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


def _concurrence_oracle(rho):
    # non-Hermitian route: sqrt of eigenvalues of rho rho~
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    ev = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy)
    s = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
    return max(0.0, s[0] - s[1] - s[2] - s[3])


def test_concurrence_matches_eigvals_oracle(rng):
    for _ in range(20):
        rho = _random_density(rng, 4, rank=int(rng.integers(1, 5)))
        assert concurrence(rho) == pytest.approx(_concurrence_oracle(rho), abs=1e-6)


def test_concurrence_rejects_non_psd():
    with pytest.raises(ValueError):
        concurrence(np.diag([1.2, -0.2, 0, 0]))


def test_eof_examples():
    assert eof_from_concurrence(1.0) == pytest.approx(1.0)
    assert eof_from_concurrence(0.0) == 0.0
    assert entanglement_of_formation(np.outer(BELL, BELL)) == pytest.approx(1.0, abs=1e-10)
    assert binary_entropy(0.5) == 1.0


def test_eof_monotone_in_concurrence():
    cs = np.linspace(0, 1, 101)
    e = [eof_from_concurrence(c) for c in cs]
    assert all(b >= a for a, b in zip(e, e[1:]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_qmi_bounds_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(rng, 4)
    m = mutual_information_matrix(psi)
    assert np.array_equal(m, m.T)
    assert m.min() >= -1e-10 and m.max() <= 2 + 1e-10
    e = eof_matrix(psi)
    assert np.array_equal(e, e.T)
    for i in range(4):
        for j in range(i + 1, 4):
            c = concurrence(reduced_density_2q(psi, i, j))
            assert (e[i, j] <= 1e-10) == (c <= 1e-10)


def test_pure_two_qubit_qmi_is_twice_entropy(rng):
    psi = random_state(rng, 2)
    rho = np.outer(psi, psi.conj())
    rho_a = rho.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
    assert mutual_information(rho) == pytest.approx(2 * von_neumann_entropy(rho_a), abs=1e-10)


def test_bas4_has_correlation_without_entanglement():
    s = target_state(bas_distribution(4, 4))
    assert np.all(eof_matrix(s) == 0.0)
    assert mutual_information_matrix(s).max() > 0.1


def test_target_state_validation():
    with pytest.raises(ValueError):
        target_state([0.5, 0.6])
