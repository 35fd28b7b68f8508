from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bornforge import gates
from bornforge.pool import (Q_MATRIX, OperatorPool, PoolOperator, build_full_pool, build_reduced_pool,
                            conjugated_local_paulis, so4_generator_set)

from conftest import pauli_string


def test_q_matrix_is_unitary():
    assert np.allclose(Q_MATRIX.conj().T @ Q_MATRIX, np.eye(4), atol=1e-15)


def test_so4_generators_real_antisymmetric():
    for g in so4_generator_set():
        assert g.dtype.kind == "f"
        assert np.allclose(g, -g.T, atol=0)


def test_conjugation_reproduces_generators():
    # oracle: products of explicit Pauli strings and the tabulated Q
    Q = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]]) / np.sqrt(2)
    expected = [-0.5j * s * pauli_string(lab) for lab, s in
                [("ZY", 1), ("YI", 1), ("XY", 1), ("IY", 1), ("YZ", -1), ("YX", 1)]]
    locals_ = ["XI", "YI", "ZI", "IX", "IY", "IZ"]
    for lab, exp, ours, conj in zip(locals_, expected, so4_generator_set(), conjugated_local_paulis()):
        direct = 0.5j * Q.conj().T @ pauli_string(lab) @ Q
        assert np.allclose(direct, exp, atol=1e-12)
        assert np.allclose(ours, exp, atol=1e-12)
        assert np.allclose(conj, exp, atol=1e-12)


def test_generators_span_closed_under_commutation():
    gens = so4_generator_set()
    basis = np.stack([g.reshape(-1) for g in gens], axis=1)
    for a in gens:
        for b in gens:
            comm = (a @ b - b @ a).reshape(-1)
            coef, *_ = np.linalg.lstsq(basis, comm, rcond=None)
            assert np.allclose(basis @ coef, comm, atol=1e-12)
    assert np.linalg.matrix_rank(basis) == 6


@settings(max_examples=50, deadline=None)
@given(kind=st.sampled_from(gates.POOL_KINDS), theta=st.floats(-20, 20))
def test_pool_matrices_special_orthogonal(kind, theta):
    m = gates.matrix(kind, theta)
    assert m.dtype.kind == "f"
    assert np.allclose(m.T @ m, np.eye(len(m)), atol=1e-12)
    assert abs(np.linalg.det(m) - 1) < 1e-12


@pytest.mark.parametrize("kind", gates.POOL_KINDS)
def test_pool_matrices_identity_at_zero(kind):
    m = gates.matrix(kind, 0.0)
    assert np.max(np.abs(m - np.eye(len(m)))) <= 1e-15


@pytest.mark.parametrize("n,size", [(2, 8), (4, 40), (10, 280)])
def test_full_pool_size(n, size):
    pool = build_full_pool(n)
    assert len(pool) == size == 3 * n * (n - 1) + n
    assert len(set(pool)) == len(pool)


def test_full_pool_contains_both_orders():
    pool = build_full_pool(3)
    for kind in ("ZY", "XY", "CRY"):
        assert PoolOperator(kind, (0, 2)) in pool.operators
        assert PoolOperator(kind, (2, 0)) in pool.operators


def test_full_pool_needs_two_qubits():
    with pytest.raises(ValueError):
        build_full_pool(1)


def test_pool_json_roundtrip():
    pool = build_full_pool(3)
    assert OperatorPool.from_json(pool.to_json()) == pool


def test_pool_rejects_duplicates_and_bad_ops():
    with pytest.raises(ValueError):
        OperatorPool(2, [PoolOperator("RY", (0,)), PoolOperator("RY", (0,))])
    with pytest.raises(ValueError):
        PoolOperator("ZY", (1, 1))
    with pytest.raises(IndexError):
        OperatorPool(2, [PoolOperator("RY", (2,))])


def test_reduced_pool_r0_is_full(rng):
    pool = build_full_pool(4)
    a = rng.random((4, 4))
    mi = a + a.T
    np.fill_diagonal(mi, 0)
    assert build_reduced_pool(pool, mi, 0.0) == pool


def test_reduced_pool_r1_unique_max():
    pool = build_full_pool(4)
    mi = np.full((4, 4), 0.1)
    np.fill_diagonal(mi, 0)
    mi[1, 3] = mi[3, 1] = 0.9
    red = build_reduced_pool(pool, mi, 1.0)
    two = {(op.kind, op.qubits) for op in red if op.is_two_qubit}
    assert two == {(k, q) for k in ("ZY", "XY", "CRY") for q in [(1, 3), (3, 1)]}
    assert sum(not op.is_two_qubit for op in red) == 4


def test_reduced_pool_all_equal_keeps_all():
    pool = build_full_pool(3)
    mi = np.ones((3, 3))
    for r in (0.3, 1.0):
        assert len(build_reduced_pool(pool, mi, r)) == len(pool)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_reduced_pool_monotone_in_r(seed):
    rng = np.random.default_rng(seed)
    a = rng.random((5, 5))
    mi = a + a.T
    pool = build_full_pool(5)
    sizes = [len(build_reduced_pool(pool, mi, r)) for r in np.linspace(0, 1, 11)]
    assert sizes[0] == len(pool)
    assert all(x >= y for x, y in zip(sizes, sizes[1:]))


def test_reduced_pool_validation():
    pool = build_full_pool(2)
    with pytest.raises(ValueError):
        build_reduced_pool(pool, np.ones((2, 2)), 1.5)
    with pytest.raises(ValueError):
        build_reduced_pool(pool, np.array([[0, 1], [0.5, 0]]), 0.5)
    with pytest.raises(ValueError):
        build_reduced_pool(pool, -np.ones((2, 2)), 0.5)
