from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bornforge.baselines import (MPS_PAULIS, FixedAnsatzSpec, build_mps_circuit, build_structure1,
                                 build_structure2, train_fixed)
from bornforge.data import benchmark_distribution
from bornforge.gradients import loss_gradient
from bornforge.losses import LossKind, kl_divergence
from bornforge.statevector import born_probabilities, simulate

from conftest import dense_state, random_distribution


@pytest.mark.parametrize("build,n,k,count", [
    (build_structure1, 10, 10, 330), (build_structure1, 4, 1, 24), (build_structure1, 5, 0, 15),
    (build_structure2, 10, 5, 100), (build_structure2, 16, 20, 640), (build_structure2, 2, 1, 4),
    (build_mps_circuit, 10, 2, 270), (build_mps_circuit, 16, 3, 675),
])
def test_parameter_counts(build, n, k, count):
    assert build(n, k).n_params == count


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 12), k=st.integers(1, 8))
def test_parameter_formulas(n, k):
    assert build_structure1(n, k).n_params == 3 * n * (k + 1)
    assert build_structure2(n, k).n_params == 2 * k * n
    assert build_mps_circuit(n, k).n_params == 15 * k * (n - 1)


def test_mps_pauli_order():
    assert len(MPS_PAULIS) == 15 and len(set(MPS_PAULIS)) == 15
    assert MPS_PAULIS[:4] == ("XX", "XY", "XZ", "XI") and "II" not in MPS_PAULIS


def test_zero_parameters_are_identity():
    for c in (build_mps_circuit(3, 2), build_structure2(3, 2)):
        psi = simulate(c, np.zeros(c.n_params))
        assert abs(psi[0]) == pytest.approx(1.0)


def test_structure1_ring_edges():
    c = build_structure1(3, 1)
    cz = [g.qubits for g in c.gates if g.kind == "CZ"]
    assert cz == [(0, 1), (1, 2), (2, 0)]
    assert [g.qubits for g in build_structure1(2, 1).gates if g.kind == "CZ"] == [(0, 1)]


def test_builders_match_dense_reference(rng):
    for c in (build_structure1(3, 1), build_structure2(3, 2), build_mps_circuit(3, 1)):
        theta = rng.uniform(-np.pi, np.pi, c.n_params)
        assert np.allclose(simulate(c, theta), dense_state(c, theta), atol=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        FixedAnsatzSpec("structure3", 3, 1)
    with pytest.raises(ValueError):
        FixedAnsatzSpec("mps", 3, 0)
    with pytest.raises(ValueError):
        build_structure1(1, 1)
    s = FixedAnsatzSpec("structure2", 3, 2, seed=4)
    assert np.array_equal(s.initial_theta(6), s.initial_theta(6))


def test_gradient_matches_finite_differences(rng):
    p = random_distribution(rng, 8)
    for c in (build_structure1(3, 1), build_structure2(3, 1), build_mps_circuit(3, 1)):
        theta = rng.uniform(-np.pi, np.pi, c.n_params)
        loss = LossKind()
        f = lambda t: loss.value(p, born_probabilities(simulate(c, t)))
        h = 1e-6
        fd = np.array([(f(theta + h * e) - f(theta - h * e)) / (2 * h) for e in np.eye(c.n_params)])
        for method in ("adjoint", "shift"):
            g = loss_gradient(c, theta, p, loss, method=method)
            assert np.allclose(g, fd, rtol=1e-6, atol=1e-8)


def test_uniform_target_with_structure2():
    c = build_structure2(3, 1)
    _, rep = train_fixed(c, np.full(8, 1 / 8), theta0=np.r_[np.full(3, np.pi / 2), np.zeros(3)], max_epochs=200)
    assert rep.final["kl"] <= 1e-6


def test_lognormal_with_structure2():
    p = benchmark_distribution("lognormal", 3)
    theta, rep = train_fixed(build_structure2(3, 3), p, seed=1)
    assert rep.final["kl"] <= 1e-2
    assert kl_divergence(p, born_probabilities(simulate(build_structure2(3, 3), theta))) == pytest.approx(
        rep.final["kl"])
    assert all(r["iteration"] == 1 for r in rep.history)


def test_train_fixed_validation():
    with pytest.raises(ValueError):
        train_fixed(build_structure2(3, 1), np.full(4, 0.25))
    with pytest.raises(ValueError):
        train_fixed(build_structure2(2, 1), np.full(4, 0.25), lr=0.0)
