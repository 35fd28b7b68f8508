"""Exact gradients of a loss with respect to circuit parameters.

Two independent routes are provided:

* ``method="shift"`` evaluates shifted circuits.  Rotations exp(-i t P / 2)
  with P**2 = I use dq/dt = (q(t + pi/2) - q(t - pi/2)) / 2.  Controlled
  rotations are rewritten as R(t/2) CX R(-t/2) CX on the target and
  differentiated through both half-angle rotations.
* ``method="adjoint"`` back-propagates the loss cotangent through the gate
  list, carrying the state and the cotangent together.  Training uses this.

Both give the same numbers to machine precision; the tests hold them to it.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .circuit import Circuit, GateInstance
from .losses import LossEval, LossKind
from .pool import OperatorPool, PoolOperator
from .statevector import apply_matrix, born_probabilities, simulate
from . import gates

SHIFT = np.pi / 2


class QFloorWarning(RuntimeWarning):
    """Model probability fell below the floor inside the target's support."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BORNFORGE_THREADS", "1")))
    except ValueError:
        return 1


def _check_theta(circuit: Circuit, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got {theta.shape}")
    return theta


def _warn_if_floored(ev: LossEval):
    if ev.floored:
        warnings.warn("model probability below q_floor inside target support; gradient uses floored q",
                      QFloorWarning, stacklevel=3)


# --- adjoint route --------------------------------------------------------

def _adjoint(circuit: Circuit, theta: np.ndarray, psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    # dU/dt = T U, so the contribution of gate k is 2 Re <phi_k| T psi_k> with
    # both vectors taken right after gate k.
    n = circuit.n_qubits
    grad = np.zeros(circuit.n_params)
    pair = np.stack([psi, phi])
    for g in reversed(circuit.gates):
        if g.slot is not None:
            tpsi = apply_matrix(pair[0], gates.tangent(g.kind, g.pauli), g.qubits, n)
            grad[g.slot] += 2.0 * np.vdot(pair[1], tpsi).real
            u = g.matrix(theta[g.slot])
        else:
            u = g.matrix()
        pair = apply_matrix(pair, u.conj().T, g.qubits, n)
    return grad


def loss_and_gradient(circuit: Circuit, theta, target, loss: LossKind) -> tuple[LossEval, np.ndarray]:
    """Loss evaluation (value, dL/dq, floor flag) and dL/dtheta in one pass."""
    theta = _check_theta(circuit, theta)
    psi = simulate(circuit, theta)
    ev = loss.evaluate(target, born_probabilities(psi))
    return ev, _adjoint(circuit, theta, psi, ev.dq * psi)


# --- parameter-shift route ------------------------------------------------

def _run_with(circuit: Circuit, theta: np.ndarray, index: int, replacement) -> np.ndarray:
    """Simulate with gate ``index`` replaced by a list of (matrix, qubits)."""
    n = circuit.n_qubits
    psi = np.zeros(2**n)
    psi[0] = 1.0
    for k, g in enumerate(circuit.gates):
        if k == index:
            for mat, qubits in replacement:
                psi = apply_matrix(psi, mat, qubits, n)
        else:
            t = theta[g.slot] if g.slot is not None else 0.0
            psi = apply_matrix(psi, g.matrix(t), g.qubits, n)
    return psi


def _controlled_sequence(g: GateInstance, a: float, b: float):
    """Target rotation R(a) CX R(b) CX as an application-ordered list."""
    rot = {"CRY": "RY", "CRZ": "RZ"}[g.kind]
    cx = gates.matrix("CX")
    ctrl, tgt = g.qubits
    return [(cx, (ctrl, tgt)), (gates.matrix(rot, b), (tgt,)),
            (cx, (ctrl, tgt)), (gates.matrix(rot, a), (tgt,))]


def gate_probability_derivative(circuit: Circuit, theta: np.ndarray, index: int) -> np.ndarray:
    """dq/d(angle of gate ``index``) by parameter shifts."""
    g = circuit.gates[index]
    t = theta[g.slot]

    def q_of(repl):
        return born_probabilities(_run_with(circuit, theta, index, repl))

    if g.kind in ("CRY", "CRZ"):
        a, b = t / 2, -t / 2
        d_a = 0.5 * (q_of(_controlled_sequence(g, a + SHIFT, b)) - q_of(_controlled_sequence(g, a - SHIFT, b)))
        d_b = 0.5 * (q_of(_controlled_sequence(g, a, b + SHIFT)) - q_of(_controlled_sequence(g, a, b - SHIFT)))
        return 0.5 * d_a - 0.5 * d_b
    plus = q_of([(g.matrix(t + SHIFT), g.qubits)])
    minus = q_of([(g.matrix(t - SHIFT), g.qubits)])
    return 0.5 * (plus - minus)


def loss_gradient(circuit: Circuit, theta, target, loss: LossKind, method: str = "adjoint") -> np.ndarray:
    """dL/dtheta for every parameter slot."""
    theta = _check_theta(circuit, theta)
    if method == "adjoint":
        ev, grad = loss_and_gradient(circuit, theta, target, loss)
        _warn_if_floored(ev)
        return grad
    if method != "shift":
        raise ValueError(f"unknown gradient method {method!r}")
    q = born_probabilities(simulate(circuit, theta))
    ev = loss.evaluate(target, q)
    _warn_if_floored(ev)
    grad = np.zeros(circuit.n_params)
    for k, g in enumerate(circuit.gates):
        if g.slot is not None:
            grad[g.slot] += ev.dq @ gate_probability_derivative(circuit, theta, k)
    return grad


# --- candidate scoring ----------------------------------------------------

def _candidate_from_state(psi: np.ndarray, n: int, op: PoolOperator, ev: LossEval, method: str) -> float:
    g = op.to_gate(0)
    if method == "generator":
        dpsi = apply_matrix(psi, gates.tangent(g.kind, g.pauli), g.qubits, n)
        return float(2.0 * np.vdot(ev.dq * psi, dpsi).real)
    if g.kind in ("CRY", "CRZ"):
        def q_of(a, b):
            out = psi
            for mat, qubits in _controlled_sequence(g, a, b):
                out = apply_matrix(out, mat, qubits, n)
            return born_probabilities(out)
        d_a = 0.5 * (q_of(SHIFT, 0.0) - q_of(-SHIFT, 0.0))
        d_b = 0.5 * (q_of(0.0, SHIFT) - q_of(0.0, -SHIFT))
        dq = 0.5 * d_a - 0.5 * d_b
    else:
        plus = born_probabilities(apply_matrix(psi, g.matrix(SHIFT), g.qubits, n))
        minus = born_probabilities(apply_matrix(psi, g.matrix(-SHIFT), g.qubits, n))
        dq = 0.5 * (plus - minus)
    return float(ev.dq @ dq)


def pool_gradients(circuit: Circuit, theta, pool: OperatorPool | list, target, loss: LossKind,
                   method: str = "generator", psi: np.ndarray | None = None) -> np.ndarray:
    """dL/dt for each pool operator appended at t = 0.

    The unshifted state and dL/dq are computed once and shared.  ``method``
    is ``"generator"`` (one derivative application per operator) or
    ``"shift"`` (shifted evaluations).
    """
    theta = _check_theta(circuit, theta)
    n = circuit.n_qubits
    if psi is None:
        psi = simulate(circuit, theta)
    ev = loss.evaluate(target, born_probabilities(psi))
    ops = list(pool)

    def score(op):
        return _candidate_from_state(psi, n, op, ev, method)

    workers = _threads()
    if workers > 1 and len(ops) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            out = list(ex.map(score, ops))
    else:
        out = [score(op) for op in ops]
    return np.array(out)


def candidate_gradient(circuit: Circuit, theta, op: PoolOperator, target, loss: LossKind,
                       method: str = "generator") -> float:
    """dL/dt of ``op`` appended to the circuit at t = 0."""
    if max(op.qubits) >= circuit.n_qubits:
        raise IndexError(f"{op} does not fit a {circuit.n_qubits}-qubit circuit")
    return float(pool_gradients(circuit, theta, [op], target, loss, method)[0])
