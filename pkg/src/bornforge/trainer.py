"""Adaptive circuit learning of a Born machine.

Each iteration scores every pool operator by its loss gradient at t = 0,
appends the N_o strongest, then re-optimizes all parameters with ADAM using a
learning rate recomputed every epoch from the gradient norm.  ADAM restarts
from zero moments at each iteration unless ``reset_optimizer`` is off.
Training stops when the strongest pool gradient drops below ``eps1``, or
when an iteration leaves every parameter unchanged; that iteration's
operators are removed again since the next scoring would repeat it.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, resources
from .gradients import loss_and_gradient, pool_gradients
from .losses import LossKind, check_distribution, fisher_rao, kl_divergence
from .optim import LR_FLOOR, AdamState, adam_update, adaptive_learning_rate
from .pool import OperatorPool
from .statevector import born_probabilities, simulate

log = logging.getLogger(__name__)

HISTORY_COLUMNS = ("iteration", "epoch", "loss", "grad_norm", "lr", "n_params", "cumulative_measurements")
APPEND_ORDERS = ("descending", "randomized")


@dataclass
class TrainConfig:
    n_operators: int = 3
    eps1: float = 1e-3
    eps2: float = 5e-3
    alpha: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    max_iterations: int = 200
    max_epochs: int = 500
    loss: LossKind = field(default_factory=LossKind)
    append_order: str = "descending"
    seed: int = 0
    # fresh ADAM moments every iteration; False carries them over and gives
    # the appended slots zero moments
    reset_optimizer: bool = True
    # return to the best point of the iteration and halve the step when the
    # loss rises
    step_control: bool = True

    def __post_init__(self):
        if self.eps1 <= 0 or self.eps2 <= 0 or self.alpha <= 0:
            raise ValueError("eps1, eps2 and alpha must be positive")
        if self.n_operators < 1:
            raise ValueError("n_operators must be at least 1")
        if self.append_order not in APPEND_ORDERS:
            raise ValueError(f"append_order must be one of {APPEND_ORDERS}")


@dataclass
class TrainReport:
    history: list[dict] = field(default_factory=list)
    iterations: list[dict] = field(default_factory=list)
    final: dict = field(default_factory=dict)
    floor_events: int = 0

    def record_epoch(self, **row):
        self.history.append(row)

    @property
    def losses(self) -> np.ndarray:
        return np.array([r["loss"] for r in self.history])

    @property
    def measurements(self) -> int:
        return self.final.get("cumulative_measurements", 0)

    def write_history(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HISTORY_COLUMNS)
            for r in self.history:
                w.writerow([r[c] if isinstance(r[c], int) else repr(float(r[c])) for c in HISTORY_COLUMNS])


def init_ansatz(n: int) -> tuple[Circuit, np.ndarray]:
    """One trainable RY(pi/2) per qubit: the uniform superposition."""
    if n < 1:
        raise ValueError("need at least one qubit")
    c = Circuit(n)
    for q in range(n):
        c.append("RY", (q,))
    return c, np.full(n, np.pi / 2)


def select_top_operators(grads, n_operators: int, order: str = "descending", rng=None) -> list[int]:
    """Indices of the ``n_operators`` largest |gradient|; ties go to the lower index."""
    grads = np.asarray(grads, dtype=float)
    if grads.size == 0:
        raise ValueError("no candidate gradients")
    if n_operators > grads.size:
        raise ValueError(f"cannot select {n_operators} of {grads.size} candidates")
    ranked = np.lexsort((np.arange(grads.size), -np.abs(grads)))[:n_operators]
    if order == "randomized":
        rng = rng if rng is not None else np.random.default_rng()
        ranked = rng.permutation(ranked)
    return [int(i) for i in ranked]


def final_metrics(circuit: Circuit, theta, target, loss: LossKind) -> dict:
    q = born_probabilities(simulate(circuit, theta))
    return {
        "loss": loss.value(target, q),
        "kl": kl_divergence(target, q),
        "fisher_rao": fisher_rao(target, q),
        **resources(circuit),
    }


def optimize_parameters(circuit, theta, target, config: TrainConfig, opt: AdamState, report: TrainReport,
                        iteration: int, measurements: int, lr_fn) -> tuple[np.ndarray, AdamState, int, int, float | None]:
    """Inner ADAM loop shared by the adaptive and fixed-ansatz trainers.

    Every epoch evaluates the gradient (2 measurements per parameter), logs a
    history row and, unless ||g|| < eps2, takes one step.  With
    ``config.step_control`` an epoch whose loss exceeds the best loss of this
    call steps again from the best point with half the previous scale, and the
    best point is what gets returned, so the loss never ends above its start.
    The loop also ends once a step at the learning-rate floor is rejected.
    Returns (theta, opt, measurements, epochs run, loss at theta or None
    when the last step was not evaluated).
    """
    n_params = len(theta)
    epochs = 0
    scale = 1.0
    best = None
    lr = np.inf
    for _ in range(config.max_epochs):
        ev, g = loss_and_gradient(circuit, theta, target, config.loss)
        report.floor_events += ev.floored
        measurements += 2 * n_params
        gn = float(np.linalg.norm(g))
        stalled = False
        if config.step_control and best is not None and ev.value > best[0]:
            # even the smallest allowed step overshoots: nothing left to try
            stalled = lr <= LR_FLOOR
            theta, g, opt = best[1:]
            scale *= 0.5
        else:
            best = (ev.value, theta, g, opt)
        converged = gn < config.eps2
        lr = 0.0 if converged or stalled else max(scale * lr_fn(g), LR_FLOOR)
        report.record_epoch(iteration=iteration, epoch=len(report.history), loss=ev.value, grad_norm=gn,
                            lr=lr, n_params=n_params, cumulative_measurements=measurements)
        epochs += 1
        if converged or stalled:
            break
        theta, opt = adam_update(theta, g, lr, opt, config.beta1, config.beta2, config.adam_eps)
    if config.step_control and best is not None:
        value, theta, _, opt = best
    elif epochs and converged:
        value = ev.value
    else:
        value = None
    return theta, opt, measurements, epochs, value


def train_aclbm(target, pool: OperatorPool, config: TrainConfig | None = None,
                callback=None) -> tuple[Circuit, np.ndarray, TrainReport]:
    """Grow and train a circuit whose Born distribution approximates ``target``."""
    config = config or TrainConfig()
    target = check_distribution(target)
    n = pool.n_qubits
    if target.size != 2**n:
        raise ValueError(f"target has {target.size} entries but the pool acts on {n} qubits")
    rng = np.random.default_rng(config.seed)
    circuit, theta = init_ansatz(n)
    opt = AdamState.zeros(len(theta))
    report = TrainReport()
    measurements = 0
    n_sel = min(config.n_operators, len(pool))

    def lr_fn(g):
        return adaptive_learning_rate(g, n_sel, config.alpha)

    iteration = 0
    stop = "max_iterations"
    while True:
        scores = pool_gradients(circuit, theta, pool, target, config.loss)
        measurements += 2 * len(pool)
        max_g = float(np.max(np.abs(scores)))
        if max_g < config.eps1:
            stop = "eps1"
            break
        if iteration >= config.max_iterations:
            break
        iteration += 1
        chosen = select_top_operators(scores, n_sel, config.append_order, rng)
        previous = circuit.copy(), theta
        for k in chosen:
            circuit.append(pool[k].kind, pool[k].qubits, pool[k].pauli)
        start = np.concatenate([theta, np.zeros(len(chosen))])
        if config.reset_optimizer:
            opt = AdamState.zeros(len(start))
        else:
            opt.extend(len(chosen))
        theta, opt, measurements, epochs, value = optimize_parameters(
            circuit, start, target, config, opt, report, iteration, measurements, lr_fn)
        if np.array_equal(theta, start):
            # nothing moved, so rescoring would pick the same operators again
            circuit, theta = previous
            iteration -= 1
            stop = "stalled"
            break
        if value is None:
            value = config.loss.value(target, born_probabilities(simulate(circuit, theta)))
        info = {
            "iteration": iteration,
            "selected": [[pool[k].kind, list(pool[k].qubits)] for k in chosen],
            "selected_gradients": [float(scores[k]) for k in chosen],
            "max_pool_gradient": max_g,
            "epochs": epochs,
            "loss": value,
            "n_params": len(theta),
        }
        report.iterations.append(info)
        log.info("iteration %d: max|g|=%.3e loss=%.4e params=%d epochs=%d",
                 iteration, max_g, info["loss"], len(theta), epochs)
        if callback is not None:
            callback(info, circuit, theta)

    report.final = final_metrics(circuit, theta, target, config.loss)
    report.final.update(iterations=iteration, stop_reason=stop, final_max_pool_gradient=max_g,
                        cumulative_measurements=measurements, floor_events=report.floor_events)
    return circuit, theta, report
