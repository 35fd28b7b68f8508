from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LR_FLOOR = 1e-6


@dataclass
class AdamState:
    m: np.ndarray = field(default_factory=lambda: np.zeros(0))
    v: np.ndarray = field(default_factory=lambda: np.zeros(0))
    t: int = 0

    @classmethod
    def zeros(cls, size: int) -> AdamState:
        return cls(np.zeros(size), np.zeros(size), 0)

    def extend(self, k: int):
        """Grow by ``k`` parameter slots that start with zero moments."""
        self.m = np.concatenate([self.m, np.zeros(k)])
        self.v = np.concatenate([self.v, np.zeros(k)])


def adam_update(theta, grads, lr: float, state: AdamState, beta1: float = 0.9,
                beta2: float = 0.999, eps: float = 1e-8) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected ADAM step.  Returns new arrays; ``state`` is not mutated."""
    theta = np.asarray(theta, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if not (theta.shape == grads.shape == state.m.shape == state.v.shape):
        raise ValueError("shape mismatch between parameters, gradient and optimizer state")
    t = state.t + 1
    m = beta1 * state.m + (1 - beta1) * grads
    v = beta2 * state.v + (1 - beta2) * grads**2
    m_hat = m / (1 - beta1**t)
    v_hat = v / (1 - beta2**t)
    return theta - lr * m_hat / (np.sqrt(v_hat) + eps), AdamState(m, v, t)


def adaptive_learning_rate(g, n_operators: int, alpha: float) -> float:
    """alpha * ||g||_2 / sqrt(N_o), floored at 1e-6."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return max(alpha * float(np.linalg.norm(g)) / np.sqrt(n_operators), LR_FLOOR)
