"""Distances between a target distribution p and a model distribution q.

Each loss also exposes ``dL/dq`` so that circuit gradients can be assembled by
the chain rule (see :mod:`bornforge.gradients`).  Logs are natural.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import fftconvolve

Q_FLOOR = 1e-12
MMD_FLOOR = 1e-30
FR_DENOM_FLOOR = 1e-8

LOSS_TAGS = ("KL", "FisherRao", "MMD", "LogMMD")


def _pair(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return p, q


def check_distribution(p, atol: float = 1e-10) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > atol:
        raise ValueError("target must be a nonnegative vector summing to 1")
    return p


def kl_divergence(p, q, q_floor: float = Q_FLOOR) -> float:
    p, q = _pair(p, q)
    s = p > 0
    return float(np.sum(p[s] * np.log(p[s] / np.maximum(q[s], q_floor))))


def bhattacharyya(p, q) -> float:
    p, q = _pair(p, q)
    return float(np.sum(np.sqrt(p * np.clip(q, 0.0, None))))


def fisher_rao(p, q) -> float:
    return float(np.arccos(np.clip(bhattacharyya(p, q), -1.0, 1.0)))


def default_sigmas(n_qubits: int) -> tuple[float, ...]:
    scale = 2.0**n_qubits / 8
    return tuple(s * scale for s in (0.5, 1.0, 2.0, 4.0))


def kernel_profile(size: int, sigmas) -> np.ndarray:
    """k(d) for d = 0..size-1 with K(x, y) = mean_s exp(-|x - y| / (2 s^2))."""
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.size == 0 or np.any(sigmas <= 0):
        raise ValueError("kernel bandwidths must be positive")
    d = np.arange(size, dtype=float)
    return np.mean(np.exp(-d[None, :] / (2 * sigmas[:, None] ** 2)), axis=0)


def kernel_apply(v, sigmas) -> np.ndarray:
    """K @ v for the Toeplitz RBF kernel over basis indices."""
    v = np.asarray(v, dtype=float)
    N = v.size
    k = kernel_profile(N, sigmas)
    if N <= 2048:
        idx = np.arange(N)
        return k[np.abs(idx[:, None] - idx[None, :])] @ v
    full = np.concatenate([k[:0:-1], k])
    return fftconvolve(v, full, mode="full")[N - 1: 2 * N - 1]


def mmd(p, q, sigmas=None, log_form: bool = False, mmd_floor: float = MMD_FLOOR) -> float:
    """Squared MMD by exact expectation; ``log_form`` returns ln(MMD + floor)."""
    p, q = _pair(p, q)
    if sigmas is None:
        sigmas = default_sigmas(int(round(np.log2(p.size))))
    diff = p - q
    val = max(float(diff @ kernel_apply(diff, sigmas)), 0.0)
    return float(np.log(val + mmd_floor)) if log_form else val


class LossEval(NamedTuple):
    value: float
    dq: np.ndarray      # dL/dq(x)
    floored: bool       # q fell below the floor inside the support of p


@dataclass(frozen=True)
class LossKind:
    tag: str = "KL"
    kernel_sigmas: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.tag not in LOSS_TAGS:
            raise ValueError(f"unknown loss {self.tag!r}; expected one of {LOSS_TAGS}")
        if self.kernel_sigmas is not None:
            object.__setattr__(self, "kernel_sigmas", tuple(float(s) for s in self.kernel_sigmas))
            if not self.kernel_sigmas or min(self.kernel_sigmas) <= 0:
                raise ValueError("kernel bandwidths must be nonempty and positive")

    def sigmas(self, size: int):
        return self.kernel_sigmas or default_sigmas(int(round(np.log2(size))))

    def value(self, p, q) -> float:
        if self.tag == "KL":
            return kl_divergence(p, q)
        if self.tag == "FisherRao":
            return fisher_rao(p, q)
        return mmd(p, q, self.sigmas(len(p)), log_form=self.tag == "LogMMD")

    def evaluate(self, p, q) -> LossEval:
        """Loss value together with dL/dq."""
        p, q = _pair(p, q)
        support = p > 0
        qf = np.maximum(q, Q_FLOOR)
        floored = bool(np.any(q[support] < Q_FLOOR))
        if self.tag == "KL":
            dq = np.zeros_like(p)
            dq[support] = -p[support] / qf[support]
            return LossEval(kl_divergence(p, q), dq, floored)
        if self.tag == "FisherRao":
            b = bhattacharyya(p, q)
            value = float(np.arccos(min(b, 1.0)))
            if b > 1 - 1e-12:
                return LossEval(value, np.zeros_like(p), floored)
            denom = max(np.sqrt(1 - b * b), FR_DENOM_FLOOR)
            dq = np.zeros_like(p)
            dq[support] = -0.5 * np.sqrt(p[support] / qf[support]) / denom
            return LossEval(value, dq, floored)
        sig = self.sigmas(len(p))
        diff = q - p
        kd = kernel_apply(diff, sig)
        raw = max(float(diff @ kd), 0.0)
        dq = 2 * kd
        if self.tag == "LogMMD":
            return LossEval(float(np.log(raw + MMD_FLOOR)), dq / (raw + MMD_FLOOR), False)
        return LossEval(raw, dq, False)
