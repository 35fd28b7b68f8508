"""Error bounds for approximately loaded distributions.

* Total variation and the Pinsker bound sqrt(KL / 2).
* LCU coefficient loading: a learned q in place of p = |alpha_j| / alpha
  perturbs the block-encoded Hamiltonian by at most 2 tv(p, q) <= sqrt(2 delta)
  in spectral norm, hence the time evolution by at most sqrt(2 delta) alpha t.
* Expectation values: |E_p f - E_q f| <= sqrt(2 delta) ||f||_2.

The LCU chain is checked with dense matrices, which is only meant for small
verification instances.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .data import PdfSpec
from .gates import pauli_matrix
from .losses import kl_divergence

TOL = 1e-10
TV_MAX = 1.0


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return p, q


def tv_distance(p, q) -> float:
    p, q = _pair(p, q)
    return 0.5 * float(np.abs(p - q).sum())


def pinsker_bound(p, q) -> float:
    """sqrt(KL(p || q) / 2), with KL finite thanks to the q floor."""
    p, q = _pair(p, q)
    return math.sqrt(max(kl_divergence(p, q), 0.0) / 2)


def _nonneg(**kw):
    for k, v in kw.items():
        if v < 0:
            raise ValueError(f"{k} must be nonnegative")


def ham_sim_error_bound(delta: float, alpha: float, t: float) -> float:
    """sqrt(2 delta) alpha t."""
    _nonneg(delta=delta, alpha=alpha, t=t)
    return math.sqrt(2 * delta) * alpha * t


def required_kl(eps: float, alpha: float, t: float) -> float:
    """Largest KL error keeping the time-evolution error below ``eps``."""
    _nonneg(eps=eps, alpha=alpha, t=t)
    if alpha * t == 0:
        return math.inf
    return eps**2 / (2 * alpha**2 * t**2)


def expectation_error_bound(delta: float, f) -> float:
    """sqrt(2 delta) ||f||_2."""
    _nonneg(delta=delta)
    return math.sqrt(2 * delta) * float(np.linalg.norm(np.asarray(f, dtype=float)))


def bound_report(delta: float, alpha: float, t: float) -> dict:
    return {
        "kl": delta,
        "alpha": alpha,
        "time": t,
        "hamiltonian_norm_bound": math.sqrt(2 * delta),
        "time_evolution_bound": ham_sim_error_bound(delta, alpha, t),
        "vacuous": math.sqrt(2 * delta) >= 2 * TV_MAX,
    }


# --- LCU verification ---------------------------------------------------------

@dataclass
class LcuSpec:
    """H = sum_j alpha_j V_j with unitary V_j (dense, small)."""

    coefficients: np.ndarray
    unitaries: list = field(default_factory=list)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if len(self.coefficients) != len(self.unitaries) or len(self.unitaries) == 0:
            raise ValueError("need one unitary per coefficient")
        if self.alpha <= 0:
            raise ValueError("all coefficients are zero")
        for v in self.unitaries:
            if abs(np.linalg.norm(v, 2) - 1.0) > TOL or not np.allclose(v.conj().T @ v, np.eye(len(v)), atol=TOL):
                raise ValueError("every V_j must be unitary")

    @property
    def alpha(self) -> float:
        return float(np.abs(self.coefficients).sum())

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.coefficients) / self.alpha

    def signed_unitaries(self) -> list[np.ndarray]:
        """V_j with the coefficient sign absorbed, so H / alpha = sum p_j V_j."""
        return [np.sign(a) * v if a != 0 else v for a, v in zip(self.coefficients, self.unitaries)]

    def hamiltonian(self) -> np.ndarray:
        return sum(a * v for a, v in zip(self.coefficients, self.unitaries))

    def approximate(self, q) -> np.ndarray:
        """H' = sum_j q_j V_j (signed V_j)."""
        q = np.asarray(q, dtype=float)
        if q.shape != self.coefficients.shape:
            raise ValueError("q must have one entry per LCU term")
        return sum(w * v for w, v in zip(q, self.signed_unitaries()))


def random_lcu(rng: np.random.Generator, d: int, n_qubits: int = 2) -> LcuSpec:
    """Random signed coefficients on ``d`` distinct non-identity Pauli strings."""
    labels = ["".join(s) for s in itertools.product("IXYZ", repeat=n_qubits)][1:]
    if not 1 <= d <= len(labels):
        raise ValueError(f"d must be in [1, {len(labels)}]")
    chosen = rng.choice(len(labels), size=d, replace=False)
    coeffs = rng.normal(size=d)
    return LcuSpec(coeffs, [np.asarray(pauli_matrix(labels[k]), dtype=complex) for k in chosen])


def spectral_norm(m) -> float:
    return float(np.linalg.norm(m, 2))


def evolution_gap(h1, h2, t: float) -> float:
    """||exp(i t h1) - exp(i t h2)|| by dense exponentials."""
    return spectral_norm(expm(1j * t * np.asarray(h1)) - expm(1j * t * np.asarray(h2)))


def lcu_chain(spec: LcuSpec, q, t: float) -> dict:
    """Evaluate every link of the LCU loading error chain.

    ``holds`` is True when
    gap <= alpha t ||H/alpha - H'|| <= alpha t 2 tv <= alpha t sqrt(2 delta).
    """
    p = spec.probabilities
    q = np.asarray(q, dtype=float)
    h = spec.hamiltonian()
    h_approx = spec.approximate(q)
    a = spec.alpha
    delta = kl_divergence(p, q)
    op_err = spectral_norm(h / a - h_approx)
    two_tv = 2 * tv_distance(p, q)
    root = math.sqrt(2 * delta)
    gap = evolution_gap(h, a * h_approx, t)
    links = [gap <= abs(t) * a * op_err + TOL, op_err <= two_tv + TOL, two_tv <= root + TOL]
    return {
        "kl": delta,
        "operator_error": op_err,
        "two_tv": two_tv,
        "sqrt_2kl": root,
        "evolution_gap": gap,
        "bound": ham_sim_error_bound(delta, a, abs(t)),
        "holds": all(links),
    }


# --- pricing ------------------------------------------------------------------

@dataclass(frozen=True)
class PayoffSpec:
    """Payoff on an asset grid: ``european_call`` with ``strike``, or ``custom`` values.

    ``grid[x]`` is the asset value of basis state x.
    """

    kind: str
    grid: tuple
    strike: float = 0.0
    values: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.kind == "european_call":
            if self.strike <= 0:
                raise ValueError("strike must be positive")
        elif self.kind == "custom":
            if len(self.values) != len(self.grid):
                raise ValueError("custom payoff needs one value per grid point")
        else:
            raise ValueError(f"unknown payoff kind {self.kind!r}")

    @classmethod
    def call_on(cls, pdf: PdfSpec, strike: float) -> PayoffSpec:
        """European call on the discretization grid of ``pdf``."""
        m = pdf.aux_bits
        grid = (np.arange(2**pdf.n_qubits)[:, None] + np.arange(2**m)[None, :] / 2**m + pdf.a).reshape(-1)
        return cls("european_call", tuple(grid), strike=strike)

    def raw(self) -> np.ndarray:
        if self.kind == "european_call":
            return np.maximum(0.0, np.asarray(self.grid) - self.strike)
        return np.asarray(self.values)

    def normalized(self) -> tuple[np.ndarray, float]:
        """Payoff in [0, 1] and the scale it was divided by.

        Calls are divided by their maximum over the grid.  Custom payoffs must
        already lie in [0, 1].
        """
        f = self.raw()
        if self.kind == "custom":
            if np.any(f < 0) or np.any(f > 1):
                raise ValueError("custom payoff must lie in [0, 1]")
            return f, 1.0
        peak = float(f.max())
        return (f / peak, peak) if peak > 0 else (f, 1.0)


def pricing_demo(model_q, spec: PayoffSpec, target_p) -> dict:
    """Expected normalized payoff under target and model, with the KL bound."""
    p, q = _pair(target_p, model_q)
    if p.size != len(spec.grid):
        raise ValueError("payoff grid and distributions differ in length")
    f, scale = spec.normalized()
    e_p = float(p @ f)
    e_q = float(q @ f)
    delta = kl_divergence(p, q)
    bound = expectation_error_bound(delta, f)
    diff = abs(e_p - e_q)
    if diff > bound + TOL:
        raise ArithmeticError(f"expectation gap {diff:.3e} exceeds bound {bound:.3e}")
    return {
        "expectation_target": e_p,
        "expectation_model": e_q,
        "difference": diff,
        "kl": delta,
        "bound": bound,
        "payoff_scale": scale,
        "vacuous": math.sqrt(2 * delta) >= 2 * TV_MAX,
    }
