"""The pair witness ``W = I + Z(x)Z - lam*gam (X(x)X + Y(x)Y)``.

Its expectation can be read from an explicit state, or propagated in closed
form from the initial correlators through the measurement chains, since each
unsharp observer only rescales ``T11``, ``T22`` and ``T33``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import I4, CorrelatorTriple, PauliAxis, as_matrix, kron, pauli
from .sequences import as_values, chain_factors, combine_deficits

__all__ = [
    "CorrelatorTriple",
    "WitnessParams",
    "WitnessReport",
    "witness_matrix",
    "witness_expectation",
    "witness_expectation_closed_form",
    "difference_gap",
    "sample_separable_expectations",
]


@dataclass(frozen=True)
class WitnessParams:
    lam: float
    gam: float

    def __post_init__(self):
        for name in ("lam", "gam"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class WitnessReport:
    """Verdict for pair ``(k, l)`` (1-based); witnessed iff ``expectation < 0``."""

    pair: tuple[int, int]
    expectation: float
    gap: float

    @property
    def witnessed(self) -> bool:
        return self.expectation < 0.0


def _two_body_paulis():
    ops = [kron(pauli(a), pauli(a)) for a in PauliAxis]
    return ops[0], ops[1], ops[2]


def witness_matrix(p: WitnessParams) -> np.ndarray:
    xx, yy, zz = _two_body_paulis()
    return I4 + zz - p.lam * p.gam * (xx + yy)


def witness_expectation(rho, p: WitnessParams) -> float:
    # elementwise contraction keeps the exact zeros of W on |01>, |10>
    w = witness_matrix(p)
    return float(np.real(np.sum(w * as_matrix(rho).T)))


def _pair_factors(alice, bob, k, l):
    a = as_values(alice)
    b = as_values(bob)
    if not 1 <= k <= len(a):
        raise IndexError(f"k={k} outside 1..{len(a)}")
    if not 1 <= l <= len(b):
        raise IndexError(f"l={l} outside 1..{len(b)}")
    t_a, d_a = chain_factors(a, k - 1)
    t_b, d_b = chain_factors(b, l - 1)
    return a[k - 1], b[l - 1], t_a * t_b, combine_deficits(d_a, d_b)


def witness_expectation_closed_form(initial, alice_profile, bob_profile, k: int, l: int) -> float:
    """``<W_kl>`` from the initial correlators without building any state.

    After ``k - 1`` Alices and ``l - 1`` Bobs, ``T11`` and ``T22`` carry the
    factor ``prod (1 + Lambda)/3`` over both chains and ``T33`` carries
    ``prod (1 + 2 Lambda)/3``.
    """
    t11, t22, t33 = initial
    lam, gam, transverse, deficit = _pair_factors(alice_profile, bob_profile, k, l)
    # 1 + t33 * (1 - deficit), regrouped for small deficits
    longitudinal = (1.0 + t33) - t33 * deficit
    return longitudinal - lam * gam * (t11 + t22) * transverse


def difference_gap(initial, alice_profile, bob_profile, k: int, l: int) -> float:
    """Margin ``d_kl = lam_k gam_l - threshold_kl``; positive iff the pair witnesses.

    ``threshold_kl`` solves ``<W_kl> = 0`` for the product of sharpnesses, so
    ``<W_kl> = -(T11 + T22) * transverse * d_kl``.
    """
    t11, t22, t33 = initial
    strength = t11 + t22
    if not strength > 0.0:
        raise ValueError(f"T11 + T22 must be positive for this witness family, got {strength}")
    lam, gam, transverse, deficit = _pair_factors(alice_profile, bob_profile, k, l)
    threshold = ((1.0 + t33) - t33 * deficit) / (strength * transverse)
    return lam * gam - threshold


def difference_matrix(initial, alice_profile, bob_profile, m: int, n: int) -> np.ndarray:
    out = np.empty((m, n))
    for k in range(1, m + 1):
        for l in range(1, n + 1):
            out[k - 1, l - 1] = difference_gap(initial, alice_profile, bob_profile, k, l)
    return out


def random_qubit_kets(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` Haar-random single-qubit pure states, shape ``(size, 2)``."""
    v = rng.normal(size=(size, 2)) + 1j * rng.normal(size=(size, 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_separable_expectations(p: WitnessParams, n_samples: int, seed: int = 0) -> float:
    """Smallest ``<W>`` over ``n_samples`` random pure product states.

    Pure products are the extreme points of the separable set, so this lower
    envelope is the relevant statistic.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    a = random_qubit_kets(rng, n_samples)
    b = random_qubit_kets(rng, n_samples)
    psi = np.einsum("ni,nj->nij", a, b).reshape(n_samples, 4)
    w = witness_matrix(p)
    vals = np.einsum("ni,ij,nj->n", psi.conj(), w, psi).real
    return float(vals.min())
