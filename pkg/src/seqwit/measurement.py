"""Unsharp Pauli POVMs and the outcome-averaged Lüders update.

Each observer picks one of the three Pauli axes uniformly at random. The
sigma_z measurement is always sharp; sigma_x and sigma_y share one sharpness
value. Forgetting both the axis and the outcome, the next observer on the
same side receives the state transformed by :func:`luders_channel`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .qcore import I2, PauliAxis, TwoQubitState, as_matrix, kron, pauli


class Side(enum.Enum):
    ALICE = "alice"
    BOB = "bob"


def lift(op: np.ndarray, side: Side) -> np.ndarray:
    """Embed a single-qubit operator on ``side`` of the pair."""
    return kron(op, I2) if side is Side.ALICE else kron(I2, op)


def _check_sharpness(value: float, name: str = "sharpness"):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class WeakPovm:
    """Two-outcome POVM ``{(I + s P)/2, (I - s P)/2}`` along a Pauli axis."""

    axis: PauliAxis
    sharpness: float

    def __post_init__(self):
        _check_sharpness(self.sharpness)


@dataclass(frozen=True)
class SideSharpness:
    """Sharpness of one observer: ``weak`` for sigma_x and sigma_y, sigma_z sharp."""

    weak: float

    def __post_init__(self):
        _check_sharpness(self.weak, "weak")

    @property
    def quiet(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.weak**2))

    def for_axis(self, axis: PauliAxis) -> float:
        return 1.0 if axis is PauliAxis.Z else self.weak


def povm_elements(p: WeakPovm) -> tuple[np.ndarray, np.ndarray]:
    s = p.sharpness * pauli(p.axis)
    return (I2 + s) / 2.0, (I2 - s) / 2.0


def povm_element_sqrt(axis: PauliAxis, sharpness: float, outcome: int) -> np.ndarray:
    """Positive square root of ``(I +/- s P)/2`` as ``a I +/- b P``."""
    _check_sharpness(sharpness)
    a = 0.5 * (math.sqrt((1.0 + sharpness) / 2.0) + math.sqrt((1.0 - sharpness) / 2.0))
    # sqrt((1+s)/2) - sqrt((1-s)/2) = s / (2a), free of cancellation at small s
    b = sharpness / (4.0 * a)
    sign = 1.0 if outcome == 0 else -1.0
    return a * I2 + sign * b * pauli(axis)


def luders_channel(rho, side: Side, s: SideSharpness) -> TwoQubitState:
    """Closed Pauli-conjugation form of the non-selective update.

    ``(1/6) sum_i [(1 + L_i) rho + (1 - L_i) P_i rho P_i]`` with
    ``L_x = L_y = sqrt(1 - weak^2)`` and ``L_z = 0``.
    """
    m = as_matrix(rho)
    out = np.zeros((4, 4), dtype=complex)
    quiet = s.quiet
    # 1 - quiet without cancellation
    loud = s.weak**2 / (1.0 + quiet)
    for axis in PauliAxis:
        q, lq = (quiet, loud) if axis is not PauliAxis.Z else (0.0, 1.0)
        p = lift(pauli(axis), side)
        out += (1.0 + q) * m + lq * (p @ m @ p)
    return TwoQubitState(out / 6.0)


def luders_channel_bruteforce(rho, side: Side, s: SideSharpness) -> TwoQubitState:
    """Kraus form of the same update, built from explicit POVM square roots."""
    m = as_matrix(rho)
    out = np.zeros((4, 4), dtype=complex)
    for axis in PauliAxis:
        for outcome in (0, 1):
            k = lift(povm_element_sqrt(axis, s.for_axis(axis), outcome), side)
            out += k @ m @ k.conj().T
    return TwoQubitState(out / 3.0)


def evolve(
    rho,
    alice: Sequence[float],
    bob: Sequence[float],
    k: int,
    l: int,
    channel: Callable = luders_channel,
) -> TwoQubitState:
    """State seen by pair ``(k, l)``: the ``k - 1`` earlier Alices act first,
    then the ``l - 1`` earlier Bobs."""
    state = rho if isinstance(rho, TwoQubitState) else TwoQubitState(rho)
    for lam in alice[: k - 1]:
        state = channel(state, Side.ALICE, SideSharpness(lam))
    for gam in bob[: l - 1]:
        state = channel(state, Side.BOB, SideSharpness(gam))
    return state


def joint_outcome_probability(rho, alice: WeakPovm, a: int, bob: WeakPovm, b: int) -> float:
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError("outcomes are 0 or 1")
    e = povm_elements(alice)[a]
    f = povm_elements(bob)[b]
    return float(np.real(np.trace(kron(e, f) @ as_matrix(rho))))


def witness_probability_sum(rho, lam: float, gam: float) -> float:
    """Probability that a uniformly random axis choice on both sides lands in
    one of the three witnessing events: equal sharp sigma_z outcomes, or
    opposite sigma_x outcomes, or opposite sigma_y outcomes."""
    _check_sharpness(lam, "lam")
    _check_sharpness(gam, "gam")
    z = WeakPovm(PauliAxis.Z, 1.0)
    total = joint_outcome_probability(rho, z, 0, z, 0) + joint_outcome_probability(rho, z, 1, z, 1)
    for axis in (PauliAxis.X, PauliAxis.Y):
        pa, pb = WeakPovm(axis, lam), WeakPovm(axis, gam)
        total += joint_outcome_probability(rho, pa, 0, pb, 1)
        total += joint_outcome_probability(rho, pa, 1, pb, 0)
    return total / 9.0
