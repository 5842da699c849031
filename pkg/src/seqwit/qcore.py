"""Dense 2x2 / 4x4 operator helpers, Pauli algebra and the initial two-qubit states.

Matrices are plain complex ``numpy`` arrays. The computational basis is ordered
``|00>, |01>, |10>, |11>``, with the first tensor factor belonging to Alice.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


class PauliAxis(enum.Enum):
    X = 1
    Y = 2
    Z = 3


_SIGMA = {
    PauliAxis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliAxis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PauliAxis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(axis: PauliAxis | str | int, printed_sign: bool = False) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis``.

    ``axis`` may be a :class:`PauliAxis`, one of ``"X", "Y", "Z"`` or an index
    1..3. The standard convention puts ``-i`` in the upper-right entry of
    sigma_y; ``printed_sign=True`` flips it to ``+i``. Every quantity in this
    package uses sigma_y quadratically, so the choice never changes a result.
    """
    axis = _as_axis(axis)
    out = _SIGMA[axis].copy()
    if printed_sign and axis is PauliAxis.Y:
        out = out.conj()
    return out


def _as_axis(axis) -> PauliAxis:
    if isinstance(axis, PauliAxis):
        return axis
    if isinstance(axis, str):
        return PauliAxis[axis.upper()]
    return PauliAxis(int(axis))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two single-qubit operators."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"kron expects two 2x2 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def on_alice(op: np.ndarray) -> np.ndarray:
    return kron(op, I2)


def on_bob(op: np.ndarray) -> np.ndarray:
    return kron(I2, op)


class CorrelatorTriple(NamedTuple):
    """Diagonal two-body correlators ``Tr[sigma_i (x) sigma_i rho]``."""

    t11: float
    t22: float
    t33: float


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """A validated 4x4 density matrix.

    The stored array is a read-only copy. Construction fails with
    ``ValueError`` if the matrix is not Hermitian, not unit trace or has an
    eigenvalue below ``-PSD_TOL``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"two-qubit state must be 4x4, got {m.shape}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValueError(f"state is not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"state trace is {tr!r}, expected 1")
        lo = min_eigenvalue(m)
        if lo < -PSD_TOL:
            raise ValueError(f"state is not positive semidefinite (min eigenvalue {lo:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def min_eigenvalue(m: np.ndarray) -> float:
    # eigvalsh only reads one triangle; symmetrise first so tiny asymmetries
    # cannot bias the result
    h = 0.5 * (m + m.conj().T)
    return float(np.linalg.eigvalsh(h)[0])


def as_matrix(rho) -> np.ndarray:
    if isinstance(rho, TwoQubitState):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


@dataclass(frozen=True)
class InitialStateSpec:
    """Initial state family.

    ``family="bell"`` is ``(|01> + |10>)/sqrt(2)``. ``family="mixed"`` is
    ``p1 |psi_a><psi_a| + p2 |01><01| + p3 |10><10|`` with
    ``|psi_a> = sqrt(alpha)|01> + sqrt(1 - alpha)|10>``.
    """

    family: str = "bell"
    alpha: float = 0.5
    p1: float = 1.0
    p2: float = 0.0
    p3: float = 0.0

    def __post_init__(self):
        if self.family not in ("bell", "mixed"):
            raise ValueError(f"unknown state family {self.family!r}")
        if self.family == "bell":
            if (self.alpha, self.p1, self.p2, self.p3) != (0.5, 1.0, 0.0, 0.0):
                raise ValueError("the bell family takes no parameters")
            return
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.p1 > 0.0:
            raise ValueError(f"p1 must be positive, got {self.p1}")
        if self.p2 < 0.0 or self.p3 < 0.0:
            raise ValueError("p2 and p3 must be non-negative")
        total = self.p1 + self.p2 + self.p3
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"p1 + p2 + p3 must equal 1, got {total!r}")

    @classmethod
    def bell(cls) -> "InitialStateSpec":
        return cls("bell")

    @classmethod
    def mixed(cls, alpha: float, p1: float, p2: float = 0.0, p3: float | None = None):
        if p3 is None:
            p3 = 1.0 - p1 - p2
        return cls("mixed", alpha=alpha, p1=p1, p2=p2, p3=p3)

    @property
    def transverse_strength(self) -> float:
        """``T11 + T22`` of the initial state, i.e. ``4 p1 sqrt(alpha (1 - alpha))``."""
        return 4.0 * self.p1 * math.sqrt(self.alpha * (1.0 - self.alpha))

    def correlators(self) -> CorrelatorTriple:
        t = 0.5 * self.transverse_strength
        return CorrelatorTriple(t, t, -1.0)


def basis_ket(bits: str) -> np.ndarray:
    """Computational basis ket, e.g. ``basis_ket("01")``."""
    v = np.zeros(4, dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def projector(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def initial_state(spec: InitialStateSpec) -> TwoQubitState:
    if spec.family == "bell":
        # (I + XX + YY - ZZ)/4 is exact in binary, unlike the outer product of
        # (|01> + |10>)/sqrt(2)
        xx, yy, zz = (kron(pauli(a), pauli(a)) for a in PauliAxis)
        return TwoQubitState((I4 + xx + yy - zz) / 4.0)
    psi = np.sqrt(spec.alpha) * basis_ket("01") + np.sqrt(1.0 - spec.alpha) * basis_ket("10")
    rho = (
        spec.p1 * projector(psi)
        + spec.p2 * projector(basis_ket("01"))
        + spec.p3 * projector(basis_ket("10"))
    )
    return TwoQubitState(rho)


def bell_state() -> TwoQubitState:
    return initial_state(InitialStateSpec.bell())


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(I4 / 4.0)


def correlators(rho) -> CorrelatorTriple:
    m = as_matrix(rho)
    vals = []
    for axis in PauliAxis:
        s = pauli(axis)
        vals.append(float(np.real(np.trace(kron(s, s) @ m))))
    return CorrelatorTriple(*vals)


def random_density_matrix(rng: np.random.Generator, rank: int | None = None) -> TwoQubitState:
    """Random two-qubit state from a complex Ginibre matrix of the given rank."""
    rank = 4 if rank is None else rank
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return TwoQubitState(m / np.trace(m).real)
