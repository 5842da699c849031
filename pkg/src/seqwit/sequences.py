"""Sharpness schedules for the Alice and Bob chains.

Two generators are provided: the diagonal-pair schedule driven by a first
sharpness ``lambda1`` and a slack ``epsilon`` (:func:`pandit_sequence`), and the
one-parameter family ``lambda_k(theta)`` (:func:`theta_sequence`) for which a
small enough ``theta`` lets every cross pair witness entanglement. The latter
comes with its small-``theta`` asymptotics and a certified search for ``theta``.

Numerics
--------
Every product ``prod_i (1 + 2 Lambda_i)/3`` enters only through its deficit
``1 - prod``. With ``Lambda = sqrt(1 - lambda^2)`` the per-step deficit is
``2 lambda^2 / (3 (1 + Lambda))`` and deficits are combined in index order as
``d <- d + (1 - d) delta``. This stays accurate when ``lambda`` is far below
the square root of machine epsilon, which is where the search for long chains
ends up.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class Saturation(enum.Enum):
    SATURATED = "saturated"

    def __repr__(self):
        return "SATURATED"


SATURATED = Saturation.SATURATED


@dataclass(frozen=True)
class SharpnessProfile:
    """Ordered sharpness values of one chain.

    Entries are floats in (0, 1) or :data:`SATURATED`; once an entry saturates
    all later ones do too.
    """

    values: tuple

    def __post_init__(self):
        vals = tuple(v if v is SATURATED else float(v) for v in self.values)
        seen = False
        for i, v in enumerate(vals, start=1):
            if v is SATURATED:
                seen = True
            elif seen:
                raise ValueError(f"entry {i} follows a saturated entry")
            elif not 0.0 < v < 1.0:
                raise ValueError(f"entry {i} = {v!r} is outside (0, 1)")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def first_saturated(self) -> int | None:
        """1-based index of the first saturated entry, or None."""
        for i, v in enumerate(self.values, start=1):
            if v is SATURATED:
                return i
        return None

    def feasible_to(self, n: int) -> bool:
        if n > len(self.values):
            return False
        first = self.first_saturated()
        return first is None or first > n

    def numeric(self, n: int | None = None) -> np.ndarray:
        """First ``n`` entries as a float array; raises if any is saturated."""
        n = len(self.values) if n is None else n
        if not self.feasible_to(n):
            raise ValueError(
                f"profile is not feasible to length {n} (first saturated index: "
                f"{self.first_saturated()}, length {len(self.values)})"
            )
        return np.array(self.values[:n], dtype=float)


def as_values(profile) -> tuple:
    """Floats of a profile or plain sequence, checked to lie in (0, 1]."""
    if isinstance(profile, SharpnessProfile):
        return tuple(profile.numeric())
    vals = tuple(float(v) for v in profile)
    for i, v in enumerate(vals, start=1):
        if not 0.0 < v <= 1.0:
            raise ValueError(f"sharpness {i} = {v!r} is outside (0, 1]")
    return vals


def quiet(lam: float) -> float:
    """``sqrt(1 - lam^2)``, the disturbance-free weight of an unsharp measurement."""
    return math.sqrt(max(0.0, 1.0 - lam * lam))


def step_deficit(lam: float) -> float:
    """``1 - (1 + 2 Lambda)/3`` computed without cancellation."""
    return 2.0 * lam * lam / (3.0 * (1.0 + quiet(lam)))


def chain_factors(values: Sequence[float], count: int) -> tuple[float, float]:
    """Propagation factors accumulated over the first ``count`` measurements.

    Returns ``(transverse, deficit)`` where ``transverse`` is
    ``prod_i (1 + Lambda_i)/3`` and ``deficit`` is ``1 - prod_i (1 + 2 Lambda_i)/3``.
    """
    transverse = 1.0
    deficit = 0.0
    for lam in values[:count]:
        transverse *= (1.0 + quiet(lam)) / 3.0
        deficit += (1.0 - deficit) * step_deficit(lam)
    return transverse, deficit


def combine_deficits(d_a: float, d_b: float) -> float:
    """``1 - (1 - d_a)(1 - d_b)``."""
    return d_a + d_b - d_a * d_b


def pandit_sequence(lambda1: float, epsilon: float, n: int) -> SharpnessProfile:
    """Diagonal-pair schedule: each ``lambda_k^2`` sits a factor ``1 + epsilon``
    above the threshold that pair ``(k, k)`` must beat given all earlier
    measurements on both sides."""
    if not 0.0 < lambda1 < 1.0:
        raise ValueError(f"lambda1 must lie in (0, 1), got {lambda1}")
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if n < 1:
        raise ValueError("n must be at least 1")
    vals: list = [lambda1]
    transverse = 1.0
    deficit = 0.0
    while len(vals) < n:
        prev = vals[-1]
        if prev is SATURATED:
            vals.append(SATURATED)
            continue
        transverse *= (1.0 + quiet(prev)) / 3.0
        deficit += (1.0 - deficit) * step_deficit(prev)
        # 1 - prod q_i^2 = d (2 - d) with d = 1 - prod q_i
        lam_sq = (1.0 + epsilon) * deficit * (2.0 - deficit) / (2.0 * transverse**2)
        vals.append(math.sqrt(lam_sq) if lam_sq < 1.0 else SATURATED)
    return SharpnessProfile(tuple(vals))


@dataclass(frozen=True)
class SequenceParams:
    """``epsilon`` slack, ``bigL`` transverse strength of the initial state
    (2 for the Bell state), and optionally ``theta``."""

    epsilon: float
    bigL: float = 2.0
    theta: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.bigL <= 2.0:
            raise ValueError(f"bigL must lie in (0, 2], got {self.bigL}")
        if self.theta is not None and not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")

    def with_theta(self, theta: float) -> "SequenceParams":
        return SequenceParams(self.epsilon, self.bigL, theta)


def theta_recursion(theta: float, epsilon: float, bigL: float, n: int) -> list:
    """Raw ``lambda_k(theta)`` recursion for one chain.

    The Alice and Bob recursions are identical once both start at ``theta``,
    so a single function serves both.
    """
    vals: list = [theta]
    transverse = 1.0
    deficit = 0.0
    while len(vals) < n:
        prev = vals[-1]
        if prev is SATURATED:
            vals.append(SATURATED)
            continue
        transverse *= (1.0 + quiet(prev)) / 3.0
        deficit += (1.0 - deficit) * step_deficit(prev)
        lam = epsilon * deficit / (bigL * theta * transverse)
        vals.append(lam if lam < 1.0 else SATURATED)
    return vals


def theta_sequence(params: SequenceParams, n: int) -> SharpnessProfile:
    if params.theta is None:
        raise ValueError("theta_sequence needs params.theta")
    if n < 1:
        raise ValueError("n must be at least 1")
    return SharpnessProfile(tuple(theta_recursion(params.theta, params.epsilon, params.bigL, n)))


alice_sequence = theta_sequence
bob_sequence = theta_sequence


def _check_asymptotic_regime(epsilon: float, bigL: float):
    if not (0.0 < bigL <= 2.0 < epsilon):
        raise ValueError(f"need 0 < bigL <= 2 < epsilon, got bigL={bigL}, epsilon={epsilon}")


def asymptotic_coefficients(epsilon: float, bigL: float, n: int) -> np.ndarray:
    """Limits ``a_k = lim lambda_k(theta)/theta`` as theta -> 0+, for k = 1..n.

    ``a_1 = 1`` and ``a_k = epsilon/(3 bigL) (3/2)^(k-1) sum_{i<k} a_i^2``.
    """
    _check_asymptotic_regime(epsilon, bigL)
    a = [1.0]
    sq_sum = 0.0
    for k in range(2, n + 1):
        sq_sum += a[-1] ** 2
        a.append(epsilon / (3.0 * bigL) * 1.5 ** (k - 1) * sq_sum)
    return np.array(a[:n])


def threshold_f(theta: float, params: SequenceParams, k: int, l: int) -> float:
    """Threshold ``f_kl(theta)`` that ``lambda_k(theta) gamma_l(theta)`` must exceed."""
    params = params.with_theta(theta)
    prof = theta_sequence(params, max(k, l))
    if not prof.feasible_to(max(k, l)):
        raise ValueError(
            f"sequence saturates at index {prof.first_saturated()} before {max(k, l)}"
        )
    vals = prof.numeric(max(k, l))
    return _threshold(vals, vals, k, l, params.bigL)


def _threshold(alice, bob, k, l, bigL):
    t_a, d_a = chain_factors(alice, k - 1)
    t_b, d_b = chain_factors(bob, l - 1)
    return combine_deficits(d_a, d_b) / (bigL * t_a * t_b)


def gap_grid(values: Sequence[float], m: int, n: int, bigL: float) -> np.ndarray:
    """``lambda_k gamma_l - f_kl`` for all ``k <= m``, ``l <= n`` on a shared profile."""
    vals = list(values)
    t = [1.0]
    d = [0.0]
    for lam in vals[: max(m, n) - 1]:
        t.append(t[-1] * (1.0 + quiet(lam)) / 3.0)
        d.append(d[-1] + (1.0 - d[-1]) * step_deficit(lam))
    out = np.empty((m, n))
    for k in range(m):
        for l in range(n):
            thr = combine_deficits(d[k], d[l]) / (bigL * t[k] * t[l])
            out[k, l] = vals[k] * vals[l] - thr
    return out


def limit_gap_L(epsilon: float, bigL: float, k: int, l: int) -> float:
    """``lim (lambda_k gamma_l - f_kl)(theta) / theta^2`` as theta -> 0+, for k, l >= 2."""
    _check_asymptotic_regime(epsilon, bigL)
    if k < 2 or l < 2:
        raise ValueError("limit_gap_L needs k, l >= 2")
    a = asymptotic_coefficients(epsilon, bigL, max(k, l))
    s_k = float(np.sum(a[: k - 1] ** 2))
    s_l = float(np.sum(a[: l - 1] ** 2))
    pref = 1.5 ** (k + l - 2) / (3.0 * bigL)
    return pref * (epsilon**2 / (3.0 * bigL) * s_k * s_l - (s_k + s_l))


class ThetaSearchError(RuntimeError):
    """No certified theta was found within the halving budget."""


@dataclass(frozen=True)
class GapCheck:
    feasible: bool
    min_gap: float
    worst_pair: tuple[int, int] | None
    saturated_at: int | None = None


def check_theta(theta: float, m: int, n: int, epsilon: float, bigL: float) -> GapCheck:
    """Re-evaluate feasibility and all ``m * n`` gaps at ``theta``."""
    length = max(m, n)
    vals = theta_recursion(theta, epsilon, bigL, length)
    if SATURATED in vals:
        return GapCheck(False, -math.inf, None, vals.index(SATURATED) + 1)
    grid = gap_grid(vals, m, n, bigL)
    k, l = np.unravel_index(int(np.argmin(grid)), grid.shape)
    return GapCheck(True, float(grid[k, l]), (int(k) + 1, int(l) + 1))


def warm_start(m: int, n: int, epsilon: float, bigL: float, cap: float = 0.1) -> float:
    """Initial theta: ``min(cap, 1/(M + 1))`` with ``M = max(a_m, a_n)``."""
    a = asymptotic_coefficients(epsilon, bigL, max(m, n))
    big_m = max(a[m - 1], a[n - 1])
    return float(min(cap, 1.0 / (big_m + 1.0)))


def find_theta(
    m: int,
    n: int,
    epsilon: float = 4.0,
    bigL: float = 2.0,
    theta0: float | None = None,
    max_halvings: int = 200,
) -> float:
    """Find ``theta`` such that every pair ``(k, l)``, ``k <= m``, ``l <= n``,
    witnesses entanglement with the shared ``lambda_k(theta)`` schedule.

    Starts from :func:`warm_start` (or ``theta0``) and halves ``theta`` until
    the length ``max(m, n)`` schedule is unsaturated and all gaps are strictly
    positive. The returned value has been re-checked with :func:`check_theta`.

    Raises
    ------
    ValueError
        If ``m``, ``n``, ``epsilon`` or ``bigL`` are out of range.
    ThetaSearchError
        If ``max_halvings`` halvings do not produce a certified theta.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    if epsilon < 4.0:
        raise ValueError(f"the search is only certified for epsilon >= 4, got {epsilon}")
    if not 0.0 < bigL <= 2.0:
        raise ValueError(f"bigL must lie in (0, 2], got {bigL}")
    theta = warm_start(m, n, epsilon, bigL) if theta0 is None else float(theta0)
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta0 must lie in (0, 1), got {theta}")
    last = None
    for _ in range(max_halvings + 1):
        last = check_theta(theta, m, n, epsilon, bigL)
        if last.feasible and last.min_gap > 0.0:
            return theta
        theta /= 2.0
    theta *= 2.0
    reason = (
        f"schedule saturates at index {last.saturated_at}"
        if not last.feasible
        else f"pair {last.worst_pair} has gap {last.min_gap:.3e}"
    )
    raise ThetaSearchError(
        f"no certified theta for (m, n) = ({m}, {n}), epsilon={epsilon}, bigL={bigL}; "
        f"smallest theta tried {theta:.3e}: {reason}. A valid theta exists in theory, "
        "so this indicates a bug or pathological parameters"
    )

