"""Reproducible scenario runs and report serialisation."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .measurement import Side, SideSharpness, luders_channel
from .qcore import InitialStateSpec, initial_state
from .sequences import (
    SequenceParams,
    SharpnessProfile,
    as_values,
    check_theta,
    find_theta,
    pandit_sequence,
    theta_sequence,
)
from .witness import (
    WitnessParams,
    difference_gap,
    witness_expectation,
    witness_expectation_closed_form,
)

AGREEMENT_TOL = 1e-10

# 100*D for lambda1 = 0.005, epsilon = 4, Bell initial state, m = n = 5, as
# published to four decimals.
GOLDEN_100D = np.array(
    [
        [0.0025, 0.0042, 0.0114, 0.0099, -1.4184],
        [0.0042, 0.0075, 0.0226, 0.0446, -1.9159],
        [0.0114, 0.0226, 0.0802, 0.3049, -1.2054],
        [0.0099, 0.0446, 0.3049, 1.7031, 7.5946],
        [-1.4184, -1.9159, -1.2054, 7.5946, 77.5252],
    ]
)
GOLDEN_TOL = 5e-5
GOLDEN_FAILING_PAIRS = frozenset({(1, 5), (2, 5), (3, 5), (5, 1), (5, 2), (5, 3)})


@dataclass(frozen=True)
class Pandit:
    lambda1: float
    epsilon: float = 4.0
    name: str = field(default="pandit", init=False)


@dataclass(frozen=True)
class Theta:
    """Shared ``lambda_k(theta)`` schedule; ``theta=None`` runs the search."""

    epsilon: float = 4.0
    theta: float | None = None
    name: str = field(default="theta", init=False)


@dataclass(frozen=True)
class Explicit:
    alice: tuple
    bob: tuple
    name: str = field(default="explicit", init=False)


@dataclass(frozen=True)
class ScenarioConfig:
    initial: InitialStateSpec
    m: int
    n: int
    strategy: Pandit | Theta | Explicit
    output_format: str = "json"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be at least 1, got {self.m}")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output_format must be csv or json, got {self.output_format!r}")


class InfeasibleProfileError(ValueError):
    def __init__(self, side: str, index: int, needed: int):
        self.side = side
        self.index = index
        super().__init__(
            f"{side} schedule saturates at index {index} but {needed} observers are needed"
        )


def build_profiles(config: ScenarioConfig) -> tuple[tuple, tuple, dict]:
    """Alice and Bob sharpness values plus the resolved strategy echo."""
    s = config.strategy
    length = max(config.m, config.n)
    if isinstance(s, Explicit):
        alice, bob = as_values(s.alice), as_values(s.bob)
        if len(alice) < config.m or len(bob) < config.n:
            raise ValueError("explicit profiles are shorter than (m, n)")
        return alice[: config.m], bob[: config.n], {"name": s.name, "alice": alice, "bob": bob}
    if isinstance(s, Pandit):
        prof = pandit_sequence(s.lambda1, s.epsilon, length)
        echo = {"name": s.name, "lambda1": s.lambda1, "epsilon": s.epsilon}
    elif isinstance(s, Theta):
        big_l = config.initial.transverse_strength
        theta = s.theta
        if theta is None:
            theta = find_theta(config.m, config.n, s.epsilon, big_l)
        prof = theta_sequence(SequenceParams(s.epsilon, big_l, theta), length)
        echo = {"name": s.name, "epsilon": s.epsilon, "theta": theta, "bigL": big_l}
    else:
        raise TypeError(f"unknown strategy {s!r}")
    _require_feasible(prof, config.m, "alice")
    _require_feasible(prof, config.n, "bob")
    return tuple(prof.numeric(config.m)), tuple(prof.numeric(config.n)), echo


def _require_feasible(prof: SharpnessProfile, needed: int, side: str):
    if not prof.feasible_to(needed):
        raise InfeasibleProfileError(side, prof.first_saturated(), needed)


@dataclass
class ExperimentReport:
    config: dict
    alice: tuple
    bob: tuple
    gaps: np.ndarray
    expectations: np.ndarray
    closed_form: np.ndarray
    verdicts: np.ndarray
    certification: dict

    @property
    def certified(self) -> bool:
        return all(self.certification.values())

    @property
    def max_discrepancy(self) -> float:
        return float(np.max(np.abs(self.expectations - self.closed_form)))

    def failing_pairs(self) -> set[tuple[int, int]]:
        ks, ls = np.nonzero(~self.verdicts)
        return {(int(k) + 1, int(l) + 1) for k, l in zip(ks, ls)}

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "profiles": {"alice": list(self.alice), "bob": list(self.bob)},
            "gaps": self.gaps.tolist(),
            "expectations": self.expectations.tolist(),
            "verdicts": self.verdicts.tolist(),
            "certified": self.certified,
            "certification": dict(self.certification),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "lambda_k", "gamma_l", "gap", "expectation", "witnessed"])
        m, n = self.gaps.shape
        for k in range(m):
            for l in range(n):
                w.writerow(
                    [
                        k + 1,
                        l + 1,
                        _fmt(self.alice[k]),
                        _fmt(self.bob[l]),
                        _fmt(self.gaps[k, l]),
                        _fmt(self.expectations[k, l]),
                        "true" if self.verdicts[k, l] else "false",
                    ]
                )
        return buf.getvalue()

    def render(self, fmt: str | None = None) -> str:
        fmt = fmt or self.config.get("output_format", "json")
        return self.to_csv() if fmt == "csv" else self.to_json()


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SEQWIT_THREADS", "1")))
    except ValueError:
        return 1


def _row(rho0, alice, bob, k, n):
    """Matrix-evolved expectations for Alice ``k`` against Bobs ``1..n``."""
    state = rho0
    for lam in alice[: k - 1]:
        state = luders_channel(state, Side.ALICE, SideSharpness(lam))
    out = np.empty(n)
    for l in range(1, n + 1):
        if l > 1:
            state = luders_channel(state, Side.BOB, SideSharpness(bob[l - 2]))
        out[l - 1] = witness_expectation(state, WitnessParams(alice[k - 1], bob[l - 1]))
    return out


def run_scenario(config: ScenarioConfig) -> ExperimentReport:
    """Evaluate every pair of the scenario three ways and cross-check them.

    Gaps and closed-form expectations come from propagating the initial
    correlators; the reported expectations come from evolving the density
    matrix through the Lüders channels (Alices first, then Bobs).
    """
    alice, bob, echo = build_profiles(config)
    m, n = config.m, config.n
    rho0 = initial_state(config.initial)
    corr = config.initial.correlators()

    gaps = np.empty((m, n))
    closed = np.empty((m, n))
    for k in range(1, m + 1):
        for l in range(1, n + 1):
            gaps[k - 1, l - 1] = difference_gap(corr, alice, bob, k, l)
            closed[k - 1, l - 1] = witness_expectation_closed_form(corr, alice, bob, k, l)

    threads = min(_threads(), m)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(lambda k: _row(rho0, alice, bob, k, n), range(1, m + 1)))
    else:
        rows = [_row(rho0, alice, bob, k, n) for k in range(1, m + 1)]
    expectations = np.vstack(rows)

    verdicts = expectations < 0.0
    certification = {
        "closed_form_matches_matrix": bool(np.all(np.abs(expectations - closed) <= AGREEMENT_TOL)),
        "gap_sign_matches_closed_form": bool(np.array_equal(gaps > 0.0, closed < 0.0)),
        "verdicts_consistent": bool(np.array_equal(verdicts, gaps > 0.0)),
    }
    config_echo = {
        "initial": asdict(config.initial),
        "m": m,
        "n": n,
        "strategy": echo,
        "output_format": config.output_format,
    }
    return ExperimentReport(
        config_echo, alice, bob, gaps, expectations, closed, verdicts, certification
    )


@dataclass
class DMatrixCheck:
    report: ExperimentReport
    hundred_d: np.ndarray
    max_error: float
    failing_pairs: set

    @property
    def passed(self) -> bool:
        return (
            self.max_error <= GOLDEN_TOL
            and self.failing_pairs == GOLDEN_FAILING_PAIRS
            and self.report.certified
        )


def reproduce_d_matrix() -> DMatrixCheck:
    """The 5x5 difference matrix for ``lambda1 = 0.005``, ``epsilon = 4`` on the
    Bell state, compared against :data:`GOLDEN_100D`."""
    config = ScenarioConfig(InitialStateSpec.bell(), 5, 5, Pandit(0.005, 4.0))
    report = run_scenario(config)
    hundred_d = 100.0 * report.gaps
    err = float(np.max(np.abs(hundred_d - GOLDEN_100D)))
    return DMatrixCheck(report, hundred_d, err, report.failing_pairs())


@dataclass(frozen=True)
class FrontierRow:
    m: int
    n: int
    theta: float
    min_gap: float
    certified: bool | None


def feasibility_frontier(
    epsilon: float, bigL: float, max_mn: int, initial: InitialStateSpec | None = None
) -> list[FrontierRow]:
    """Certified theta and its smallest gap for every ``1 <= m, n <= max_mn``.

    When ``initial`` is given (or ``bigL == 2``, meaning the Bell state) each
    row is also confirmed by a full :func:`run_scenario`.
    """
    if initial is None and bigL == 2.0:
        initial = InitialStateSpec.bell()
    if initial is not None and not np.isclose(initial.transverse_strength, bigL, rtol=1e-4, atol=0):
        raise ValueError(
            f"bigL={bigL} does not match the initial state's 4 p1 sqrt(alpha (1 - alpha)) = "
            f"{initial.transverse_strength}"
        )
    rows = []
    for m in range(1, max_mn + 1):
        for n in range(1, max_mn + 1):
            theta = find_theta(m, n, epsilon, bigL)
            gap = check_theta(theta, m, n, epsilon, bigL).min_gap
            certified = None
            if initial is not None:
                rep = run_scenario(ScenarioConfig(initial, m, n, Theta(epsilon, theta)))
                certified = rep.certified and bool(rep.verdicts.all())
            rows.append(FrontierRow(m, n, theta, gap, certified))
    return rows
