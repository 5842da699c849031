"""Command-line entry point: ``seqwit <subcommand> [flags]``.

Exit codes: 0 on success, 1 on invalid arguments, 2 when a certification or
golden-value comparison fails.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import experiments as ex
from .measurement import (
    Side,
    SideSharpness,
    luders_channel,
    luders_channel_bruteforce,
    witness_probability_sum,
)
from .qcore import InitialStateSpec, random_density_matrix
from .sequences import (
    SATURATED,
    SequenceParams,
    ThetaSearchError,
    check_theta,
    find_theta,
    pandit_sequence,
    theta_sequence,
)
from .witness import WitnessParams, sample_separable_expectations, witness_expectation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x) -> str:
    return "SATURATED" if x is SATURATED else f"{float(x):.12g}"


def _require(cond: bool, flag: str, msg: str):
    if not cond:
        raise UsageError(f"{flag}: {msg}")


def _initial_from(args) -> InitialStateSpec:
    p1, alpha = getattr(args, "p1", None), getattr(args, "alpha", None)
    p2 = getattr(args, "p2", None)
    state = getattr(args, "state", None)
    if state is None:
        state = "bell" if p1 is None and alpha is None else "mixed"
    if state == "bell":
        _require(p1 is None and alpha is None and p2 is None, "--p1", "only valid with a mixed state")
        return InitialStateSpec.bell()
    _require(p1 is not None, "--p1", "required together with --alpha for a mixed state")
    _require(alpha is not None, "--alpha", "required together with --p1 for a mixed state")
    _require(0.0 < p1 <= 1.0, "--p1", f"must lie in (0, 1], got {p1}")
    _require(0.0 < alpha <= 1.0, "--alpha", f"must lie in (0, 1], got {alpha}")
    p2 = 0.0 if p2 is None else p2
    _require(0.0 <= p2 <= 1.0 - p1 + 1e-12, "--p2", f"must lie in [0, 1 - p1], got {p2}")
    return InitialStateSpec.mixed(alpha, p1, p2, max(0.0, 1.0 - p1 - p2))


def _check_counts(args, *names):
    for name in names:
        _require(getattr(args, name) >= 1, f"--{name}", f"must be at least 1, got {getattr(args, name)}")


def cmd_reproduce(args, out) -> int:
    check = ex.reproduce_d_matrix()
    out.write("100*D =\n")
    for row in check.hundred_d:
        out.write(" ".join(f"{v:10.4f}" for v in row) + "\n")
    pairs = ", ".join(f"({k},{l})" for k, l in sorted(check.failing_pairs))
    out.write(f"non-witnessing pairs: {pairs}\n")
    out.write(f"max |100*D - golden| = {check.max_error:.3e} (tolerance {ex.GOLDEN_TOL:.0e})\n")
    out.write("PASS\n" if check.passed else "FAIL\n")
    return EXIT_OK if check.passed else EXIT_FAILED


def cmd_sequence(args, out) -> int:
    _check_counts(args, "n")
    _require(args.epsilon > 0.0, "--epsilon", f"must be positive, got {args.epsilon}")
    if args.strategy == "pandit":
        _require(args.lambda1 is not None, "--lambda1", "required for the pandit strategy")
        _require(0.0 < args.lambda1 < 1.0, "--lambda1", f"must lie in (0, 1), got {args.lambda1}")
        prof = pandit_sequence(args.lambda1, args.epsilon, args.n)
    else:
        _require(args.theta is not None, "--theta", "required for the theta strategy")
        _require(0.0 < args.theta < 1.0, "--theta", f"must lie in (0, 1), got {args.theta}")
        _require(0.0 < args.bigL <= 2.0, "--bigL", f"must lie in (0, 2], got {args.bigL}")
        prof = theta_sequence(SequenceParams(args.epsilon, args.bigL, args.theta), args.n)
    out.write("k,value\n")
    for k, v in enumerate(prof, start=1):
        out.write(f"{k},{_fmt(v)}\n")
    return EXIT_OK


def cmd_find_theta(args, out) -> int:
    _check_counts(args, "m", "n")
    _require(args.epsilon >= 4.0, "--epsilon", f"must be at least 4, got {args.epsilon}")
    initial = _initial_from(args)
    big_l = initial.transverse_strength
    try:
        theta = find_theta(args.m, args.n, args.epsilon, big_l)
    except ThetaSearchError as err:
        print(f"seqwit: {err}", file=sys.stderr)
        return EXIT_FAILED
    gap = check_theta(theta, args.m, args.n, args.epsilon, big_l)
    rep = ex.run_scenario(ex.ScenarioConfig(initial, args.m, args.n, ex.Theta(args.epsilon, theta)))
    ok = rep.certified and bool(rep.verdicts.all())
    out.write(f"theta = {theta:.12g}\n")
    out.write(f"bigL = {big_l:.12g}\n")
    out.write(f"min_gap = {gap.min_gap:.12g} at pair ({gap.worst_pair[0]},{gap.worst_pair[1]})\n")
    out.write(f"max_expectation = {float(rep.expectations.max()):.12g}\n")
    out.write("certified\n" if ok else "NOT certified\n")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_simulate(args, out) -> int:
    _check_counts(args, "m", "n")
    initial = _initial_from(args)
    if args.strategy == "pandit":
        _require(args.lambda1 is not None, "--lambda1", "required for the pandit strategy")
        _require(0.0 < args.lambda1 < 1.0, "--lambda1", f"must lie in (0, 1), got {args.lambda1}")
        _require(args.epsilon > 0.0, "--epsilon", f"must be positive, got {args.epsilon}")
        strategy = ex.Pandit(args.lambda1, args.epsilon)
    else:
        if args.theta is None:
            _require(args.epsilon >= 4.0, "--epsilon", "the theta search needs epsilon >= 4")
        else:
            _require(0.0 < args.theta < 1.0, "--theta", f"must lie in (0, 1), got {args.theta}")
        strategy = ex.Theta(args.epsilon, args.theta)
    config = ex.ScenarioConfig(initial, args.m, args.n, strategy, args.format)
    try:
        report = ex.run_scenario(config)
    except ex.InfeasibleProfileError as err:
        raise UsageError(f"--{'m' if err.side == 'alice' else 'n'}: {err}") from None
    text = report.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK if report.certified else EXIT_FAILED


def cmd_check(args, out) -> int:
    _check_counts(args, "samples", "trials")
    rng = np.random.default_rng(args.seed)
    results = []

    worst = 0.0
    for _ in range(args.trials):
        rho = random_density_matrix(rng)
        side = Side.ALICE if rng.random() < 0.5 else Side.BOB
        s = SideSharpness(float(rng.random()))
        a = luders_channel(rho, side, s).matrix
        b = luders_channel_bruteforce(rho, side, s).matrix
        worst = max(worst, float(np.max(np.abs(a - b))))
    results.append(("channel equivalence", worst, worst <= 1e-12))

    worst = 0.0
    for _ in range(args.trials):
        rho = random_density_matrix(rng)
        lam, gam = (float(x) for x in rng.random(2))
        lhs = 18.0 * (witness_probability_sum(rho, lam, gam) - 1.0 / 9.0)
        worst = max(worst, abs(lhs - witness_expectation(rho, WitnessParams(lam, gam))))
    results.append(("probability identity", worst, worst <= 1e-12))

    grid = (0.0, 0.25, 0.5, 0.75, 1.0)
    floor = min(
        sample_separable_expectations(WitnessParams(lam, gam), args.samples, args.seed)
        for lam in grid
        for gam in grid
    )
    results.append(("separability floor", floor, floor >= -1e-12))

    for name, value, ok in results:
        out.write(f"{'PASS' if ok else 'FAIL'} {name}: {value:.3e}\n")
    return EXIT_OK if all(ok for _, _, ok in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqwit", description="Sequential entanglement witnessing by independent observer pairs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reproduce-d-matrix", help="recompute the 5x5 difference matrix and compare to golden values")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("sequence", help="print a sharpness schedule")
    p.add_argument("--strategy", choices=("pandit", "theta"), default="pandit")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--epsilon", type=float, default=4.0)
    p.add_argument("--theta", type=float)
    p.add_argument("--bigL", type=float, default=2.0)
    p.add_argument("--n", type=int, default=5)
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("find-theta", help="search and certify theta for an (m, n) scenario")
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--epsilon", type=float, default=4.0)
    p.add_argument("--p1", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--p2", type=float)
    p.set_defaults(func=cmd_find_theta)

    p = sub.add_parser("simulate", help="run a scenario and emit a CSV or JSON report")
    p.add_argument("--state", choices=("bell", "mixed"), default="bell")
    p.add_argument("--p1", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--strategy", choices=("pandit", "theta"), default="theta")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--epsilon", type=float, default=4.0)
    p.add_argument("--theta", type=float)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="run the randomized invariant checks")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as err:
        print(f"seqwit: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"seqwit: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
