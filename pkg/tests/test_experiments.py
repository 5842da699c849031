import json
import math

import numpy as np
import pytest

from seqwit import experiments as ex
from seqwit.experiments import (
    Explicit,
    InfeasibleProfileError,
    Pandit,
    ScenarioConfig,
    Theta,
    feasibility_frontier,
    reproduce_d_matrix,
    run_scenario,
)
from seqwit.qcore import InitialStateSpec

BELL = InitialStateSpec.bell()


def test_reproduce_d_matrix_matches_golden():
    check = reproduce_d_matrix()
    assert check.passed
    assert check.max_error < ex.GOLDEN_TOL
    assert check.failing_pairs == ex.GOLDEN_FAILING_PAIRS
    np.testing.assert_allclose(check.hundred_d, check.hundred_d.T, atol=1e-12)


def test_pandit_verdict_pattern():
    rep = run_scenario(ScenarioConfig(BELL, 5, 5, Pandit(0.005, 4.0)))
    expected = np.ones((5, 5), dtype=bool)
    for k, l in ex.GOLDEN_FAILING_PAIRS:
        expected[k - 1, l - 1] = False
    np.testing.assert_array_equal(rep.verdicts, expected)
    assert rep.certified


def test_theta_strategy_witnesses_every_pair():
    rep = run_scenario(ScenarioConfig(BELL, 5, 5, Theta(4.0)))
    assert rep.verdicts.all()
    assert rep.certified
    assert rep.max_discrepancy <= ex.AGREEMENT_TOL
    assert rep.config["strategy"]["bigL"] == 2.0


def test_single_pair_bell_value():
    rep = run_scenario(ScenarioConfig(BELL, 1, 1, Explicit((0.3,), (0.7,))))
    assert rep.expectations[0, 0] == pytest.approx(-2 * 0.3 * 0.7, abs=1e-15)
    assert rep.gaps[0, 0] == pytest.approx(0.21, abs=1e-15)


def test_mixed_three_by_six():
    initial = InitialStateSpec.mixed(0.3, 0.8)
    assert initial.transverse_strength == pytest.approx(1.4664242223858, rel=1e-12)
    rep = run_scenario(ScenarioConfig(initial, 3, 6, Theta(4.0)))
    assert rep.verdicts.shape == (3, 6)
    assert rep.verdicts.all() and rep.certified


def test_csv_layout():
    rep = run_scenario(ScenarioConfig(BELL, 2, 3, Pandit(0.005, 4.0), "csv"))
    lines = rep.render().splitlines()
    assert lines[0] == "k,l,lambda_k,gamma_l,gap,expectation,witnessed"
    assert len(lines) == 1 + 6
    first = lines[1].split(",")
    assert first[:2] == ["1", "1"]
    assert float(first[2]) == 0.005
    assert first[-1] in ("true", "false")
    assert [tuple(map(int, ln.split(",")[:2])) for ln in lines[1:]] == [
        (k, l) for k in (1, 2) for l in (1, 2, 3)
    ]


def test_json_fields_and_roundtrip():
    rep = run_scenario(ScenarioConfig(BELL, 3, 2, Theta(4.0, 0.01)))
    data = json.loads(rep.to_json())
    assert set(data) == {"config", "profiles", "gaps", "expectations", "verdicts", "certified", "certification"}
    assert data["config"]["strategy"] == {"name": "theta", "epsilon": 4.0, "theta": 0.01, "bigL": 2.0}
    assert len(data["profiles"]["alice"]) == 3 and len(data["profiles"]["bob"]) == 2
    assert np.shape(data["gaps"]) == (3, 2)
    assert data["certified"] is True


def test_reports_are_deterministic():
    cfg = ScenarioConfig(InitialStateSpec.mixed(0.8, 0.3), 4, 4, Theta(4.0), "csv")
    assert run_scenario(cfg).render() == run_scenario(cfg).render()


def test_thread_count_does_not_change_results(monkeypatch):
    cfg = ScenarioConfig(BELL, 6, 6, Theta(4.0))
    monkeypatch.setenv("SEQWIT_THREADS", "1")
    serial = run_scenario(cfg).to_json()
    monkeypatch.setenv("SEQWIT_THREADS", "4")
    assert run_scenario(cfg).to_json() == serial


def test_infeasible_profile_is_reported():
    with pytest.raises(InfeasibleProfileError) as err:
        run_scenario(ScenarioConfig(BELL, 6, 2, Pandit(0.005, 4.0)))
    assert err.value.side == "alice"
    assert err.value.index == 6


@pytest.mark.parametrize("kwargs", [{"m": 0, "n": 1}, {"m": 1, "n": 0}])
def test_config_rejects_empty_scenarios(kwargs):
    with pytest.raises(ValueError):
        ScenarioConfig(BELL, strategy=Pandit(0.01), **kwargs)


def test_config_rejects_format():
    with pytest.raises(ValueError):
        ScenarioConfig(BELL, 1, 1, Pandit(0.01), "xml")


def test_frontier_small():
    rows = feasibility_frontier(4.0, 2.0, 3)
    assert len(rows) == 9
    first = rows[0]
    assert (first.m, first.n) == (1, 1)
    assert first.min_gap == pytest.approx(first.theta**2, rel=1e-15)
    assert all(r.certified for r in rows)


def test_frontier_gaps_positive():
    rows = feasibility_frontier(4.0, 2.0, 5)
    assert all(r.min_gap > 0 and 0 < r.theta < 1 for r in rows)


def test_frontier_mixed_state():
    initial = InitialStateSpec.mixed(0.3, 0.8, 0.1)
    big_l = 4 * 0.8 * math.sqrt(0.21)
    rows = feasibility_frontier(4.0, big_l, 4, initial)
    assert all(r.min_gap > 0 and r.certified for r in rows)


def test_frontier_rejects_mismatched_strength():
    with pytest.raises(ValueError):
        feasibility_frontier(4.0, 1.0, 2, InitialStateSpec.bell())


def test_frontier_without_state_skips_certification():
    rows = feasibility_frontier(4.0, 1.0, 2)
    assert all(r.certified is None and r.min_gap > 0 for r in rows)
