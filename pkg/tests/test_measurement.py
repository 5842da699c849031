import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqwit.measurement import (
    Side,
    SideSharpness,
    WeakPovm,
    evolve,
    joint_outcome_probability,
    lift,
    luders_channel,
    luders_channel_bruteforce,
    povm_element_sqrt,
    povm_elements,
    witness_probability_sum,
)
from seqwit.qcore import (
    I2,
    PauliAxis,
    bell_state,
    correlators,
    maximally_mixed,
    pauli,
    random_density_matrix,
)
from seqwit.witness import WitnessParams, witness_expectation

unit = st.floats(0.0, 1.0)
axes = st.sampled_from(list(PauliAxis))
sides = st.sampled_from(list(Side))


def test_povm_examples():
    e0, e1 = povm_elements(WeakPovm(PauliAxis.Z, 1.0))
    np.testing.assert_array_equal(e0, np.diag([1, 0]))
    np.testing.assert_array_equal(e1, np.diag([0, 1]))
    e0, e1 = povm_elements(WeakPovm(PauliAxis.X, 0.0))
    np.testing.assert_array_equal(e0, I2 / 2)
    np.testing.assert_array_equal(e1, I2 / 2)
    e0, _ = povm_elements(WeakPovm(PauliAxis.X, 0.6))
    np.testing.assert_allclose(e0, [[0.5, 0.3], [0.3, 0.5]], atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(axes, unit)
def test_povm_complete_and_positive(axis, s):
    e0, e1 = povm_elements(WeakPovm(axis, s))
    assert np.max(np.abs(e0 + e1 - I2)) <= 1e-14
    assert np.linalg.eigvalsh(e0).min() >= -1e-14
    assert np.linalg.eigvalsh(e1).min() >= -1e-14


@settings(max_examples=100, deadline=None)
@given(axes, unit, st.sampled_from([0, 1]))
def test_closed_form_square_root(axis, s, outcome):
    root = povm_element_sqrt(axis, s, outcome)
    target = povm_elements(WeakPovm(axis, s))[outcome]
    assert np.max(np.abs(root @ root - target)) <= 1e-14
    assert np.linalg.eigvalsh(root).min() >= -1e-15


@pytest.mark.parametrize("bad", [-0.1, 1.1])
def test_sharpness_range(bad):
    with pytest.raises(ValueError):
        WeakPovm(PauliAxis.X, bad)
    with pytest.raises(ValueError):
        SideSharpness(bad)


def test_side_sharpness_keeps_z_sharp():
    s = SideSharpness(0.3)
    assert s.for_axis(PauliAxis.Z) == 1.0
    assert s.for_axis(PauliAxis.X) == s.for_axis(PauliAxis.Y) == 0.3
    assert s.quiet == pytest.approx(math.sqrt(1 - 0.09))


def test_channel_on_bell_with_zero_sharpness():
    out = luders_channel(bell_state(), Side.ALICE, SideSharpness(0.0))
    assert correlators(out) == pytest.approx((2 / 3, 2 / 3, -1.0), abs=1e-15)
    brute = luders_channel_bruteforce(bell_state(), Side.ALICE, SideSharpness(0.0))
    assert correlators(brute) == pytest.approx((2 / 3, 2 / 3, -1.0), abs=1e-15)


def test_sharp_channel_scales_by_one_third(random_state):
    rho = random_state()
    before = np.array(correlators(rho))
    after = np.array(correlators(luders_channel(rho, Side.ALICE, SideSharpness(1.0))))
    np.testing.assert_allclose(after, before / 3, atol=1e-14)


@pytest.mark.parametrize("side", list(Side))
def test_maximally_mixed_is_fixed(side):
    for w in (0.0, 0.4, 1.0):
        out = luders_channel(maximally_mixed(), side, SideSharpness(w))
        np.testing.assert_allclose(out.matrix, np.eye(4) / 4, atol=1e-16)


def test_bell_sharp_bob_both_forms_agree():
    a = luders_channel(bell_state(), Side.BOB, SideSharpness(1.0)).matrix
    b = luders_channel_bruteforce(bell_state(), Side.BOB, SideSharpness(1.0)).matrix
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_channel_forms_agree_on_random_inputs(rng):
    worst = 0.0
    for _ in range(1000):
        rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
        side = Side.ALICE if rng.random() < 0.5 else Side.BOB
        s = SideSharpness(float(rng.random()))
        a = luders_channel(rho, side, s)
        b = luders_channel_bruteforce(rho, side, s)
        worst = max(worst, np.max(np.abs(a.matrix - b.matrix)))
        for out in (a, b):
            assert abs(np.trace(out.matrix).real - 1) <= 1e-12
            assert np.max(np.abs(out.matrix - out.matrix.conj().T)) <= 1e-12
            assert np.linalg.eigvalsh(out.matrix).min() >= -1e-10
    assert worst <= 1e-12


@settings(max_examples=50, deadline=None)
@given(unit, unit, st.integers(0, 2**32 - 1))
def test_sides_commute(wa, wb, seed):
    rho = random_density_matrix(np.random.default_rng(seed))
    sa, sb = SideSharpness(wa), SideSharpness(wb)
    ab = luders_channel(luders_channel(rho, Side.ALICE, sa), Side.BOB, sb).matrix
    ba = luders_channel(luders_channel(rho, Side.BOB, sb), Side.ALICE, sa).matrix
    assert np.max(np.abs(ab - ba)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(unit, sides, st.integers(0, 2**32 - 1))
def test_correlator_factor_structure(w, side, seed):
    rho = random_density_matrix(np.random.default_rng(seed))
    quiet = math.sqrt(1 - w * w)
    t_before = np.array(correlators(rho))
    t_after = np.array(correlators(luders_channel(rho, side, SideSharpness(w))))
    factors = np.array([(1 + quiet) / 3, (1 + quiet) / 3, (1 + 2 * quiet) / 3])
    np.testing.assert_allclose(t_after, factors * t_before, atol=1e-12)


def test_lift_places_operator_on_the_right_factor():
    x = pauli("X")
    np.testing.assert_array_equal(lift(x, Side.ALICE), np.kron(x, I2))
    np.testing.assert_array_equal(lift(x, Side.BOB), np.kron(I2, x))


def test_joint_outcome_probability_examples():
    z = WeakPovm(PauliAxis.Z, 1.0)
    assert joint_outcome_probability(bell_state(), z, 0, z, 0) == pytest.approx(0.0, abs=1e-15)
    assert joint_outcome_probability(bell_state(), z, 0, z, 1) == pytest.approx(0.5, abs=1e-15)
    x = WeakPovm(PauliAxis.X, 0.5)
    assert joint_outcome_probability(bell_state(), x, 0, x, 1) == pytest.approx(0.1875, abs=1e-15)


def test_joint_outcomes_sum_to_one(random_state):
    rho = random_state()
    for axis in PauliAxis:
        a, b = WeakPovm(axis, 0.3), WeakPovm(axis, 0.8)
        total = sum(joint_outcome_probability(rho, a, i, b, j) for i in (0, 1) for j in (0, 1))
        assert total == pytest.approx(1.0, abs=1e-14)


def test_witness_probability_sum_examples(random_state):
    assert witness_probability_sum(bell_state(), 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    for lam, gam in [(0.0, 0.0), (0.3, 0.9), (1.0, 1.0)]:
        assert witness_probability_sum(maximally_mixed(), lam, gam) == pytest.approx(1 / 6, abs=1e-15)
    rho = random_state()
    lhs = 18 * (witness_probability_sum(rho, 0.0, 0.0) - 1 / 9)
    assert lhs == pytest.approx(1 + correlators(rho).t33, abs=1e-13)


def test_probability_identity_random(rng):
    worst = 0.0
    for _ in range(1000):
        rho = random_density_matrix(rng)
        lam, gam = rng.random(2)
        lhs = 18 * (witness_probability_sum(rho, lam, gam) - 1 / 9)
        worst = max(worst, abs(lhs - witness_expectation(rho, WitnessParams(lam, gam))))
    assert worst <= 1e-12


def test_evolve_order_and_counts():
    rho = bell_state()
    alice, bob = (0.2, 0.5, 0.7), (0.3, 0.6)
    st_ = evolve(rho, alice, bob, 3, 2)
    manual = rho
    for lam in alice[:2]:
        manual = luders_channel(manual, Side.ALICE, SideSharpness(lam))
    manual = luders_channel(manual, Side.BOB, SideSharpness(bob[0]))
    np.testing.assert_array_equal(st_.matrix, manual.matrix)
    np.testing.assert_array_equal(evolve(rho, alice, bob, 1, 1).matrix, rho.matrix)
