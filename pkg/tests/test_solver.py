import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import problems, random_problem
from targetrate.errors import DomainError
from targetrate.model import LN2, ChannelSet, Problem, Regime, objective
from targetrate.oracle import stationarity_root
from targetrate.solver import (
    allocate_weighted,
    clamped_power,
    dual_curve,
    inactivity_threshold,
    solve,
    solve_warm,
    total_power,
    unclamped_power,
)

TABLE_J = {5.0: 9.593, 10.0: 1.789, 15.0: 0.079, 20.0: 0.0, 25.0: 0.0}


@pytest.mark.parametrize("p_tot", sorted(TABLE_J))
def test_default_instance_objective(default_channels, p_tot):
    alloc = solve(Problem(default_channels, p_tot))
    assert alloc.objective == pytest.approx(TABLE_J[p_tot], abs=1e-3)
    assert alloc.power_used == pytest.approx(min(p_tot, 16.75), abs=1e-9)


def test_multiplier_at_ten(default_channels):
    alloc = solve(Problem(default_channels, 10.0))
    assert alloc.regime is Regime.CASE_B
    assert alloc.lam == pytest.approx(0.70177, abs=1e-5)
    assert alloc.iterations <= 60


def test_case_a_returns_caps_exactly(default_channels):
    alloc = solve(Problem(default_channels, 16.75))
    assert alloc.regime is Regime.CASE_A
    assert alloc.lam == 0.0
    assert alloc.objective == 0.0
    assert np.array_equal(alloc.powers, default_channels.caps)


def test_single_channel():
    ch = ChannelSet([1.0], 3.0)
    assert list(solve(Problem(ch, 2.0)).powers) == pytest.approx([2.0], abs=1e-10)
    high = solve(Problem(ch, 20.0))
    assert high.powers[0] == 7.0 and high.objective == 0.0


def test_closed_form_values():
    assert unclamped_power(1.0, 3.0, 6.0 / LN2) == pytest.approx(0.0, abs=1e-12)
    assert unclamped_power(1.0, 3.0, 1.0) == pytest.approx(2.4732198402, abs=1e-9)
    assert unclamped_power(1.0, 3.0, 1e-9) == pytest.approx(7.0, abs=1e-7)
    assert clamped_power(1.0, 3.0, 100.0) == 0.0


def test_threshold_formula():
    assert inactivity_threshold(2.0, 3.0) == pytest.approx(12.0 / LN2)
    assert inactivity_threshold(2.0, 3.0, 0.5) == pytest.approx(6.0 / LN2)


@given(st.floats(0.1, 50.0), st.floats(0.1, 6.0), st.floats(1e-4, 0.999))
def test_closed_form_agrees_with_bisection(a, t, frac):
    lam = frac * inactivity_threshold(a, t)
    p = clamped_power(a, t, lam)
    ref = stationarity_root(a, t, lam)
    assert abs(p - ref) <= 1e-9 * max(1.0, ref)


def test_pruning_is_bit_identical():
    rng = np.random.default_rng(7)
    for _ in range(200):
        prob = random_problem(rng, n_max=32)
        a, b = solve(prob, prune=True), solve(prob, prune=False)
        assert np.array_equal(a.powers, b.powers)
        assert a.lam == b.lam and a.iterations == b.iterations


def test_unit_weights_bit_identical(default_channels):
    prob = Problem(default_channels, 10.0)
    weighted = Problem(default_channels.with_weights(np.ones(8)), 10.0)
    a, b = solve(prob), allocate_weighted(weighted)
    assert np.array_equal(a.powers, b.powers) and a.lam == b.lam


def test_weighted_needs_weights(default_channels):
    with pytest.raises(DomainError, match="weights"):
        allocate_weighted(Problem(default_channels, 10.0))


def test_heavier_weight_pulls_power():
    ch = ChannelSet([2.0, 2.0], 3.0)
    plain = solve(Problem(ch, 2.0)).powers
    tilted = allocate_weighted(Problem(ch.with_weights([4.0, 1.0]), 2.0)).powers
    assert plain[0] == pytest.approx(plain[1], rel=1e-12)
    assert tilted[0] > tilted[1]


@pytest.mark.parametrize("hint_scale", [1e-6, 0.5, 0.99, 1.0, 1.01, 3.0, 1e6])
def test_warm_start_any_hint(default_channels, hint_scale):
    prob = Problem(default_channels, 10.0)
    cold = solve(prob)
    warm = solve_warm(prob, cold.lam * hint_scale)
    assert abs(warm.power_used - 10.0) < prob.epsilon
    np.testing.assert_allclose(warm.powers, cold.powers, atol=1e-8)


def test_warm_start_good_hint_saves_iterations(default_channels):
    prob = Problem(default_channels, 10.0)
    cold = solve(prob)
    warm = solve_warm(prob, cold.lam * 1.001)
    assert warm.iterations < cold.iterations


def test_warm_start_case_a_and_bad_hint(default_channels):
    assert solve_warm(Problem(default_channels, 30.0), 0.5).regime is Regime.CASE_A
    with pytest.raises(DomainError):
        solve_warm(Problem(default_channels, 10.0), -1.0)


def test_dual_curve_is_nonincreasing(default_channels):
    grid = np.logspace(-4, 3, 300)
    pts = dual_curve(default_channels, grid)
    s = np.array([p.total_power for p in pts])
    assert np.all(np.diff(s) <= 0.0)
    assert s[0] == pytest.approx(16.75, rel=1e-3)
    assert s[-1] == 0.0
    assert pts[17].total_power == total_power(default_channels, grid[17])


def test_dual_curve_rejects_unsorted(default_channels):
    with pytest.raises(DomainError):
        dual_curve(default_channels, [1.0, 0.5])


def test_solve_requires_problem(default_channels):
    with pytest.raises(DomainError):
        solve(default_channels)


# ----------------------------------------------------------- invariants


@settings(max_examples=200, deadline=None)
@given(problems())
def test_structural_invariants(prob):
    ch = prob.channels
    alloc = solve(prob)
    assert np.all(alloc.powers >= 0.0)
    assert np.all(alloc.powers <= ch.caps)
    assert np.all(alloc.rates <= ch.targets + 1e-9)
    if prob.p_tot >= ch.caps_sum:
        assert alloc.regime is Regime.CASE_A and alloc.objective == 0.0
    else:
        assert alloc.regime is Regime.CASE_B
        assert abs(math.fsum(alloc.powers) - prob.p_tot) < prob.epsilon
        assert alloc.objective > 0.0
        off = alloc.lam >= inactivity_threshold(ch.gains, ch.targets)
        assert np.all(alloc.powers[off] == 0.0)


@settings(max_examples=100, deadline=None)
@given(problems(), st.floats(0.1, 0.95))
def test_more_budget_never_hurts(prob, shrink):
    small = solve(prob.with_budget(prob.p_tot * shrink))
    big = solve(prob)
    assert big.objective <= small.objective + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 16), st.floats(0.1, 50.0), st.floats(0.1, 6.0), st.floats(0.05, 0.99))
def test_equal_channels_split_evenly(n, a, t, frac):
    ch = ChannelSet([a] * n, t)
    alloc = solve(Problem(ch, ch.caps_sum * frac))
    assert np.ptp(alloc.powers) <= 1e-12 * max(1.0, alloc.powers.max())
