"""Lambert-W closed form and dual bisection for target-rate allocation.

For a fixed sum-power multiplier ``lam > 0`` each channel's optimal power is

    P_i(lam) = 2 w_i / (lam c^2) * W0(lam c^2 2^T_i / (2 w_i a_i)) - 1 / a_i

clipped to ``[0, cap_i]``, with ``c = ln 2``. A channel is switched off
outright once ``lam >= 2 w_i a_i T_i / c``. The total ``S(lam)`` is
nonincreasing, so the binding multiplier is found by bisection.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConvergenceError, DomainError
from .lambertw import _w0_kernel
from .model import LN2, Problem, Regime, make_allocation

__all__ = [
    "DualState",
    "DualCurvePoint",
    "inactivity_threshold",
    "unclamped_power",
    "clamped_power",
    "total_power",
    "solve",
    "solve_warm",
    "allocate_weighted",
    "dual_curve",
]

MAX_DOUBLINGS = 200
MAX_BISECTIONS = 2000
WARM_RATIO = 1.05

_C2 = LN2 * LN2


@njit(cache=True)
def _unclamped(a, pow2t, w, lam):
    arg = lam * _C2 * pow2t / (2.0 * w * a)
    x = _w0_kernel(arg)
    if x < 0.0:
        return np.nan
    return 2.0 * w / (lam * _C2) * x - 1.0 / a


@njit(cache=True)
def _clamped_powers(a, pow2t, w, caps, thresh, lam, active, out):
    # returns False if any Lambert W evaluation failed
    ok = True
    for i in range(a.shape[0]):
        if not active[i] or lam >= thresh[i]:
            out[i] = 0.0
            continue
        u = _unclamped(a[i], pow2t[i], w[i], lam)
        if np.isnan(u):
            ok = False
            u = 0.0
        out[i] = min(caps[i], max(0.0, u))
    return ok


def inactivity_threshold(a, t, w=1.0):
    """Multiplier value at and above which a channel receives zero power."""
    return 2.0 * w * a * t / LN2


def _check_lam(lam):
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError("lambda", f"dual variable must be finite and > 0 (got {lam})")
    return lam


def _check_channel(a, t, w):
    a, t, w = float(a), float(t), float(w)
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError("gain", f"must be > 0 (got {a})")
    if not (math.isfinite(t) and t >= 0.0):
        raise DomainError("target", f"must be >= 0 (got {t})")
    if not (math.isfinite(w) and w > 0.0):
        raise DomainError("weight", f"must be > 0 (got {w})")
    return a, t, w


def unclamped_power(a, t, lam, w=1.0):
    """Closed-form stationary power before clipping; may be negative."""
    a, t, w = _check_channel(a, t, w)
    lam = _check_lam(lam)
    u = _unclamped(a, 2.0**t, w, lam)
    if math.isnan(u):
        raise ConvergenceError("Lambert W evaluation failed")
    return float(u)


def clamped_power(a, t, lam, w=1.0):
    a, t, w = _check_channel(a, t, w)
    lam = _check_lam(lam)
    if lam >= inactivity_threshold(a, t, w):
        return 0.0
    cap = (2.0**t - 1.0) / a
    return min(cap, max(0.0, unclamped_power(a, t, lam, w)))


class _PowerMap:
    """Evaluates per-channel powers and ``S(lam)`` for one channel set."""

    def __init__(self, channels):
        self.a = np.ascontiguousarray(channels.gains, dtype=float)
        t = channels.targets
        self.w = np.ascontiguousarray(channels.weight_vector, dtype=float)
        self.pow2t = np.exp2(t)
        self.caps = np.ascontiguousarray(channels.caps)
        self.thresh = inactivity_threshold(self.a, t, self.w)
        self.out = np.empty_like(self.a)

    def powers(self, lam, active):
        if not _clamped_powers(self.a, self.pow2t, self.w, self.caps,
                               self.thresh, lam, active, self.out):
            raise ConvergenceError("Lambert W evaluation failed")
        return self.out

    def total(self, lam, active):
        return math.fsum(self.powers(lam, active))


def total_power(channels, lam):
    """``S(lam)``: total power of the clipped closed-form allocation."""
    lam = _check_lam(lam)
    pm = _PowerMap(channels)
    return pm.total(lam, np.ones(channels.n, dtype=bool))


@dataclass
class DualState:
    """Bisection bracket with ``S(lambda_lo) >= P_tot >= S(lambda_hi)``.

    ``active_mask`` drops channels permanently once ``lambda_lo`` reaches
    their inactivity threshold; every later midpoint is above it too.
    """

    lambda_lo: float
    lambda_hi: float
    active_mask: np.ndarray

    def prune(self, thresh):
        np.logical_and(self.active_mask, thresh > self.lambda_lo, out=self.active_mask)


@dataclass(frozen=True)
class DualCurvePoint:
    lam: float
    total_power: float


def _case_a(problem):
    ch = problem.channels
    return make_allocation(ch, ch.caps, 0.0, Regime.CASE_A, objective_value=0.0)


def _bisect(pm, problem, state, prune, bracket_evals):
    """Shrink ``state`` until ``|S(lam) - P_tot| < epsilon``."""
    p_tot, eps = problem.p_tot, problem.epsilon
    iterations = 0
    while True:
        lo, hi = state.lambda_lo, state.lambda_hi
        mid = 0.5 * (lo + hi)
        stalled = not (lo < mid < hi) or hi - lo <= 1e-300 * max(1.0, hi)
        s = pm.total(mid, state.active_mask)
        iterations += 1
        if s > p_tot:
            state.lambda_lo = mid
        else:
            state.lambda_hi = mid
        if abs(s - p_tot) < eps or stalled:
            break
        if iterations >= MAX_BISECTIONS:
            raise ConvergenceError(f"bisection did not converge in {MAX_BISECTIONS} steps")
        if prune:
            state.prune(pm.thresh)

    return make_allocation(
        problem.channels, pm.out, mid, Regime.CASE_B,
        iterations=iterations, doubling_steps=bracket_evals, power_used=s,
    )


def _solve_cold(problem, prune):
    ch = problem.channels
    if problem.p_tot >= ch.caps_sum:
        return _case_a(problem)

    pm = _PowerMap(ch)
    state = DualState(0.0, 1.0, np.ones(ch.n, dtype=bool))
    evals = 1
    while pm.total(state.lambda_hi, state.active_mask) > problem.p_tot:
        if evals > MAX_DOUBLINGS:
            raise ConvergenceError(f"no upper bracket after {MAX_DOUBLINGS} doublings")
        state.lambda_lo = state.lambda_hi
        state.lambda_hi *= 2.0
        evals += 1
        if prune:
            state.prune(pm.thresh)
    return _bisect(pm, problem, state, prune, evals)


def _require_problem(problem):
    if not isinstance(problem, Problem):
        raise DomainError("problem", "expected a Problem")


def solve(problem, *, prune=True):
    """Optimal target-rate allocation for ``problem``.

    Returns the cap allocation with ``lam = 0`` when the budget covers
    every cap (Case A). Otherwise brackets the multiplier by doubling from
    1 and bisects until the total power is within ``problem.epsilon`` of
    the budget (Case B). Channel weights are honoured when present.

    ``prune=False`` disables inactive-channel pruning; the result is
    bit-identical either way.
    """
    _require_problem(problem)
    return _solve_cold(problem, prune)


def allocate_weighted(problem, *, prune=True):
    """Same contract as :func:`solve`, but the instance must carry weights."""
    _require_problem(problem)
    if problem.channels.weights is None:
        raise DomainError("weights", "weighted allocation needs explicit weights")
    return _solve_cold(problem, prune)


def solve_warm(problem, lambda_hint, *, ratio=WARM_RATIO, prune=True):
    """:func:`solve` with the bracket seeded around a previous multiplier.

    Starts from ``[hint / ratio, hint * ratio]`` and widens by doubling
    outward until it brackets the root. A hint of 0 falls back to the cold
    start. ``ratio=2`` gives a bracket about as wide as the cold one once
    the multiplier is of order 1, so the default is much tighter.
    """
    _require_problem(problem)
    hint = float(lambda_hint)
    if not (ratio > 1.0):
        raise DomainError("ratio", f"must be > 1 (got {ratio})")
    if not (math.isfinite(hint) and hint >= 0.0):
        raise DomainError("lambda_hint", f"must be finite and >= 0 (got {lambda_hint})")
    ch = problem.channels
    if hint == 0.0 or problem.p_tot >= ch.caps_sum:
        return _solve_cold(problem, prune)

    pm = _PowerMap(ch)
    p_tot = problem.p_tot
    everyone = np.ones(ch.n, dtype=bool)
    state = DualState(hint / ratio, hint * ratio, everyone.copy())
    evals = 1
    if pm.total(state.lambda_hi, everyone) > p_tot:
        # root above the bracket: walk upward, lo inherits each failed hi
        while pm.total(state.lambda_hi * 2.0, everyone) > p_tot:
            if evals > MAX_DOUBLINGS:
                raise ConvergenceError(f"no upper bracket after {MAX_DOUBLINGS} doublings")
            state.lambda_hi *= 2.0
            evals += 1
        state.lambda_lo = state.lambda_hi
        state.lambda_hi *= 2.0
        evals += 1
    else:
        # S(0+) is the caps sum > P_tot, so halving terminates
        evals += 1
        while pm.total(state.lambda_lo, everyone) < p_tot:
            state.lambda_hi = state.lambda_lo
            state.lambda_lo /= 2.0
            evals += 1
            if evals > 4 * MAX_DOUBLINGS:
                state.lambda_lo = 0.0
                break
    if prune:
        state.prune(pm.thresh)
    return _bisect(pm, problem, state, prune, evals)


def dual_curve(channels, lambda_grid):
    """Sample ``S(lam)`` on an ascending grid of positive multipliers."""
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("lambda_grid", "need a nonempty 1-D grid")
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0.0):
        raise DomainError("lambda_grid", "grid values must be finite and > 0")
    if np.any(np.diff(grid) < 0.0):
        raise DomainError("lambda_grid", "grid must be sorted ascending")
    pm = _PowerMap(channels)
    active = np.ones(channels.n, dtype=bool)
    return [DualCurvePoint(float(lam), pm.total(float(lam), active)) for lam in grid]
