"""Comparison allocators: waterfilling, uniform split, proportional fairness.

All three spend the full budget. Their :class:`~targetrate.model.Allocation`
objective is still the target-rate deviation so results compare directly
with :func:`targetrate.solver.solve`.
"""

import enum
import math

import numpy as np

from .errors import ConvergenceError, DomainError
from .model import LN2, ChannelSet, Regime, make_allocation

__all__ = ["BaselineKind", "waterfill", "uniform", "proportional_fair", "run_baseline"]


class BaselineKind(enum.Enum):
    WATERFILLING = "waterfilling"
    UNIFORM = "uniform"
    PROPORTIONAL_FAIRNESS = "proportional_fairness"


def _check(channels, p_tot):
    if not isinstance(channels, ChannelSet):
        raise DomainError("channels", "expected a ChannelSet")
    p_tot = float(p_tot)
    if not (math.isfinite(p_tot) and p_tot > 0.0):
        raise DomainError("p_tot", f"total power budget must be > 0 (got {p_tot})")
    return p_tot


def water_level(gains, p_tot):
    """Water level ``nu`` with ``sum(max(0, nu - 1/a)) == p_tot``.

    Channels are sorted by floor ``1/a``; the active set is the longest
    prefix whose common level stays above the last floor in it.
    """
    floors = np.sort(1.0 / np.asarray(gains, dtype=float))
    csum = np.cumsum(floors)
    k = np.arange(1, floors.size + 1)
    levels = (p_tot + csum) / k
    m = int(np.nonzero(levels > floors)[0][-1]) + 1
    return (p_tot + math.fsum(floors[:m])) / m


def waterfill(channels, p_tot):
    """Sum-rate maximising allocation ``P_i = max(0, nu - 1/a_i)``."""
    p_tot = _check(channels, p_tot)
    nu = water_level(channels.gains, p_tot)
    powers = np.maximum(0.0, nu - 1.0 / channels.gains)
    # multiplier of the sum-rate problem, d r_i / d P_i on the active set
    return make_allocation(channels, powers, 1.0 / (LN2 * nu), Regime.CASE_B)


def uniform(channels, p_tot):
    p_tot = _check(channels, p_tot)
    powers = np.full(channels.n, p_tot / channels.n)
    return make_allocation(channels, powers, float("nan"), Regime.CASE_B)


def _pf_powers(a, mu, floor):
    # Stationarity of sum ln(ln(1 + a P)): a / (y ln y) = mu with y = 1 + aP.
    # With u = ln ln y this is exp(u) + u = ln(a / mu), convex increasing in
    # u, so Newton started right of the root descends monotonically onto it.
    rhs = np.log(a / mu)
    u = np.where(rhs > 1.0, np.log(np.maximum(rhs, 1.0)), rhs)
    for _ in range(100):
        eu = np.exp(u)
        step = (eu + u - rhs) / (eu + 1.0)
        u = u - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(u))):
            break
    else:
        raise ConvergenceError("proportional-fair Newton solve did not converge")
    return np.maximum(np.expm1(np.exp(u)) / a, floor)


def proportional_fair(channels, p_tot, *, tol=1e-11):
    """Maximise ``sum ln(log2(1 + a_i P_i))`` subject to ``sum P_i = p_tot``.

    Each channel's power at a shared multiplier ``mu`` comes from a 1-D
    Newton solve; ``mu`` itself is found by Newton steps safeguarded by a
    bracket (falling back to log-space bisection). Powers are kept at or
    above ``1e-12 p_tot`` so every rate stays positive.
    """
    p_tot = _check(channels, p_tot)
    a = channels.gains
    floor = 1e-12 * p_tot

    # at P_i = p_tot / N the marginal utilities bracket the common multiplier
    start = np.full(channels.n, p_tot / channels.n)
    y = 1.0 + a * start
    marg = a / (y * np.log(y))
    lo, hi = float(marg.min()), float(marg.max())
    while math.fsum(_pf_powers(a, lo, floor)) < p_tot:
        lo /= 2.0
    while math.fsum(_pf_powers(a, hi, floor)) > p_tot:
        hi *= 2.0

    mu = math.sqrt(lo * hi)
    for iterations in range(1, 400):
        powers = _pf_powers(a, mu, floor)
        s = math.fsum(powers)
        if abs(s - p_tot) <= tol:
            break
        if s > p_tot:
            lo = mu
        else:
            hi = mu
        # d(sum P)/d mu = -sum 1 / (mu^2 (ln y + 1)) over unfloored channels
        ln_y = np.log1p(a * powers)
        slope = -math.fsum(1.0 / (mu * mu * (ln_y + 1.0)))
        nxt = mu - (s - p_tot) / slope
        if not (lo < nxt < hi):
            nxt = math.sqrt(lo * hi)
        if nxt in (lo, hi):
            break
        mu = nxt
    else:
        raise ConvergenceError("proportional-fair multiplier search did not converge")
    return make_allocation(channels, powers, mu, Regime.CASE_B, iterations=iterations)


def run_baseline(kind, channels, p_tot):
    kind = BaselineKind(kind)
    fn = {
        BaselineKind.WATERFILLING: waterfill,
        BaselineKind.UNIFORM: uniform,
        BaselineKind.PROPORTIONAL_FAIRNESS: proportional_fair,
    }[kind]
    return fn(channels, p_tot)
