"""Independent checks on the closed-form allocator.

Nothing here touches the Lambert W function or the dual curve ``S(lam)``:

* :func:`stationarity_root` solves one channel's stationarity equation by
  plain bisection on the power.
* :func:`projected_gradient_solve` minimises the objective directly with a
  projected (optionally Hessian-scaled) gradient method.
* :func:`certify` evaluates KKT residuals at any candidate allocation.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import (
    LN2,
    Problem,
    Regime,
    make_allocation,
    objective,
    objective_gradient,
    second_derivative,
)

__all__ = [
    "KktReport",
    "OracleWarning",
    "stationarity_root",
    "project_capped_simplex",
    "projected_gradient_solve",
    "certify",
]


class OracleWarning(UserWarning):
    """The iterative oracle stopped before reaching its tolerance."""


def _stationarity(a, t, w, lam, p):
    y = 1.0 + a * p
    return 2.0 * w * (math.log2(y) - t) * a / (y * LN2) + lam


def stationarity_root(a, t, lam, w=1.0):
    """Positive root of one channel's stationarity equation, or 0.

    Solves ``2 w (log2(1 + a P) - t) a / ((1 + a P) ln 2) + lam = 0`` for
    ``P`` in ``(0, cap)`` by bisection to full double precision. The left
    side is increasing there (the objective is convex below the cap), is
    ``lam - 2 w a t / ln 2`` at ``P = 0`` and ``lam`` at the cap, so a root
    exists exactly when ``lam`` is below the inactivity threshold.
    """
    a, t, lam, w = float(a), float(t), float(lam), float(w)
    if not (a > 0.0 and t >= 0.0 and w > 0.0 and math.isfinite(a * t * w)):
        raise DomainError("channel", "need a > 0, t >= 0, w > 0")
    if not (math.isfinite(lam) and lam > 0.0):
        raise DomainError("lambda", f"must be finite and > 0 (got {lam})")
    if _stationarity(a, t, w, lam, 0.0) >= 0.0:
        return 0.0
    lo, hi = 0.0, (2.0**t - 1.0) / a
    while True:
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            return mid
        if _stationarity(a, t, w, lam, mid) < 0.0:
            lo = mid
        else:
            hi = mid


def project_capped_simplex(z, caps, budget, scale=None):
    """Project ``z`` onto ``{0 <= x <= caps, sum(x) <= budget}``.

    The projection is taken in the norm ``sum scale_i (x_i - z_i)**2``
    (Euclidean when ``scale`` is None). The solution is
    ``clip(z - theta / scale, 0, caps)`` with the budget multiplier
    ``theta >= 0`` found by bisection.
    """
    z = np.asarray(z, dtype=float)
    caps = np.asarray(caps, dtype=float)
    h = np.ones_like(z) if scale is None else np.asarray(scale, dtype=float)

    def clip(theta):
        return np.clip(z - theta / h, 0.0, caps)

    x = clip(0.0)
    if math.fsum(x) <= budget:
        return x
    lo, hi = 0.0, float(np.max(h * z))
    while True:
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        if math.fsum(clip(mid)) > budget:
            lo = mid
        else:
            hi = mid
    return clip(hi)


def projected_gradient_solve(problem, step=None, max_iters=200_000, *,
                             scaled=True, tol=1e-10):
    """Minimise the target-rate objective by projected gradient descent.

    The feasible set is ``{0 <= P_i <= cap_i, sum P_i <= P_tot}``.

    With ``scaled=False`` this is textbook projected gradient with a fixed
    ``step`` (default ``1/L``, ``L`` the largest second derivative on the
    box). That is hopelessly slow on badly conditioned instances, so the
    default scales each coordinate by its own second derivative (the
    objective is separable, so this is the exact Hessian) and projects in
    that metric, with Armijo backtracking from ``step`` (default 1).

    Stops when the (scaled) gradient-mapping step is below ``tol`` in power
    units or when the objective stalls. Emits :class:`OracleWarning` with
    the achieved residual if ``max_iters`` runs out first.
    """
    if not isinstance(problem, Problem):
        raise DomainError("problem", "expected a Problem")
    ch = problem.channels
    caps = ch.caps
    budget = problem.p_tot

    lipschitz = float(np.max(second_derivative(ch, np.zeros(ch.n))))
    if step is None:
        step = 1.0 if scaled else 1.0 / lipschitz
    if not step > 0.0:
        raise DomainError("step", f"must be > 0 (got {step})")

    x = project_capped_simplex(np.minimum(caps, budget / ch.n), caps, budget)
    fx = objective(ch, x)
    residual = math.inf
    it = 0
    for it in range(1, max_iters + 1):
        g = objective_gradient(ch, x)
        if scaled:
            h = np.maximum(second_derivative(ch, x), 1e-300)
        else:
            h = np.ones(ch.n)
        mapped = project_capped_simplex(x - g / h, caps, budget, h)
        residual = float(np.max(np.abs(mapped - x)))
        if residual <= tol:
            break

        t = step
        for _ in range(40):
            trial = project_capped_simplex(x - t * g / h, caps, budget, h)
            f_trial = objective(ch, trial)
            if not scaled or f_trial <= fx + 1e-4 * float(g @ (trial - x)):
                break
            t *= 0.5
        if scaled and f_trial >= fx:
            break  # objective flat to rounding: no representable descent left
        x, fx = trial, f_trial
    else:
        warnings.warn(
            OracleWarning(f"projected gradient stopped after {max_iters} iterations "
                          f"with residual {residual:.3e}"),
            stacklevel=2,
        )

    regime = Regime.CASE_A if budget >= ch.caps_sum else Regime.CASE_B
    g = objective_gradient(ch, x)
    interior = (x > 0.0) & (x < caps)
    lam = max(0.0, float(np.median(-g[interior]))) if np.any(interior) else 0.0
    if regime is Regime.CASE_A:
        lam = 0.0
    return make_allocation(ch, x, lam, regime, iterations=it)


@dataclass(frozen=True)
class KktReport:
    """KKT residuals of an allocation.

    ``stationarity_residuals[i]`` is ``|dJ/dP_i + lam|`` on channels with
    positive power and the dual-infeasibility ``max(0, -mu_i)`` on channels
    at zero power, where ``mu_i = lam - 2 w_i a_i T_i / ln 2``. ``mu`` holds
    the multipliers clipped at 0.
    """

    lam: float
    stationarity_residuals: np.ndarray
    mu: np.ndarray
    budget_slackness_gap: float
    nonnegativity_slackness_gap: float
    primal_violation: float
    max_residual: float

    def to_dict(self):
        return {
            "lambda": self.lam,
            "stationarity_residuals": [float(r) for r in self.stationarity_residuals],
            "mu": [float(m) for m in self.mu],
            "budget_slackness_gap": self.budget_slackness_gap,
            "nonnegativity_slackness_gap": self.nonnegativity_slackness_gap,
            "primal_violation": self.primal_violation,
            "max_residual": self.max_residual,
        }


def certify(problem, allocation):
    """Evaluate the KKT conditions of ``problem`` at ``allocation``.

    If the allocation carries no multiplier (NaN) the best nonnegative one
    for the active channels is fitted, so non-dual baselines can be checked
    too.
    """
    ch = problem.channels
    p = np.asarray(allocation.powers, dtype=float)
    if p.shape != (ch.n,):
        raise DomainError("allocation", f"expected {ch.n} powers, got shape {p.shape}")

    g = objective_gradient(ch, p)
    active = p > 0.0
    lam = float(allocation.lam)
    if math.isnan(lam):
        lam = max(0.0, float(np.mean(-g[active]))) if np.any(active) else 0.0

    mu_raw = np.where(active, 0.0, g + lam)
    residuals = np.where(active, np.abs(g + lam), np.maximum(0.0, -mu_raw))
    mu = np.maximum(mu_raw, 0.0)
    used = math.fsum(p)
    budget_gap = abs(lam * (used - problem.p_tot))
    nonneg_gap = float(np.max(np.abs(mu * p)))
    violation = max(0.0, used - problem.p_tot)
    max_res = max(float(np.max(residuals)), budget_gap)
    return KktReport(lam, residuals, mu, budget_gap, nonneg_gap, violation, max_res)
