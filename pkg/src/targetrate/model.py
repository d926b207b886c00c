"""Problem data for target-rate power allocation over parallel channels.

All quantities are linear (not dB). A channel ``i`` has gain-to-noise ratio
``a_i > 0``, target spectral efficiency ``T_i >= 0`` (bits/s/Hz) and an
optional priority weight ``w_i > 0``. Its rate at power ``P`` is
``log2(1 + a_i P)``.
"""

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "LN2",
    "ChannelSet",
    "Problem",
    "Allocation",
    "Regime",
    "rate",
    "cap",
    "objective",
    "objective_gradient",
    "second_derivative",
    "second_derivative_sign",
    "load_problem",
    "problem_from_dict",
    "make_allocation",
]

LN2 = math.log(2.0)

DEFAULT_EPSILON = 1e-10


def _frozen(values, name):
    arr = np.array(values, dtype=float, ndmin=1)
    if arr.ndim != 1:
        raise DomainError(name, "must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise DomainError(name, "must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChannelSet:
    """Per-channel gains, targets and (optional) weights.

    ``targets`` may be a scalar, broadcast to every channel. ``weights`` is
    ``None`` for the unweighted problem; :attr:`weight_vector` always
    returns a concrete array (ones when unweighted).
    """

    gains: np.ndarray
    targets: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        gains = _frozen(self.gains, "gains")
        if gains.size == 0:
            raise DomainError("gains", "need at least one channel")
        targets = np.asarray(self.targets, dtype=float)
        if targets.ndim == 0:
            targets = np.full(gains.size, float(targets))
        targets = _frozen(targets, "targets")
        if targets.size != gains.size:
            raise DomainError("targets", f"length {targets.size} != {gains.size} gains")
        if np.any(gains <= 0.0):
            raise DomainError("gains", "every gain must be > 0")
        if np.any(targets < 0.0):
            raise DomainError("targets", "every target must be >= 0")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "targets", targets)

        if self.weights is not None:
            weights = _frozen(self.weights, "weights")
            if weights.size != gains.size:
                raise DomainError("weights", f"length {weights.size} != {gains.size} gains")
            if np.any(weights <= 0.0):
                raise DomainError("weights", "every weight must be > 0")
            object.__setattr__(self, "weights", weights)

    @property
    def n(self):
        return self.gains.size

    @property
    def weight_vector(self):
        if self.weights is None:
            return np.ones(self.n)
        return self.weights

    @property
    def caps(self):
        """Power that exactly meets each target, ``(2**T - 1) / a``."""
        return (np.exp2(self.targets) - 1.0) / self.gains

    @property
    def caps_sum(self):
        return math.fsum(self.caps)

    def with_gains(self, gains):
        return ChannelSet(gains, self.targets, self.weights)

    def with_weights(self, weights):
        return ChannelSet(self.gains, self.targets, weights)


@dataclass(frozen=True)
class Problem:
    channels: ChannelSet
    p_tot: float
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not isinstance(self.channels, ChannelSet):
            raise DomainError("channels", "expected a ChannelSet")
        p_tot = float(self.p_tot)
        eps = float(self.epsilon)
        if not (math.isfinite(p_tot) and p_tot > 0.0):
            raise DomainError("p_tot", f"total power budget must be > 0 (got {self.p_tot})")
        if not (math.isfinite(eps) and eps > 0.0):
            raise DomainError("epsilon", f"tolerance must be > 0 (got {self.epsilon})")
        object.__setattr__(self, "p_tot", p_tot)
        object.__setattr__(self, "epsilon", eps)

    def with_budget(self, p_tot):
        return Problem(self.channels, p_tot, self.epsilon)


class Regime(enum.Enum):
    CASE_A = "CaseA"  # budget covers every cap; constraint slack
    CASE_B = "CaseB"  # budget binding

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Allocation:
    """Result of an allocator.

    ``lam`` is the sum-power dual variable (0 in Case A). Baselines that are
    not dual methods report NaN. ``iterations`` counts bisection steps and
    ``doubling_steps`` the bracket expansions before them.
    """

    powers: np.ndarray
    rates: np.ndarray
    objective: float
    lam: float
    regime: Regime
    iterations: int = 0
    doubling_steps: int = 0
    power_used: float = field(default=float("nan"))

    def to_dict(self):
        lam = None if math.isnan(self.lam) else self.lam
        return {
            "powers": [float(p) for p in self.powers],
            "rates": [float(r) for r in self.rates],
            "objective": float(self.objective),
            "lambda": lam,
            "regime": self.regime.value,
            "iterations": int(self.iterations),
            "doubling_steps": int(self.doubling_steps),
            "power_used": float(self.power_used),
        }


def make_allocation(channels, powers, lam, regime, objective_value=None, **kw):
    """Build an :class:`Allocation`, deriving rates, J and power used."""
    powers = np.array(powers, dtype=float)
    powers.setflags(write=False)
    rates = np.log2(1.0 + channels.gains * powers)
    rates.setflags(write=False)
    if objective_value is None:
        objective_value = objective(channels, powers)
    kw.setdefault("power_used", math.fsum(powers))
    return Allocation(powers, rates, float(objective_value), float(lam), regime, **kw)


def _check_scalar(value, name, *, positive=False):
    value = float(value)
    if not math.isfinite(value) or value < 0.0 or (positive and value == 0.0):
        bound = "> 0" if positive else ">= 0"
        raise DomainError(name, f"must be finite and {bound} (got {value})")
    return value


def rate(a, p):
    """Spectral efficiency ``log2(1 + a p)`` in bits/s/Hz."""
    a = _check_scalar(a, "gain", positive=True)
    p = _check_scalar(p, "power")
    return math.log2(1.0 + a * p)


def cap(a, t):
    """Power ``(2**t - 1) / a`` that exactly meets target ``t``."""
    a = _check_scalar(a, "gain", positive=True)
    t = _check_scalar(t, "target")
    return (2.0**t - 1.0) / a


def _check_powers(channels, powers):
    powers = np.asarray(powers, dtype=float)
    if powers.shape != (channels.n,):
        raise DomainError("powers", f"expected {channels.n} values, got shape {powers.shape}")
    if np.any(powers < 0.0) or not np.all(np.isfinite(powers)):
        raise DomainError("powers", "every power must be finite and >= 0")
    return powers


def objective(channels, powers):
    """Weighted squared rate deviation ``sum w_i (r_i - T_i)**2`` (bits^2)."""
    powers = _check_powers(channels, powers)
    dev = np.log2(1.0 + channels.gains * powers) - channels.targets
    return math.fsum(channels.weight_vector * dev * dev)


def objective_gradient(channels, powers):
    """Analytic gradient of :func:`objective` with respect to the powers."""
    powers = _check_powers(channels, powers)
    a = channels.gains
    y = 1.0 + a * powers
    dev = np.log2(y) - channels.targets
    return 2.0 * channels.weight_vector * dev * a / (y * LN2)


def second_derivative(channels, powers):
    """Diagonal of the Hessian of :func:`objective`."""
    powers = _check_powers(channels, powers)
    a = channels.gains
    y = 1.0 + a * powers
    bracket = 1.0 - np.log(y) + channels.targets * LN2
    return channels.weight_vector * 2.0 * a * a / (LN2 * LN2 * y * y) * bracket


def second_derivative_sign(a, t, p):
    """Sign (-1, 0, +1) of the per-channel second derivative at power ``p``.

    Only the bracket ``1 - ln(1 + a p) + t ln 2`` decides the sign; the
    prefactor is strictly positive. Convex on ``[0, cap(a, t)]``.
    """
    a = _check_scalar(a, "gain", positive=True)
    t = _check_scalar(t, "target")
    p = _check_scalar(p, "power")
    bracket = 1.0 - math.log1p(a * p) + t * LN2
    return int(np.sign(bracket))


def problem_from_dict(doc):
    """Build a :class:`Problem` from the instance-file mapping.

    Keys: ``gains`` (list), ``targets`` (list or scalar), ``weights``
    (optional list), ``p_tot``, ``epsilon`` (optional).
    """
    if not isinstance(doc, dict):
        raise DomainError("instance", "top level must be a mapping")
    for key in ("gains", "targets", "p_tot"):
        if key not in doc:
            raise DomainError(key, "missing required field")
    unknown = set(doc) - {"gains", "targets", "weights", "p_tot", "epsilon"}
    if unknown:
        raise DomainError(sorted(unknown)[0], "unknown field")
    try:
        channels = ChannelSet(doc["gains"], doc["targets"], doc.get("weights"))
        p_tot = float(doc["p_tot"])
        eps = float(doc.get("epsilon", DEFAULT_EPSILON))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError("instance", str(exc)) from exc
    return Problem(channels, p_tot, eps)


def load_problem(path):
    """Read a JSON problem-instance file."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError("instance", f"not valid JSON: {exc}") from exc
    return problem_from_dict(doc)
