"""Experiment harness: budget sweeps, fading Monte Carlo, SNR sensitivity,
timing, warm starts, and CSV emission of plot-ready series.

Every function is a deterministic function of its arguments (wall-clock
timings excepted). CSV files carry a header row and write floats with 17
significant digits so they round-trip exactly.
"""

import csv
import gc
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import proportional_fair, uniform, waterfill
from .errors import DomainError
from .fading import FadingConfig, draw_gains, unit_exponentials
from .model import ChannelSet, Problem
from .solver import dual_curve, inactivity_threshold, solve, solve_warm

DEFAULT_GAINS = (20.0, 15.0, 10.0, 7.0, 5.0, 3.0, 2.0, 1.0)
DEFAULT_TARGET = 3.0
DEFAULT_P_TOT = 10.0
HETERO_TARGETS = (5.0, 4.0, 3.0, 3.0, 2.0, 2.0, 1.0, 1.0)
TABLE_BUDGETS = (5.0, 10.0, 15.0, 20.0, 25.0)

TARGET_RATE = "target_rate"
STRATEGIES = (TARGET_RATE, "waterfilling", "uniform", "proportional_fairness")


def default_channels(targets=DEFAULT_TARGET):
    return ChannelSet(DEFAULT_GAINS, targets)


def allocate(strategy, channels, p_tot, epsilon=1e-10):
    """Run one of :data:`STRATEGIES` on ``channels`` with budget ``p_tot``."""
    if strategy == TARGET_RATE:
        return solve(Problem(channels, p_tot, epsilon))
    if strategy == "waterfilling":
        return waterfill(channels, p_tot)
    if strategy == "uniform":
        return uniform(channels, p_tot)
    if strategy == "proportional_fairness":
        return proportional_fair(channels, p_tot)
    raise DomainError("strategy", f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def _grid(values, name):
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError(name, "need a nonempty 1-D grid")
    if np.any(np.diff(grid) < 0.0):
        raise DomainError(name, "grid must be sorted ascending")
    return grid


# ---------------------------------------------------------------- budget sweep


@dataclass(frozen=True)
class SweepResult:
    p_tot_grid: np.ndarray
    power_used: dict
    objective: dict
    caps_sum: float

    def rows(self):
        for k, p in enumerate(self.p_tot_grid):
            for s in self.power_used:
                yield (p, s, self.power_used[s][k], self.objective[s][k])


def budget_sweep(channels, grid, epsilon=1e-10, strategies=STRATEGIES):
    """Objective and power used per strategy along a budget grid."""
    grid = _grid(grid, "grid")
    if np.any(grid <= 0.0):
        raise DomainError("grid", "budgets must be > 0")
    used = {s: np.empty(grid.size) for s in strategies}
    obj = {s: np.empty(grid.size) for s in strategies}
    for k, p_tot in enumerate(grid):
        for s in strategies:
            alloc = allocate(s, channels, float(p_tot), epsilon)
            used[s][k] = alloc.power_used
            obj[s][k] = alloc.objective
    return SweepResult(grid, used, obj, channels.caps_sum)


# -------------------------------------------------------- heterogeneous targets


@dataclass(frozen=True)
class HeteroResult:
    channels: ChannelSet
    caps_sum: float
    allocations: dict  # p_tot -> Allocation

    def unused(self, p_tot):
        return p_tot - self.allocations[p_tot].power_used


def heterogeneous_demo(budgets=(5.0, 15.0), epsilon=1e-10):
    """Heterogeneous targets on the default gains at a tight and a loose budget."""
    ch = ChannelSet(DEFAULT_GAINS, HETERO_TARGETS)
    allocs = {float(p): solve(Problem(ch, p, epsilon)) for p in budgets}
    return HeteroResult(ch, ch.caps_sum, allocs)


# ---------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class MonteCarloSummary:
    strategy: str
    deviations: np.ndarray  # sorted |r_i - T| pooled over realizations and channels
    median: float
    p90: float

    def cdf(self):
        n = self.deviations.size
        return self.deviations, np.arange(1, n + 1) / n


def _gains_stream(config):
    for k in range(config.n_realizations):
        yield draw_gains(config, k)


def monte_carlo(config, target=DEFAULT_TARGET, p_tot=DEFAULT_P_TOT, epsilon=1e-10,
                strategies=STRATEGIES):
    """Pooled per-channel rate deviations under Rayleigh fading."""
    pools = {s: [] for s in strategies}
    for gains in _gains_stream(config):
        ch = ChannelSet(gains, target)
        for s in strategies:
            alloc = allocate(s, ch, p_tot, epsilon)
            pools[s].append(np.abs(alloc.rates - ch.targets))
    out = []
    for s in strategies:
        dev = np.sort(np.concatenate(pools[s]))
        out.append(MonteCarloSummary(s, dev, float(np.quantile(dev, 0.5)),
                                     float(np.quantile(dev, 0.9))))
    return out


# ------------------------------------------------------------ SNR sensitivity


@dataclass(frozen=True)
class SnrResult:
    snr_db: np.ndarray
    mean_objective: dict

    def rows(self):
        for k, snr in enumerate(self.snr_db):
            for s, series in self.mean_objective.items():
                yield (snr, s, series[k])


def snr_sensitivity(snr_grid_db, config=None, target=DEFAULT_TARGET, p_tot=DEFAULT_P_TOT,
                    epsilon=1e-10, strategies=STRATEGIES):
    """Mean objective per strategy at each mean SNR.

    The same fading draws (``config.seed``) are reused at every SNR point,
    so the curves differ only through the SNR scaling.
    """
    if config is None:
        config = FadingConfig(n_realizations=500)
    grid = _grid(snr_grid_db, "snr_grid_db")
    means = {s: np.empty(grid.size) for s in strategies}
    for k, snr in enumerate(grid):
        cfg = FadingConfig(config.n_channels, float(snr), config.seed, config.n_realizations)
        totals = {s: [] for s in strategies}
        for gains in _gains_stream(cfg):
            ch = ChannelSet(gains, target)
            for s in strategies:
                totals[s].append(allocate(s, ch, p_tot, epsilon).objective)
        for s in strategies:
            means[s][k] = math.fsum(totals[s]) / cfg.n_realizations
    return SnrResult(grid, means)


# ------------------------------------------------------------------- timing


@dataclass(frozen=True)
class TimingRow:
    n: int
    mean_seconds: float
    std_seconds: float
    iterations: int
    samples: tuple = field(default=(), repr=False)


def timing_instance(n, seed=0, epsilon=1e-10):
    """Rayleigh instance at 10 dB with T = 3 and 1.25 power units per channel."""
    gains = draw_gains(FadingConfig(n, 10.0, seed, 1), 0)
    return Problem(ChannelSet(gains, DEFAULT_TARGET), 1.25 * n, epsilon)


def timing_bench(n_grid, runs=5, seed=0, epsilon=1e-10):
    """Wall-clock of :func:`solve` per channel count.

    One warm-up run is discarded; the garbage collector is paused while
    timing, as :mod:`timeit` does.
    """
    if runs < 5:
        raise DomainError("runs", f"need at least 5 runs (got {runs})")
    rows = []
    for n in n_grid:
        problem = timing_instance(int(n), seed, epsilon)
        alloc = solve(problem)
        samples = []
        was_enabled = gc.isenabled()
        gc.disable()
        try:
            for _ in range(runs):
                t0 = time.perf_counter()
                solve(problem)
                samples.append(time.perf_counter() - t0)
        finally:
            if was_enabled:
                gc.enable()
        arr = np.asarray(samples)
        rows.append(TimingRow(int(n), float(arr.mean()), float(arr.std(ddof=1)),
                              alloc.iterations, tuple(samples)))
    return rows


# --------------------------------------------------------------- warm start


@dataclass(frozen=True)
class WarmStartResult:
    cold_iterations: np.ndarray
    warm_iterations: np.ndarray
    cold_evaluations: np.ndarray
    warm_evaluations: np.ndarray

    @property
    def mean_cold(self):
        return float(self.cold_iterations.mean())

    @property
    def mean_warm(self):
        return float(self.warm_iterations.mean())

    def rows(self):
        for k in range(self.cold_iterations.size):
            yield (k, int(self.cold_iterations[k]), int(self.warm_iterations[k]),
                   int(self.cold_evaluations[k]), int(self.warm_evaluations[k]))


def warm_start_study(channels=None, p_tot=DEFAULT_P_TOT, steps=100, sigma=0.01, seed=0,
                     epsilon=1e-10):
    """Track slowly drifting gains, solving each step cold and warm.

    Gains follow a multiplicative random walk with i.i.d. factors
    ``exp(sigma z)``, ``z ~ N(0, 1)``. The warm solve is seeded with the
    previous step's multiplier.
    """
    if channels is None:
        channels = default_channels()
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    gains = np.array(channels.gains)
    prev = solve(Problem(channels, p_tot, epsilon)).lam
    cold_it, warm_it, cold_ev, warm_ev = [], [], [], []
    for _ in range(steps):
        gains = gains * np.exp(sigma * rng.standard_normal(gains.size))
        problem = Problem(channels.with_gains(gains), p_tot, epsilon)
        cold = solve(problem)
        warm = solve_warm(problem, prev)
        cold_it.append(cold.iterations)
        warm_it.append(warm.iterations)
        cold_ev.append(cold.iterations + cold.doubling_steps)
        warm_ev.append(warm.iterations + warm.doubling_steps)
        prev = cold.lam
    return WarmStartResult(*(np.asarray(v) for v in (cold_it, warm_it, cold_ev, warm_ev)))


# --------------------------------------------------------------- dual curve


def dual_curve_grid(channels, n_points=200, lo=1e-4):
    """Log-spaced multipliers from ``lo`` to the largest inactivity threshold."""
    top = float(np.max(inactivity_threshold(channels.gains, channels.targets,
                                            channels.weight_vector)))
    if top <= lo:
        raise DomainError("channels", "all inactivity thresholds are below the grid start")
    return np.logspace(math.log10(lo), math.log10(top), n_points)


# ------------------------------------------------------------------- CSV


def _fmt(v):
    if isinstance(v, (str, np.str_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        n = 0
        for row in rows:
            w.writerow([_fmt(v) for v in row])
            n += 1
    return n


def write_sweep_csv(result, out_dir):
    return write_csv(os.path.join(out_dir, "sweep.csv"),
                     ("p_tot", "strategy", "power_used", "objective"), result.rows())


def write_cdf_csvs(summaries, out_dir):
    paths = []
    for s in summaries:
        path = os.path.join(out_dir, f"cdf_{s.strategy}.csv")
        dev, cdf = s.cdf()
        write_csv(path, ("deviation", "empirical_cdf"), zip(dev, cdf))
        paths.append(path)
    return paths


def write_snr_csv(result, out_dir):
    return write_csv(os.path.join(out_dir, "snr.csv"),
                     ("snr_db", "strategy", "mean_J"), result.rows())


def write_timing_csv(rows, out_dir):
    return write_csv(os.path.join(out_dir, "timing.csv"),
                     ("n", "mean_s", "std_s", "iterations"),
                     ((r.n, r.mean_seconds, r.std_seconds, r.iterations) for r in rows))


def write_warmstart_csv(result, out_dir):
    return write_csv(os.path.join(out_dir, "warmstart.csv"),
                     ("step", "cold_iterations", "warm_iterations",
                      "cold_evaluations", "warm_evaluations"),
                     result.rows())


def write_dual_curve_csv(points, out_dir):
    return write_csv(os.path.join(out_dir, "dual_curve.csv"), ("lambda", "total_power"),
                     ((p.lam, p.total_power) for p in points))


def write_hetero_csv(result, out_dir):
    ch = result.channels
    caps = ch.caps

    def rows():
        for p_tot, alloc in result.allocations.items():
            for i in range(ch.n):
                yield (p_tot, i, ch.gains[i], ch.targets[i], alloc.powers[i],
                       alloc.rates[i], caps[i])

    return write_csv(os.path.join(out_dir, "hetero.csv"),
                     ("p_tot", "channel", "gain", "target", "power", "rate", "cap"), rows())


__all__ = [
    "DEFAULT_GAINS", "DEFAULT_TARGET", "DEFAULT_P_TOT", "HETERO_TARGETS", "TABLE_BUDGETS",
    "STRATEGIES", "TARGET_RATE",
    "SweepResult", "HeteroResult", "MonteCarloSummary", "SnrResult", "TimingRow",
    "WarmStartResult",
    "default_channels", "allocate", "budget_sweep", "heterogeneous_demo", "monte_carlo",
    "snr_sensitivity", "timing_instance", "timing_bench", "warm_start_study",
    "dual_curve", "dual_curve_grid", "unit_exponentials",
    "write_csv", "write_sweep_csv", "write_cdf_csvs", "write_snr_csv", "write_timing_csv",
    "write_warmstart_csv", "write_dual_curve_csv", "write_hetero_csv",
]
