"""Least-squares target-rate power allocation over parallel Gaussian channels."""

from .baselines import BaselineKind, proportional_fair, run_baseline, uniform, waterfill
from .errors import ConvergenceError, DomainError
from .fading import FadingConfig, draw_gains
from .lambertw import lambert_w0
from .model import Allocation, ChannelSet, Problem, Regime, load_problem, objective, rate
from .oracle import KktReport, certify, projected_gradient_solve, stationarity_root
from .solver import allocate_weighted, dual_curve, solve, solve_warm, total_power

__version__ = "0.1.0"

__all__ = [
    "Allocation", "BaselineKind", "ChannelSet", "ConvergenceError", "DomainError",
    "FadingConfig", "KktReport", "Problem", "Regime",
    "allocate_weighted", "certify", "draw_gains", "dual_curve", "lambert_w0", "load_problem",
    "objective", "projected_gradient_solve", "proportional_fair", "rate", "run_baseline",
    "solve", "solve_warm", "stationarity_root", "total_power", "uniform", "waterfill",
]
