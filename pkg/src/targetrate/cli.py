"""Command-line front end.

    targetrate solve --gains 20,15,10,7,5,3,2,1 --target 3 --ptot 10
    targetrate solve --input instance.json --json
    targetrate certify --gains 1,2,4 --targets 3,2,1 --ptot 2
    targetrate sweep --out results/
    targetrate montecarlo --realizations 1000 --seed 0 --out results/
    targetrate snr --snr-grid 0,2,4,6,8,10,12,14,16,18,20 --out results/
    targetrate bench --sizes 4,8,16,32,64,128,256,512,1024 --out results/
    targetrate dualcurve --out results/
    targetrate hetero --out results/

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.
"""

import argparse
import json
import sys

from . import experiments as ex
from .errors import ConvergenceError, DomainError
from .fading import FadingConfig, db_to_linear
from .model import ChannelSet, Problem, load_problem
from .oracle import certify

SUBCOMMANDS = ("solve", "sweep", "montecarlo", "snr", "bench", "dualcurve", "hetero", "certify")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_problem_args(p, *, need_budget=True):
    src = p.add_argument_group("problem instance")
    src.add_argument("--input", help="JSON instance file (gains, targets, weights, p_tot, epsilon)")
    src.add_argument("--gains", type=_floats, help="linear gain-to-noise ratios, comma-separated")
    src.add_argument("--gains-db", type=_floats, help="gains in dB, comma-separated")
    src.add_argument("--target", type=float, help="one target for every channel (bits/s/Hz)")
    src.add_argument("--targets", type=_floats, help="per-channel targets, comma-separated")
    src.add_argument("--weights", type=_floats, help="per-channel weights, comma-separated")
    if need_budget:
        src.add_argument("--ptot", type=float, help="total power budget")
    src.add_argument("--epsilon", type=float, help="bisection tolerance (default 1e-10)")


def _channels_from_args(args, *, default=False):
    if args.input:
        return load_problem(args.input).channels
    if args.gains is not None and args.gains_db is not None:
        raise DomainError("gains", "give --gains or --gains-db, not both")
    gains = args.gains
    if args.gains_db is not None:
        gains = list(db_to_linear(args.gains_db))
    if gains is None:
        if default:
            gains = list(ex.DEFAULT_GAINS)
        else:
            raise DomainError("gains", "missing (use --gains, --gains-db or --input)")
    if args.target is not None and args.targets is not None:
        raise DomainError("targets", "give --target or --targets, not both")
    targets = args.targets if args.targets is not None else args.target
    if targets is None:
        if not default:
            raise DomainError("targets", "missing (use --target or --targets)")
        targets = ex.DEFAULT_TARGET
    return ChannelSet(gains, targets, args.weights)


def _problem_from_args(args):
    if args.input:
        problem = load_problem(args.input)
        p_tot = problem.p_tot if args.ptot is None else args.ptot
        eps = problem.epsilon if args.epsilon is None else args.epsilon
        return Problem(problem.channels, p_tot, eps)
    channels = _channels_from_args(args)
    if args.ptot is None:
        raise DomainError("p_tot", "missing (use --ptot)")
    eps = 1e-10 if args.epsilon is None else args.epsilon
    return Problem(channels, args.ptot, eps)


def build_parser():
    parser = _Parser(prog="targetrate", description="Target-rate least-squares power allocation")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="allocate power for one instance")
    _add_problem_args(p)
    p.add_argument("--strategy", default=ex.TARGET_RATE, choices=ex.STRATEGIES)
    p.add_argument("--json", action="store_true", help="emit one JSON document instead of a table")

    p = sub.add_parser("certify", help="solve, then print the KKT residual report")
    _add_problem_args(p)
    p.add_argument("--strategy", default=ex.TARGET_RATE, choices=ex.STRATEGIES)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep", help="objective and power used over a budget grid")
    _add_problem_args(p, need_budget=False)
    p.add_argument("--grid", type=_floats, default=list(ex.TABLE_BUDGETS))
    p.add_argument("--out", required=True)

    p = sub.add_parser("montecarlo", help="Rayleigh-fading deviation CDFs")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--realizations", type=int, default=1000)
    p.add_argument("--target", type=float, default=ex.DEFAULT_TARGET)
    p.add_argument("--ptot", type=float, default=ex.DEFAULT_P_TOT)
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--out", required=True)

    p = sub.add_parser("snr", help="mean objective against mean SNR")
    p.add_argument("--snr-grid", type=_floats, default=[float(v) for v in range(0, 21, 2)])
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--realizations", type=int, default=500)
    p.add_argument("--target", type=float, default=ex.DEFAULT_TARGET)
    p.add_argument("--ptot", type=float, default=ex.DEFAULT_P_TOT)
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="solver timing and warm-start iteration counts")
    p.add_argument("--sizes", type=_ints, default=[4, 8, 16, 32, 64, 128, 256, 512, 1024])
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--warm-steps", type=int, default=100)
    p.add_argument("--out", required=True)

    p = sub.add_parser("dualcurve", help="sample S(lambda) on a log grid")
    _add_problem_args(p, need_budget=False)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", required=True)

    p = sub.add_parser("hetero", help="heterogeneous-target scenario at two budgets")
    p.add_argument("--budgets", type=_floats, default=[5.0, 15.0])
    p.add_argument("--out", required=True)
    return parser


def _fmt(x):
    return format(x, ".6g")


def _solve_report(problem, alloc, strategy):
    ch = problem.channels
    caps = ch.caps
    lines = [
        f"strategy    {strategy}",
        f"regime      {alloc.regime.value}",
        f"lambda      {_fmt(alloc.lam)}",
        f"iterations  {alloc.iterations} (bracket evaluations {alloc.doubling_steps})",
        f"J = {_fmt(alloc.objective)}",
        f"power used  {_fmt(alloc.power_used)} of {_fmt(problem.p_tot)} "
        f"(unused {_fmt(max(0.0, problem.p_tot - alloc.power_used))})",
        "",
        f"{'ch':>4} {'gain':>12} {'target':>8} {'cap':>12} {'power':>12} {'rate':>10}",
    ]
    for i in range(ch.n):
        lines.append(
            f"{i:>4} {_fmt(ch.gains[i]):>12} {_fmt(ch.targets[i]):>8} {_fmt(caps[i]):>12} "
            f"{_fmt(alloc.powers[i]):>12} {_fmt(alloc.rates[i]):>10}"
        )
    return "\n".join(lines)


def _solve_document(problem, alloc, strategy):
    ch = problem.channels
    doc = {
        "strategy": strategy,
        "gains": [float(v) for v in ch.gains],
        "targets": [float(v) for v in ch.targets],
        "weights": None if ch.weights is None else [float(v) for v in ch.weights],
        "p_tot": problem.p_tot,
        "epsilon": problem.epsilon,
        "caps": [float(v) for v in ch.caps],
        "unused": max(0.0, problem.p_tot - alloc.power_used),
    }
    doc.update(alloc.to_dict())
    return doc


def _cmd_solve(args, out):
    problem = _problem_from_args(args)
    alloc = ex.allocate(args.strategy, problem.channels, problem.p_tot, problem.epsilon)
    if args.json:
        out.write(json.dumps(_solve_document(problem, alloc, args.strategy), indent=2) + "\n")
    else:
        out.write(_solve_report(problem, alloc, args.strategy) + "\n")


def _cmd_certify(args, out):
    problem = _problem_from_args(args)
    alloc = ex.allocate(args.strategy, problem.channels, problem.p_tot, problem.epsilon)
    report = certify(problem, alloc)
    if args.json:
        doc = {"strategy": args.strategy, "allocation": alloc.to_dict(), "kkt": report.to_dict()}
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    out.write(f"strategy           {args.strategy}\n")
    out.write(f"lambda             {_fmt(report.lam)}\n")
    out.write(f"max residual       {report.max_residual:.3e}\n")
    out.write(f"budget slackness   {report.budget_slackness_gap:.3e}\n")
    out.write(f"primal violation   {report.primal_violation:.3e}\n")
    out.write(f"{'ch':>4} {'power':>12} {'residual':>12} {'mu':>12}\n")
    for i, (p, r, m) in enumerate(zip(alloc.powers, report.stationarity_residuals, report.mu)):
        out.write(f"{i:>4} {_fmt(p):>12} {r:>12.3e} {_fmt(m):>12}\n")


def _cmd_sweep(args, out):
    channels = _channels_from_args(args, default=True)
    eps = 1e-10 if args.epsilon is None else args.epsilon
    result = ex.budget_sweep(channels, args.grid, eps)
    n = ex.write_sweep_csv(result, args.out)
    out.write(f"sum of caps {_fmt(result.caps_sum)}; wrote {n} rows to sweep.csv\n")


def _cmd_montecarlo(args, out):
    cfg = FadingConfig(args.n, args.snr_db, args.seed, args.realizations)
    summaries = ex.monte_carlo(cfg, args.target, args.ptot, args.epsilon)
    ex.write_cdf_csvs(summaries, args.out)
    for s in summaries:
        out.write(f"{s.strategy:<22} median {s.median:.4f}  p90 {s.p90:.4f}\n")


def _cmd_snr(args, out):
    cfg = FadingConfig(args.n, 0.0, args.seed, args.realizations)
    result = ex.snr_sensitivity(args.snr_grid, cfg, args.target, args.ptot, args.epsilon)
    n = ex.write_snr_csv(result, args.out)
    out.write(f"wrote {n} rows to snr.csv\n")


def _cmd_bench(args, out):
    rows = ex.timing_bench(args.sizes, args.runs, args.seed, args.epsilon)
    ex.write_timing_csv(rows, args.out)
    for r in rows:
        out.write(f"N={r.n:<6} {r.mean_seconds * 1e3:9.4f} ms +- {r.std_seconds * 1e3:.4f}  "
                  f"iterations {r.iterations}\n")
    warm = ex.warm_start_study(steps=args.warm_steps, seed=args.seed, epsilon=args.epsilon)
    ex.write_warmstart_csv(warm, args.out)
    out.write(f"warm start: mean iterations {warm.mean_warm:.2f} vs cold {warm.mean_cold:.2f}\n")


def _cmd_dualcurve(args, out):
    channels = _channels_from_args(args, default=True)
    points = ex.dual_curve(channels, ex.dual_curve_grid(channels, args.points))
    n = ex.write_dual_curve_csv(points, args.out)
    out.write(f"wrote {n} points to dual_curve.csv\n")


def _cmd_hetero(args, out):
    result = ex.heterogeneous_demo(args.budgets)
    ex.write_hetero_csv(result, args.out)
    out.write(f"sum of caps {_fmt(result.caps_sum)}\n")
    for p_tot, alloc in result.allocations.items():
        out.write(f"P_tot={_fmt(p_tot)}: {alloc.regime.value}, used {_fmt(alloc.power_used)}, "
                  f"unused {_fmt(result.unused(p_tot))}, J = {_fmt(alloc.objective)}\n")


_COMMANDS = {
    "solve": _cmd_solve,
    "certify": _cmd_certify,
    "sweep": _cmd_sweep,
    "montecarlo": _cmd_montecarlo,
    "snr": _cmd_snr,
    "bench": _cmd_bench,
    "dualcurve": _cmd_dualcurve,
    "hetero": _cmd_hetero,
}


def run(argv=None, out=None, err=None):
    """Run the CLI; returns the exit status instead of exiting."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        _COMMANDS[args.subcommand](args, out)
    except _UsageError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except DomainError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except ConvergenceError as exc:
        err.write(f"numerical failure: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
