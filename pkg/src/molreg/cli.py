"""Command-line front end.

Exit codes: 0 success, 1 usage or I/O error, 2 noise-dominated data,
3 parameter search did not converge.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

from .errors import DimensionError, DomainError, InvalidFieldError, NoiseDominatedError, NonConvergenceError
from .experiments import (
    DEFAULT_DELTAS,
    MC_NOISE_LEVELS,
    AprioriParams,
    MorozovParams,
    emit_csv,
    emit_fit_csv,
    run_monte_carlo,
    run_rate_study,
    solve_case,
)
from .fieldio import read_field, write_field
from .forward import Conductivity, read_conductivity_csv
from .grid import Grid2D
from .noise import NoiseSpec, add_noise
from .problems import custom_problem, exact_pair, get_problem, make_exact_data

log = logging.getLogger("molreg")

EXIT_OK, EXIT_USAGE, EXIT_NOISE, EXIT_NONCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("problem")
    g.add_argument("--config", help="flat 'key = value' file; explicit flags take precedence")
    g.add_argument("--example", type=int, help="catalogue problem 1-4 (default 1)")
    g.add_argument("--u0", help="initial state as an FLD1 file (custom problem)")
    g.add_argument("--tau", type=float, default=1.0, help="fractional order for --u0")
    g.add_argument("--gamma-file", help="conductivity table with header 't,gamma'")
    g.add_argument("--gamma", type=float, help="constant conductivity for --u0")
    g.add_argument("--n", type=int, default=256, help="grid points per axis (even)")
    g.add_argument("--l", type=float, default=10.0, help="half-width of the spatial window")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=".", help="output directory")
    g.add_argument("--verbose", "-v", action="store_true")

    rule = _Parser(add_help=False)
    r = rule.add_argument_group("parameter rule")
    r.add_argument("--rule", choices=("apriori", "morozov"), default="apriori")
    r.add_argument("--c", type=float, help="a-priori constant (0.2; 0.02 for example 4)")
    r.add_argument("--s-exp", type=float, default=2.0, help="a-priori exponent s")
    r.add_argument("--delta-floor", type=float, default=0.0, help="a-priori noise floor for noise-free data")
    r.add_argument("--r", type=float, default=1.0, help="discrepancy exponent r in (0, 1]")
    r.add_argument("--beta0", type=float, default=10.0)
    r.add_argument("--q", type=float, default=0.98)
    r.add_argument("--trunc-radius", type=float, help="reconstruct with the operator truncated to |xi| <= R")
    r.add_argument("--threads", type=int, default=1, help="worker threads (0 = one per CPU)")
    r.add_argument("--timing", action="store_true", help="record wall times (output no longer reproducible)")

    parser = _Parser(prog="molreg", description="Mollification regularization for backward diffusion.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("forward", parents=[common], help="write exact final data g")
    p.add_argument("--noise-pct", type=float, default=0.0, help="also write noisy data g_delta")

    for name, helptext in (("reconstruct", "select beta and write u_beta"),
                           ("select-beta", "run a parameter rule and write its certificate")):
        p = sub.add_parser(name, parents=[common, rule], help=helptext)
        p.add_argument("--noise-pct", type=float, default=1.0)

    p = sub.add_parser("rate-study", parents=[common, rule], help="error against noise level")
    p.add_argument("--deltas", "--noise-pct", dest="deltas", type=_float_list,
                   default=list(DEFAULT_DELTAS), help="decreasing noise percentages")

    p = sub.add_parser("monte-carlo", parents=[common, rule], help="replicated noise draws")
    p.add_argument("--noise-pct", type=_float_list, default=list(MC_NOISE_LEVELS),
                   help="comma-separated noise percentages")
    p.add_argument("--n-reps", type=int, default=200)
    return parser


def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            out[key.strip().replace("_", "-")] = value.strip()
    return out


def _config_argv(cfg: dict[str, str]) -> list[str]:
    argv = []
    for key, value in cfg.items():
        if key in ("timing", "verbose"):
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
        else:
            argv += [f"--{key}", value]
    return argv


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # config values go first so that later explicit flags override them
        i = argv.index(args.command)
        args = parser.parse_args(argv[: i + 1] + _config_argv(read_config(args.config)) + argv[i + 1:])
    return args


def _grid_and_problem(args):
    if args.u0 is not None:
        if args.example is not None:
            raise UsageError("--example and --u0 are mutually exclusive")
        u0 = read_field(args.u0)
        if args.gamma_file:
            cond = read_conductivity_csv(args.gamma_file)
        elif args.gamma is not None:
            cond = Conductivity.constant(args.gamma)
        else:
            raise UsageError("--u0 needs --gamma or --gamma-file")
        grid = u0.grid
        if (args.n, args.l) != (grid.N, grid.L) and (args.n, args.l) != (256, 10.0):
            raise UsageError(f"--n/--l disagree with the grid of {args.u0} (N={grid.N}, L={grid.L})")
        return grid, custom_problem(u0, args.tau, cond)
    return Grid2D(args.n, args.l), get_problem(1 if args.example is None else args.example).id


def _params(args, example_id):
    if args.rule == "apriori":
        c = args.c if args.c is not None else (0.02 if example_id == 4 else 0.2)
        return AprioriParams(c=c, s=args.s_exp, delta_floor=args.delta_floor)
    return MorozovParams(r=args.r, beta0=args.beta0, q=args.q)


def _example_id(problem) -> int:
    return problem if isinstance(problem, int) else problem.id


def cmd_forward(args) -> None:
    grid, problem = _grid_and_problem(args)
    g = exact_pair(problem, grid)[1] if isinstance(problem, int) else make_exact_data(problem, grid)
    write_field(g, os.path.join(args.out, "g.fld"))
    if args.noise_pct > 0:
        g_delta, delta = add_noise(g, NoiseSpec(args.noise_pct, args.seed))
        write_field(g_delta, os.path.join(args.out, "g_delta.fld"))
        log.info("delta = %.17g", delta)


def _solve(args):
    grid, problem = _grid_and_problem(args)
    return solve_case(problem, args.noise_pct, args.rule, _params(args, _example_id(problem)),
                      seed=args.seed, grid=grid, trunc_radius=args.trunc_radius, timed=args.timing)


def cmd_reconstruct(args) -> None:
    out = _solve(args)
    write_field(out.u_beta, os.path.join(args.out, "u_beta.fld"))
    emit_csv([out.record], os.path.join(args.out, "run.csv"))
    print(f"beta = {out.record.beta:.17g}  rel_err = {out.record.rel_err:.17g}")


SELECTION_HEADER = ["example", "perc_noise", "delta", "rule", "beta", "residual", "target",
                    "iterations", "bracket_residual"]


def cmd_select_beta(args) -> None:
    out = _solve(args)
    rec, sel = out.record, out.selection

    def fmt(v):
        return "" if v is None else format(v, ".17g") if isinstance(v, float) else str(v)

    with open(os.path.join(args.out, "selection.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SELECTION_HEADER)
        w.writerow([fmt(v) for v in (rec.example_id, rec.perc_noise, rec.delta, rec.rule, sel.beta,
                                     sel.residual, sel.target, sel.iterations, sel.bracket_residual)])
    print(f"beta = {sel.beta:.17g}")


def cmd_rate_study(args) -> None:
    grid, problem = _grid_and_problem(args)
    curve = run_rate_study(problem, args.rule, _params(args, _example_id(problem)), args.deltas,
                           seed=args.seed, grid=grid, threads=args.threads,
                           trunc_radius=args.trunc_radius, timed=args.timing)
    emit_csv([curve], os.path.join(args.out, "rate.csv"))
    emit_fit_csv([curve], os.path.join(args.out, "rate_fit.csv"))
    fit = curve.fits[curve.fit_axis]
    print(f"{curve.fit_axis}: slope = {fit.slope:.6g}  r2 = {fit.r2:.6g}")


def cmd_monte_carlo(args) -> None:
    grid, problem = _grid_and_problem(args)
    params = _params(args, _example_id(problem))
    summaries = []
    for perc in args.noise_pct:
        s = run_monte_carlo(problem, perc, args.rule, params, n_reps=args.n_reps, seed=args.seed,
                            grid=grid, threads=args.threads, trunc_radius=args.trunc_radius,
                            timed=args.timing)
        summaries.append(s)
        print(f"{perc:g}%: mean_rel_err = {s.mean_rel_err:.6g}  var = {s.var_rel_err:.3g}  "
              f"mean_beta = {s.mean_beta:.6g}")
    emit_csv(summaries, os.path.join(args.out, "mc_summary.csv"), kind="mc")
    emit_csv([r for s in summaries for r in s.runs], os.path.join(args.out, "mc_runs.csv"), kind="run")


COMMANDS = {
    "forward": cmd_forward,
    "reconstruct": cmd_reconstruct,
    "select-beta": cmd_select_beta,
    "rate-study": cmd_rate_study,
    "monte-carlo": cmd_monte_carlo,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        radius = getattr(args, "trunc_radius", None)
        if radius is not None and not radius > 0:
            raise UsageError("--trunc-radius must be positive")
        os.makedirs(args.out, exist_ok=True)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoiseDominatedError as exc:
        print(f"noise-dominated data: {exc}", file=sys.stderr)
        return EXIT_NOISE
    except NonConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (DomainError, DimensionError, InvalidFieldError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK
