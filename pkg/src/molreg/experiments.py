"""Single reconstructions, Monte Carlo studies and convergence-rate curves.

Every run is fully determined by ``(example, rule, params, seed, index)``:
noise for replication ``i`` (or noise level ``i`` of a rate study) comes
from its own stream, so runs can execute concurrently and still aggregate to
bitwise-identical results.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import linregress

from .errors import DomainError, InvalidFieldError
from .forward import truncated_operator
from .grid import Grid2D, RealField, l2_norm
from .mollifier import MollifierSymbol, gaussian
from .noise import NoiseSpec, add_noise
from .problems import ProblemSpec, exact_pair, get_problem, make_exact_data, make_initial
from .regularizer import FilterSpec, SelectionResult, reconstruct, select_beta_apriori, select_beta_morozov

__all__ = [
    "AprioriParams",
    "MorozovParams",
    "default_params",
    "RunRecord",
    "RunOutcome",
    "MCSummary",
    "LineFit",
    "RatePoint",
    "FitRow",
    "RateCurve",
    "DEFAULT_DELTAS",
    "MC_NOISE_LEVELS",
    "solve_case",
    "run_once",
    "run_monte_carlo",
    "run_rate_study",
    "fit_line",
    "emit_csv",
    "emit_fit_csv",
    "read_csv",
    "resolve_threads",
]

RULES = ("apriori", "morozov")
DEFAULT_DELTAS = (10.0, 5.0, 2.0, 1.0, 0.5, 0.2, 0.1)
MC_NOISE_LEVELS = (20.0, 10.0, 5.0, 2.0, 1.0)


@dataclass(frozen=True)
class AprioriParams:
    """``beta = c * max(delta, delta_floor)**(1 / (2 s))``.

    ``delta_floor`` lets noise-free runs pick a small positive ``beta``.
    """

    c: float = 0.2
    s: float = 2.0
    delta_floor: float = 0.0

    @property
    def param(self) -> float:
        return self.c


@dataclass(frozen=True)
class MorozovParams:
    r: float = 1.0
    beta0: float = 10.0
    q: float = 0.98

    @property
    def param(self) -> float:
        return self.r


def default_params(rule: str, example_id: int = 1):
    """Defaults per rule; the phantom (example 4) uses a ten times smaller ``c``."""
    rule = _check_rule(rule)
    if rule == "apriori":
        return AprioriParams(c=0.02 if example_id == 4 else 0.2)
    return MorozovParams()


def _check_rule(rule: str) -> str:
    if rule not in RULES:
        raise DomainError(f"unknown rule {rule!r}; expected one of {', '.join(RULES)}")
    return rule


@dataclass(frozen=True)
class RunRecord:
    example_id: int
    perc_noise: float
    delta: float
    rule: str
    param: float
    beta: float
    rel_err: float
    seed: int
    wall_time: float = 0.0


@dataclass(frozen=True, eq=False)
class RunOutcome:
    """A :class:`RunRecord` together with the fields it was computed from."""

    record: RunRecord
    selection: SelectionResult
    g_delta: RealField
    u_beta: RealField


@dataclass(frozen=True)
class MCSummary:
    """Aggregate of ``n_reps`` replications; ``var_rel_err`` uses ``ddof=0``."""

    example_id: int
    perc_noise: float
    rule: str
    n_reps: int
    mean_rel_err: float
    var_rel_err: float
    mean_beta: float
    runs: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r2: float


@dataclass(frozen=True)
class RatePoint:
    example_id: int
    rule: str
    delta: float
    rel_err: float


@dataclass(frozen=True)
class FitRow:
    example_id: int
    rule: str
    fit_axis: str
    slope: float
    intercept: float
    r2: float


@dataclass(frozen=True)
class RateCurve:
    """Error against relative noise level ``delta = perc / 100``.

    ``fits`` maps an axis tag to a least-squares line: ``loglog_delta`` fits
    ``ln rel_err`` against ``ln delta`` and ``log_vs_loglog`` fits it against
    ``ln(-ln delta)``. ``fit_axis`` names the axis expected to be straight.
    """

    example_id: int
    rule: str
    points: tuple
    fit_axis: str
    fits: dict = field(default_factory=dict, compare=False)

    @property
    def fitted_slope(self) -> float:
        return self.fits[self.fit_axis].slope

    def rows(self) -> list[RatePoint]:
        return [RatePoint(self.example_id, self.rule, d, e) for d, e in self.points]

    def fit_rows(self) -> list[FitRow]:
        return [FitRow(self.example_id, self.rule, axis, f.slope, f.intercept, f.r2)
                for axis, f in self.fits.items()]


def resolve_threads(threads: int | None) -> int:
    """``0`` or ``None`` means one worker per CPU."""
    if threads is None or threads == 0:
        return os.cpu_count() or 1
    if threads < 0:
        raise DomainError(f"threads must be nonnegative, got {threads}")
    return int(threads)


def _resolve_problem(problem: int | ProblemSpec, grid: Grid2D) -> tuple[ProblemSpec, RealField, RealField]:
    if isinstance(problem, ProblemSpec):
        u0 = make_initial(problem, grid)
        return problem, u0, make_exact_data(problem, grid)
    p = get_problem(problem)
    u0, g = exact_pair(p.id, grid)
    return p, u0, g


def _select(rule, params, spec, g_delta, delta) -> SelectionResult:
    if rule == "apriori":
        d = max(delta, params.delta_floor)
        if d == 0.0:
            raise DomainError("a-priori rule needs delta > 0; set delta_floor for noise-free data")
        return select_beta_apriori(d, params.c, params.s)
    return select_beta_morozov(spec, g_delta, delta, r=params.r, beta0=params.beta0, q=params.q)


def solve_case(problem: int | ProblemSpec, perc_noise: float, rule: str, params=None, seed: int = 0,
               index: int = 0, grid: Grid2D | None = None, trunc_radius: float | None = None,
               mollifier: MollifierSymbol | None = None, timed: bool = False) -> RunOutcome:
    """Generate noisy data, select ``beta``, reconstruct and score one run.

    Data always come from the exact operator. With ``trunc_radius`` the
    reconstruction uses the truncated operator instead.

    ``wall_time`` is recorded only when ``timed`` is set, so that untimed
    runs stay bitwise reproducible.
    """
    rule = _check_rule(rule)
    grid = grid or Grid2D(256, 10.0)
    p, u0, g = _resolve_problem(problem, grid)
    if params is None:
        params = default_params(rule, p.id)
    expected = AprioriParams if rule == "apriori" else MorozovParams
    if not isinstance(params, expected):
        raise DomainError(f"rule {rule!r} needs {expected.__name__}, got {type(params).__name__}")

    t0 = time.perf_counter()
    sym = p.symbol
    if trunc_radius is not None and math.isfinite(trunc_radius):
        sym, _ = truncated_operator(sym, trunc_radius)
    spec = FilterSpec(sym, mollifier or gaussian(), grid)
    g_delta, delta = add_noise(g, NoiseSpec(perc_noise, seed, index))
    sel = _select(rule, params, spec, g_delta, delta)
    u_beta = reconstruct(spec, sel.beta, g_delta)
    rel_err = l2_norm(u_beta - u0) / l2_norm(u0)
    wall = time.perf_counter() - t0 if timed else 0.0

    rec = RunRecord(p.id, float(perc_noise), float(delta), rule, float(params.param),
                    float(sel.beta), float(rel_err), int(seed), wall)
    return RunOutcome(rec, sel, g_delta, u_beta)


def run_once(example_id: int | ProblemSpec, perc_noise: float, rule: str, params=None,
             seed: int = 0, **kwargs) -> RunRecord:
    """One reconstruction; see :func:`solve_case` for keyword options."""
    return solve_case(example_id, perc_noise, rule, params, seed, **kwargs).record


def _map_ordered(fn, items, threads):
    workers = min(resolve_threads(threads), max(len(items), 1))
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_monte_carlo(example_id: int | ProblemSpec, perc_noise: float, rule: str, params=None,
                    n_reps: int = 200, seed: int = 0, grid: Grid2D | None = None,
                    threads: int | None = 1, **kwargs) -> MCSummary:
    """Repeat a run over ``n_reps`` independent noise draws.

    Replication ``i`` uses noise stream ``(seed, i)``. Results are collected
    in index order, so the summary does not depend on ``threads``.
    """
    if not n_reps >= 1:
        raise DomainError(f"n_reps must be at least 1, got {n_reps}")
    grid = grid or Grid2D(256, 10.0)
    # build cached exact data once before fanning out
    _resolve_problem(example_id, grid)

    def one(i):
        return run_once(example_id, perc_noise, rule, params, seed, index=i, grid=grid, **kwargs)

    runs = _map_ordered(one, range(int(n_reps)), threads)
    errs = np.array([r.rel_err for r in runs])
    betas = np.array([r.beta for r in runs])
    first = runs[0]
    return MCSummary(first.example_id, float(perc_noise), rule, int(n_reps), float(errs.mean()),
                     float(errs.var(ddof=0)), float(betas.mean()), tuple(runs))


def fit_line(x, y) -> LineFit:
    res = linregress(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return LineFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2))


def run_rate_study(example_id: int | ProblemSpec, rule: str, params=None,
                   deltas: Sequence[float] = DEFAULT_DELTAS, seed: int = 0,
                   grid: Grid2D | None = None, threads: int | None = 1, **kwargs) -> RateCurve:
    """One run per noise level (percentages, strictly decreasing).

    Level ``i`` draws from noise stream ``(seed, i)``. Both fit axes are
    computed; the smooth example 1 is expected to be straight on
    ``loglog_delta`` and the others on ``log_vs_loglog``.
    """
    deltas = [float(d) for d in deltas]
    if len(deltas) < 4:
        raise DomainError(f"a rate study needs at least 4 noise levels, got {len(deltas)}")
    if any(not 0 < d < 100 for d in deltas):
        raise DomainError("noise levels must lie strictly between 0 and 100 percent")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise DomainError("noise levels must be strictly decreasing")
    grid = grid or Grid2D(256, 10.0)
    _resolve_problem(example_id, grid)

    def one(i):
        return run_once(example_id, deltas[i], rule, params, seed, index=i, grid=grid, **kwargs)

    runs = _map_ordered(one, range(len(deltas)), threads)
    rel = np.array(deltas) / 100.0
    errs = np.array([r.rel_err for r in runs])
    fits = {
        "loglog_delta": fit_line(np.log(rel), np.log(errs)),
        "log_vs_loglog": fit_line(np.log(-np.log(rel)), np.log(errs)),
    }
    eid = runs[0].example_id
    axis = "loglog_delta" if eid == 1 else "log_vs_loglog"
    points = tuple((float(d), float(e)) for d, e in zip(rel, errs))
    return RateCurve(eid, rule, points, axis, fits)


# CSV ------------------------------------------------------------------------

_HEADERS = {
    RunRecord: ["example", "perc_noise", "delta", "rule", "param", "beta", "rel_err", "seed", "wall_time_s"],
    MCSummary: ["example", "perc_noise", "rule", "n_reps", "mean_rel_err", "var_rel_err", "mean_beta"],
    RatePoint: ["example", "rule", "delta", "rel_err"],
    FitRow: ["example", "rule", "fit_axis", "slope", "intercept", "r2"],
}
_KINDS = {"run": RunRecord, "mc": MCSummary, "rate": RatePoint, "fit": FitRow}


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _row(obj) -> list[str]:
    names = [f.name for f in fields(obj) if f.name != "runs"]
    return [_fmt(getattr(obj, n)) for n in names]


def _flatten(items) -> list:
    out = []
    for it in items:
        out.extend(it.rows() if isinstance(it, RateCurve) else [it])
    return out


def emit_csv(items: Iterable, path: str | os.PathLike, kind: str | None = None) -> None:
    """Write records, summaries or rate curves as CSV with a fixed header.

    ``kind`` (``run``, ``mc``, ``rate`` or ``fit``) fixes the header for an
    empty list; otherwise it is inferred from the first item.
    """
    rows = _flatten(items)
    if kind is not None:
        if kind not in _KINDS:
            raise DomainError(f"unknown CSV kind {kind!r}")
        cls = _KINDS[kind]
    elif rows:
        cls = type(rows[0])
    else:
        raise DomainError("cannot infer the CSV header of an empty list; pass kind")
    if cls not in _HEADERS or any(type(r) is not cls for r in rows):
        raise DomainError("all items must share one supported record type")
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(_HEADERS[cls])
            w.writerows(_row(r) for r in rows)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def emit_fit_csv(curves: Iterable[RateCurve], path: str | os.PathLike) -> None:
    emit_csv([row for c in curves for row in c.fit_rows()], path, kind="fit")


def _parse(cls, values: list[str]):
    out = []
    for f, v in zip((f for f in fields(cls) if f.name != "runs"), values):
        t = f.type if isinstance(f.type, str) else f.type.__name__
        out.append(int(v) if t == "int" else float(v) if t == "float" else v)
    return cls(*out)


def read_csv(path: str | os.PathLike) -> list:
    """Parse a file written by :func:`emit_csv`; the header selects the type."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        cls = next((c for c, h in _HEADERS.items() if h == header), None)
        if cls is None:
            raise InvalidFieldError(f"{path}: unrecognised header {header}")
        return [_parse(cls, row) for row in reader]
