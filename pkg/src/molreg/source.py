"""Logarithmic source functions and the inequalities used in the rate analysis.

``f_q(t) = (-ln t)^(-q)`` on ``(0, 1)``. Sobolev regularity ``H^p`` of the
initial state is equivalent to a logarithmic source condition of order
``q = p / (2 tau)`` for the normalized operator ``A / sqrt(e)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

__all__ = [
    "LogSourceParams",
    "f_q",
    "theta_q",
    "theta_inverse",
    "rate_theta",
    "rate_theta_inverse",
    "source_constant",
    "inverse_source_constant",
    "apriori_source_beta",
    "FqReport",
    "check_fq_inequalities",
]


@dataclass(frozen=True)
class LogSourceParams:
    q: float
    rho: float

    def __post_init__(self):
        if not (self.q > 0 and self.rho > 0):
            raise DomainError("q and rho must be positive")


def f_q(q: float, t):
    """``(-ln t)^(-q)`` for ``t`` in ``(0, 1)``."""
    t = np.asarray(t, dtype=float)
    if q < 0:
        raise DomainError(f"q must be nonnegative, got {q}")
    if np.any((t <= 0) | (t >= 1)):
        raise DomainError("f_q is defined for t in (0, 1)")
    out = (-np.log(t)) ** (-q)
    return float(out) if out.ndim == 0 else out


def theta_q(q: float, t):
    """``sqrt(t) * f_q(t)``."""
    return np.sqrt(t) * f_q(q, t)


def rate_theta(q: float, t):
    """``t * f_{q/2}(t)``."""
    return np.asarray(t) * f_q(q / 2.0, t)


def _invert_log(log_fn, y, s_lo=1e-300, s_hi=1e6):
    # root in s = -ln t of the decreasing map s -> log_fn(s) - ln y
    if not (y > 0 and math.isfinite(y)):
        raise DomainError(f"y must be positive, got {y}")
    target = math.log(y)
    if not log_fn(s_lo) >= target >= log_fn(s_hi):
        raise DomainError("value outside the achievable range")
    s = brentq(lambda v: log_fn(v) - target, s_lo, s_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
               maxiter=1000)
    return math.exp(-s)


def theta_inverse(q: float, y: float) -> float:
    """Solve ``sqrt(t) * f_q(t) = y`` for ``t`` in ``(0, 1)``.

    ``sqrt(t) f_q(t)`` is a product of positive increasing functions, hence a
    bijection from ``(0, 1)`` onto ``(0, inf)``. The root is found in
    ``s = -ln t`` to full floating-point resolution.
    """
    if not q >= 0:
        raise DomainError(f"q must be nonnegative, got {q}")
    return _invert_log(lambda s: -0.5 * s - q * math.log(s), y)


def rate_theta_inverse(q: float, y: float) -> float:
    """Solve ``t * f_{q/2}(t) = y``; behaves like ``y (-ln y)^(q/2)`` as ``y -> 0``."""
    if not q >= 0:
        raise DomainError(f"q must be nonnegative, got {q}")
    return _invert_log(lambda s: -s - 0.5 * q * math.log(s), y)


def source_constant(p: float, tau: float, Gamma: float) -> float:
    """``max(1, (2 (2 pi)^(2 tau) Gamma)^(p / (2 tau)))``, so that ``rho = C(p) E``."""
    return max(1.0, (2.0 * (2.0 * math.pi) ** (2.0 * tau) * Gamma) ** (p / (2.0 * tau)))


def inverse_source_constant(p: float, tau: float, Gamma: float) -> float:
    """``min(1, (2 (2 pi)^(2 tau) Gamma)^(-p / (2 tau)))`` for ``||u||_{H^p} <= C ||w||``."""
    return min(1.0, (2.0 * (2.0 * math.pi) ** (2.0 * tau) * Gamma) ** (-p / (2.0 * tau)))


def apriori_source_beta(delta: float, params: LogSourceParams, s: float) -> float:
    """``theta_inverse(q, delta / rho)^(1 / (2 s))``."""
    return theta_inverse(params.q, delta / params.rho) ** (1.0 / (2.0 * s))


@dataclass
class FqReport:
    """Outcome of :func:`check_fq_inequalities`.

    ``worst_margin`` is the smallest ``rhs / lhs - 1`` seen; negative means a
    violation.
    """

    q: float
    samples: int
    failures: int = 0
    worst_margin: float = math.inf
    per_family: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def check_fq_inequalities(q: float, samples: int = 10_000, seed: int = 0,
                          rtol: float = 1e-12) -> FqReport:
    """Sample both families of ``f_q`` inequalities and record violations.

    Family "power": ``f_q(lam t^a) <= K f_q(lam t^b)`` with
    ``K = max(1, (b/a)^q)`` for ``lam <= 1``, ``t in (0, 1)`` and
    ``K = max(1, ((2b - a)/a)^q)`` for ``lam > 1``, ``t < lam^(-2/a)``.
    Family "scale": ``f_q(lam t) <= f_q(t)`` for ``lam <= 1`` and
    ``f_q(lam t) <= 2^q f_q(t)`` for ``lam > 1``, ``t < lam^-2``.

    Draws that push an argument of ``f_q`` outside ``(0, 1)`` are rejected and redrawn.
    ``rtol`` tolerates rounding at cases of exact equality.
    """
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")
    rng = np.random.default_rng(seed)
    report = FqReport(q=q, samples=samples)
    n = samples // 4 + 1

    def record(name, lhs, rhs):
        margin = rhs / lhs - 1.0
        bad = int(np.sum(margin < -rtol))
        report.failures += bad
        worst = float(margin.min())
        report.per_family[name] = (lhs.size, bad, worst)
        report.worst_margin = min(report.worst_margin, worst)

    def log_uniform(lo, hi, size):
        return np.exp(rng.uniform(np.log(lo), np.log(hi), size))

    def draw_power(lam_gen, t_gen, bound):
        # rejection-sample until n points keep both arguments inside (0, 1)
        cols = [np.empty(0)] * 4
        while cols[0].size < n:
            lam = lam_gen(n)
            a = log_uniform(0.05, 20.0, n)
            b = log_uniform(0.05, 20.0, n)
            t = t_gen(lam, a)
            arg_a, arg_b = lam * t ** a, lam * t ** b
            ok = (arg_a > 0) & (arg_a < 1) & (arg_b > 0) & (arg_b < 1)
            new = (arg_a[ok], arg_b[ok], a[ok], b[ok])
            cols = [np.concatenate([c, v]) for c, v in zip(cols, new)]
        arg_a, arg_b, a, b = (c[:n] for c in cols)
        return f_q(q, arg_a), bound(a, b) * f_q(q, arg_b)

    record("power, lam<=1", *draw_power(
        lambda k: rng.uniform(1e-6, 1.0, k),
        lambda lam, a: log_uniform(1e-12, 1.0 - 1e-9, lam.size),
        lambda a, b: np.maximum(1.0, (b / a) ** q)))
    # for 2b <= a the ratio is bounded by 1
    record("power, lam>1", *draw_power(
        lambda k: log_uniform(1.0 + 1e-9, 1e3, k),
        lambda lam, a: lam ** (-2.0 / a) * rng.uniform(1e-6, 1.0, lam.size),
        lambda a, b: np.where(2.0 * b > a, np.maximum(1.0, np.abs((2.0 * b - a) / a) ** q), 1.0)))

    # scale family
    lam = rng.uniform(1e-6, 1.0, n)
    t = log_uniform(1e-12, 1.0 - 1e-9, n)
    record("scale, lam<=1", f_q(q, lam * t), f_q(q, t))

    lam = log_uniform(1.0 + 1e-9, 1e3, n)
    t = lam ** -2.0 * rng.uniform(1e-6, 1.0, n)
    record("scale, lam>1", f_q(q, lam * t), 2.0 ** q * f_q(q, t))
    return report
