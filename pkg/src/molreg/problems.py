"""The four benchmark backward-diffusion problems (final time T = 1).

=====  =====  ==================  ===============================================
id     tau    gamma(t)            u(x, 0)
=====  =====  ==================  ===============================================
1      1      0.1 (3 - 2 t)       exp(-x1^2 - x2^2)
2      1      0.1 (2 - t)         v(x1) v(x2), v the triangle on [-3, 3]
3      1      0.1                 indicator of [-5, 5]^2
4      1/2    0.1                 Shepp-Logan head phantom on [-L, L]^2
=====  =====  ==================  ===============================================
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError
from .forward import Conductivity, DiffusionSymbol, apply_forward, build_symbol, integrate_conductivity
from .grid import Grid2D, RealField

__all__ = [
    "ProblemSpec",
    "get_problem",
    "custom_problem",
    "make_initial",
    "make_exact_data",
    "exact_pair",
    "shepp_logan",
    "SHEPP_LOGAN",
]

# intensity, semi-axis a, semi-axis b, centre x, centre y, rotation (degrees)
SHEPP_LOGAN = (
    (1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0),
    (-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0),
    (-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0),
    (-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0),
    (0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0),
    (0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0),
    (0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0),
    (0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0),
    (0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0),
    (0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0),
)


def shepp_logan(x1, x2, scale: float = 1.0):
    """Shepp-Logan phantom on ``[-scale, scale]^2``, clipped to ``[0, 1]``.

    ``x1`` plays the role of the horizontal image axis and ``x2`` the vertical.
    """
    x = np.asarray(x1, dtype=float) / scale
    y = np.asarray(x2, dtype=float) / scale
    out = np.zeros(np.broadcast(x, y).shape)
    for amp, a, b, x0, y0, deg in SHEPP_LOGAN:
        th = np.deg2rad(deg)
        c, s = np.cos(th), np.sin(th)
        dx, dy = x - x0, y - y0
        u = (dx * c + dy * s) / a
        v = (-dx * s + dy * c) / b
        out += np.where(u * u + v * v <= 1.0, amp, 0.0)
    return np.clip(out, 0.0, 1.0)


def _gaussian(x1, x2):
    return np.exp(-np.square(x1) - np.square(x2))


def _triangle(lam):
    lam = np.asarray(lam, dtype=float)
    return np.where(np.abs(lam) <= 3.0, 1.0 - np.abs(lam) / 3.0, 0.0)


def _triangles(x1, x2):
    return _triangle(x1) * _triangle(x2)


def _box(x1, x2):
    inside = (np.abs(x1) <= 5.0) & (np.abs(x2) <= 5.0)
    return inside.astype(float)


@dataclass(frozen=True)
class ProblemSpec:
    """One benchmark problem.

    ``initial_data(x1, x2, L)`` evaluates ``u(., 0)`` at arbitrary points; ``L``
    only matters for data that scale with the window (the phantom).
    """

    id: int
    tau: float
    conductivity: Conductivity
    initial_data: Callable
    sobolev_note: str

    @property
    def Gamma(self) -> float:
        return integrate_conductivity(self.conductivity)

    @property
    def symbol(self) -> DiffusionSymbol:
        return build_symbol(self.tau, self.Gamma)


_PROBLEMS = {
    1: ProblemSpec(1, 1.0, Conductivity.affine(0.3, -0.2), lambda x1, x2, L: _gaussian(x1, x2),
                   "in H^p for every p > 0"),
    2: ProblemSpec(2, 1.0, Conductivity.affine(0.2, -0.1), lambda x1, x2, L: _triangles(x1, x2),
                   "in H^1"),
    3: ProblemSpec(3, 1.0, Conductivity.constant(0.1), lambda x1, x2, L: _box(x1, x2),
                   "in H^p for p < 1/2"),
    4: ProblemSpec(4, 0.5, Conductivity.constant(0.1), lambda x1, x2, L: shepp_logan(x1, x2, L),
                   "in no H^p with p > 0"),
}


def get_problem(example_id: int) -> ProblemSpec:
    try:
        return _PROBLEMS[int(example_id)]
    except (KeyError, ValueError, TypeError):
        raise DomainError(f"unknown example id {example_id!r}; expected 1..4") from None


def custom_problem(u0: RealField, tau: float, conductivity: Conductivity) -> ProblemSpec:
    """Problem whose initial state is a sampled field (e.g. read from a file)."""
    grid, values = u0.grid, u0.values

    def initial(x1, x2, L):
        if L != grid.L or np.shape(x1) != grid.shape:
            raise DomainError("a sampled initial state can only be evaluated on its own grid")
        return values

    return ProblemSpec(0, float(tau), conductivity, initial, "user supplied")


def make_initial(p: ProblemSpec, grid: Grid2D) -> RealField:
    x1, x2 = grid.mesh()
    return RealField(grid, p.initial_data(x1, x2, grid.L))


@lru_cache(maxsize=32)
def _cached_exact(example_id: int, grid: Grid2D) -> tuple[RealField, RealField]:
    p = get_problem(example_id)
    u0 = make_initial(p, grid)
    return u0, apply_forward(p.symbol, u0)


def make_exact_data(p: ProblemSpec, grid: Grid2D) -> RealField:
    """Final state ``u(., T)`` of the problem."""
    if p.id in _PROBLEMS and _PROBLEMS[p.id] is p:
        return _cached_exact(p.id, grid)[1]
    return apply_forward(p.symbol, make_initial(p, grid))


def exact_pair(example_id: int, grid: Grid2D) -> tuple[RealField, RealField]:
    """``(u0, g)`` for a catalogue problem, cached per grid."""
    get_problem(example_id)
    return _cached_exact(int(example_id), grid)
