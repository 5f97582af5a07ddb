"""Diffusion multiplier and the forward (blurring) operator.

For ``u_t + gamma(t) (-Laplace)^tau u = 0`` the final state is the Fourier
multiplier

    psi(xi) = exp(-|2 pi xi|^(2 tau) * Gamma),    Gamma = \\int_0^T gamma

applied to the initial state.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, InvalidFieldError
from .grid import Grid2D, RealField, forward_ft, inverse_ft

__all__ = [
    "Conductivity",
    "DiffusionSymbol",
    "integrate_conductivity",
    "build_symbol",
    "apply_forward",
    "truncated_operator",
    "read_conductivity_csv",
]


@dataclass(frozen=True)
class Conductivity:
    """Time-dependent conductivity on ``[0, T]``.

    Either affine, ``gamma(t) = c0 + c1 * t`` (the form of every closed-form
    case used in the examples), or tabulated as samples ``(t, gamma)``.
    """

    T: float
    c0: float | None = None
    c1: float = 0.0
    t: tuple[float, ...] | None = None
    gamma: tuple[float, ...] | None = None

    @classmethod
    def affine(cls, c0: float, c1: float = 0.0, T: float = 1.0) -> "Conductivity":
        return cls(T=float(T), c0=float(c0), c1=float(c1))

    @classmethod
    def constant(cls, value: float, T: float = 1.0) -> "Conductivity":
        return cls.affine(value, 0.0, T)

    @classmethod
    def tabulated(cls, t, gamma) -> "Conductivity":
        t = tuple(float(v) for v in t)
        gamma = tuple(float(v) for v in gamma)
        if len(t) != len(gamma) or len(t) < 2:
            raise DomainError("tabulated conductivity needs >= 2 matching (t, gamma) samples")
        if t[0] != 0.0 or any(b <= a for a, b in zip(t, t[1:])):
            raise DomainError("tabulated t must start at 0 and increase strictly")
        return cls(T=t[-1], t=t, gamma=gamma)

    @property
    def is_tabulated(self) -> bool:
        return self.t is not None

    def __call__(self, t):
        if self.is_tabulated:
            return np.interp(t, self.t, self.gamma)
        return self.c0 + self.c1 * np.asarray(t, dtype=float)


def integrate_conductivity(c: Conductivity) -> float:
    """``Gamma = \\int_0^T gamma(t) dt``.

    Affine forms are integrated exactly; tabulated samples use composite
    Simpson.
    """
    if not c.T > 0:
        raise DomainError(f"final time must be positive, got {c.T}")
    if c.is_tabulated:
        g = np.asarray(c.gamma)
        if np.any(g <= 0):
            raise DomainError("conductivity must be positive on [0, T]")
        return float(simpson(g, x=np.asarray(c.t)))
    if min(c.c0, c.c0 + c.c1 * c.T) <= 0:
        raise DomainError("conductivity must be positive on [0, T]")
    return c.c0 * c.T + 0.5 * c.c1 * c.T ** 2


@dataclass(frozen=True)
class DiffusionSymbol:
    """Radial multiplier ``psi(xi) = exp(-|2 pi xi|^(2 tau) Gamma)``.

    A finite ``truncation_radius`` R zeroes the multiplier for ``|xi| > R``,
    giving the perturbed operator ``A_h``.
    """

    tau: float
    Gamma: float
    truncation_radius: float = math.inf

    def __post_init__(self):
        if not 0 < self.tau <= 1:
            raise DomainError(f"tau must lie in (0, 1], got {self.tau}")
        if not (self.Gamma > 0 and math.isfinite(self.Gamma)):
            raise DomainError(f"Gamma must be positive, got {self.Gamma}")
        if not self.truncation_radius > 0:
            raise DomainError(f"truncation radius must be positive, got {self.truncation_radius}")

    def from_sq(self, r2):
        """Evaluate at squared radii ``|xi|^2``."""
        r2 = np.asarray(r2, dtype=float)
        val = np.exp(-((4.0 * np.pi ** 2 * r2) ** self.tau) * self.Gamma)
        if math.isfinite(self.truncation_radius):
            val = np.where(r2 <= self.truncation_radius ** 2, val, 0.0)
        return val

    def __call__(self, xi_norm):
        """Evaluate at radii ``|xi|``."""
        return self.from_sq(np.square(xi_norm))

    def on_grid(self, grid: Grid2D) -> np.ndarray:
        return grid.expand_radial(self.from_sq(grid.radii_sq))

    @property
    def h(self) -> float:
        """Operator-norm gap ``sup_{|xi| > R} psi`` to the untruncated symbol."""
        R = self.truncation_radius
        if not math.isfinite(R):
            return 0.0
        return math.exp(-((2.0 * math.pi * R) ** (2.0 * self.tau)) * self.Gamma)


def build_symbol(tau: float, Gamma: float) -> DiffusionSymbol:
    return DiffusionSymbol(float(tau), float(Gamma))


def apply_forward(sym: DiffusionSymbol, u0: RealField) -> RealField:
    """Diffuse ``u0`` for the full time horizon: ``F^-1 psi F u0``."""
    return inverse_ft(forward_ft(u0).multiply(sym.on_grid(u0.grid)))


def truncated_operator(sym: DiffusionSymbol, R: float) -> tuple[DiffusionSymbol, float]:
    """Restrict ``sym`` to the ball ``|xi| <= R``.

    Returns the truncated symbol and ``h = exp(-(2 pi R)^(2 tau) Gamma)``, the
    tight bound on ``|||A - A_h|||``.
    """
    if not R > 0:
        raise DomainError(f"truncation radius must be positive, got {R}")
    out = replace(sym, truncation_radius=float(R))
    return out, out.h


def read_conductivity_csv(path: str | os.PathLike) -> Conductivity:
    """Read a ``t,gamma`` CSV table."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["t", "gamma"]:
            raise InvalidFieldError(f"{path}: expected header 't,gamma'")
        rows = [(float(r["t"]), float(r["gamma"])) for r in reader]
    if not rows:
        raise InvalidFieldError(f"{path}: no samples")
    t, gamma = zip(*rows)
    return Conductivity.tabulated(t, gamma)
