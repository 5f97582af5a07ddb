"""Mollifier operators ``C_beta f = phi_beta * f`` as Fourier multipliers.

``phi_beta(x) = beta^-2 phi(x / beta)`` has transform ``phi_hat(beta xi)``, so
``C_beta`` is diagonal in frequency and the penalty ``||(I - C_beta) u||^2``
has symbol ``|1 - phi_hat(beta xi)|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .grid import RealField, forward_ft, inverse_ft

__all__ = [
    "MollifierSymbol",
    "gaussian",
    "register_mollifier",
    "phi_hat",
    "penalty_symbol",
    "apply_mollifier",
    "unit_circle_extremes",
]


def _gaussian_hat(r2):
    return np.exp(-2.0 * np.pi ** 2 * r2)


def _gaussian_one_minus(r2):
    return -np.expm1(-2.0 * np.pi ** 2 * r2)


@dataclass(frozen=True)
class MollifierSymbol:
    """Radial mollifier transform ``phi_hat`` and its small-frequency order ``s``.

    ``hat`` and ``one_minus`` take squared radii ``|xi|^2``; ``one_minus``
    evaluates ``1 - phi_hat`` without cancellation when supplied.
    """

    kind: str
    s: float
    hat: Callable[[np.ndarray], np.ndarray]
    one_minus: Callable[[np.ndarray], np.ndarray] | None = None

    def hat_sq(self, r2, beta: float) -> np.ndarray:
        _check_beta(beta)
        return self.hat(beta ** 2 * np.asarray(r2, dtype=float))

    def one_minus_sq(self, r2, beta: float) -> np.ndarray:
        _check_beta(beta)
        r2 = beta ** 2 * np.asarray(r2, dtype=float)
        if self.one_minus is not None:
            return self.one_minus(r2)
        return 1.0 - self.hat(r2)

    def penalty_sq(self, r2, beta: float) -> np.ndarray:
        return np.square(self.one_minus_sq(r2, beta))


def _check_beta(beta):
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")


def gaussian() -> MollifierSymbol:
    """Standard normal kernel ``phi(x) = exp(-|x|^2 / 2) / (2 pi)``; ``s = 2``."""
    return MollifierSymbol("gaussian", 2.0, _gaussian_hat, _gaussian_one_minus)


def register_mollifier(kind: str, hat, s: float, one_minus=None,
                       r2_max: float = 100.0, samples: int = 2001) -> MollifierSymbol:
    """Wrap a user-supplied radial transform after sampling its required properties.

    Checks ``hat(0) = 1``, ``0 <= hat < 1`` away from the origin and radial
    decrease on ``[0, r2_max]``.
    """
    if not s > 0:
        raise DomainError(f"exponent s must be positive, got {s}")
    r2 = np.linspace(0.0, r2_max, samples)
    vals = np.asarray(hat(r2), dtype=float)
    if not np.isclose(vals[0], 1.0, rtol=0, atol=1e-12):
        raise DomainError(f"{kind}: phi_hat(0) must equal 1 (unit mass), got {vals[0]}")
    if np.any(np.abs(vals[1:]) >= 1.0):
        raise DomainError(f"{kind}: |phi_hat| must be < 1 away from the origin")
    if np.any(np.diff(vals) > 0):
        raise DomainError(f"{kind}: phi_hat must be radially decreasing")
    return MollifierSymbol(kind, float(s), hat, one_minus)


def phi_hat(m: MollifierSymbol, xi, beta: float) -> np.ndarray:
    """``phi_hat(beta xi)`` for frequency points ``xi`` (last axis = components)."""
    xi = np.asarray(xi, dtype=float)
    return m.hat_sq(np.sum(xi ** 2, axis=-1), beta)


def penalty_symbol(m: MollifierSymbol, beta: float, xi) -> np.ndarray:
    """``|1 - phi_hat(beta xi)|^2``."""
    xi = np.asarray(xi, dtype=float)
    return m.penalty_sq(np.sum(xi ** 2, axis=-1), beta)


def apply_mollifier(m: MollifierSymbol, beta: float, f: RealField) -> RealField:
    grid = f.grid
    mult = grid.expand_radial(m.hat_sq(grid.radii_sq, beta))
    return inverse_ft(forward_ft(f).multiply(mult))


def unit_circle_extremes(m: MollifierSymbol, beta: float, n_angles: int = 360) -> tuple[float, float]:
    """``(m_beta, M_beta)``: min and max of the penalty symbol on ``|xi| = 1``."""
    theta = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    xi = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    vals = penalty_symbol(m, beta, xi)
    return float(vals.min()), float(vals.max())
