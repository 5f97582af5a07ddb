"""Variational mollification filter and regularization-parameter rules.

The regularized solution minimizes

    J_beta(u) = ||A u - g||^2 + ||(I - C_beta) u||^2.

Both operators are Fourier multipliers, so the normal equation is diagonal
and the minimizer is

    u_beta^ = psi g^ / (psi^2 + |1 - phi_hat(beta xi)|^2).

The data misfit of that minimizer has symbol

    Pi(beta, xi) = |1 - phi_hat|^2 / (psi^2 + |1 - phi_hat|^2),

which is increasing in beta; Morozov-style selection walks a geometric
sequence of beta downward until the misfit drops below ``delta + delta**r``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, NoiseDominatedError, NonConvergenceError
from .forward import DiffusionSymbol, apply_forward
from .grid import Grid2D, RealField, SpectralField, forward_ft, inverse_ft, l2_norm, require_same_grid
from .mollifier import MollifierSymbol, apply_mollifier

__all__ = [
    "FilterSpec",
    "SelectionResult",
    "DiscrepancyCurve",
    "reconstruct",
    "reconstruct_spectral",
    "objective",
    "variational_check",
    "discrepancy",
    "select_beta_apriori",
    "select_beta_morozov",
    "noisy_operator_beta",
]

log = logging.getLogger(__name__)

MAX_ITER = 5000


def _check_beta(beta):
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError(f"beta must be positive and finite, got {beta}")


@dataclass(frozen=True, eq=False)
class FilterSpec:
    """Forward symbol, mollifier and grid defining one regularization problem."""

    diffusion: DiffusionSymbol
    mollifier: MollifierSymbol
    grid: Grid2D

    @cached_property
    def psi(self) -> np.ndarray:
        """Diffusion multiplier on the distinct grid radii."""
        return self.diffusion.from_sq(self.grid.radii_sq)

    def penalty(self, beta: float) -> np.ndarray:
        return self.mollifier.penalty_sq(self.grid.radii_sq, beta)

    def transfer(self, beta: float) -> np.ndarray:
        """``psi / (psi^2 + penalty)`` on the distinct radii."""
        _check_beta(beta)
        denom = self.psi ** 2 + self.penalty(beta)
        return np.divide(self.psi, denom, out=np.zeros_like(denom), where=denom > 0)

    def residual_symbol(self, beta: float) -> np.ndarray:
        """``Pi(beta, .)`` on the distinct radii."""
        _check_beta(beta)
        pen = self.penalty(beta)
        denom = self.psi ** 2 + pen
        return np.divide(pen, denom, out=np.ones_like(denom), where=denom > 0)

    def mu(self, beta: float) -> float:
        """``min_xi (psi^2 + penalty)`` over the grid nodes."""
        _check_beta(beta)
        return float(np.min(self.psi ** 2 + self.penalty(beta)))


@dataclass(frozen=True)
class SelectionResult:
    """Chosen regularization parameter and its diagnostics.

    For the discrepancy rule, ``bracket_residual`` is the misfit at ``beta / q``
    (``None`` when the initial guess was already feasible), so that
    ``residual <= target < bracket_residual`` certifies the choice.
    """

    beta: float
    rule: str
    residual: float | None = None
    target: float | None = None
    iterations: int = 0
    bracket_residual: float | None = None
    q: float | None = None


def reconstruct_spectral(spec: FilterSpec, beta: float, g_hat: SpectralField) -> SpectralField:
    return g_hat.multiply(spec.grid.expand_radial(spec.transfer(beta)))


def reconstruct(spec: FilterSpec, beta: float, g: RealField) -> RealField:
    """Minimizer of ``J_beta(., A, g)``."""
    _check_beta(beta)
    require_same_grid(spec, g)
    return inverse_ft(reconstruct_spectral(spec, beta, forward_ft(g)))


def objective(spec: FilterSpec, beta: float, u: RealField, g: RealField) -> float:
    """``J_beta(u) = ||A u - g||^2 + ||(I - C_beta) u||^2``, evaluated in space."""
    fit = l2_norm(apply_forward(spec.diffusion, u) - g)
    pen = l2_norm(u - apply_mollifier(spec.mollifier, beta, u))
    return fit ** 2 + pen ** 2


def variational_check(spec: FilterSpec, beta: float, g: RealField, u_star: RealField,
                      trials: int = 64, seed: int = 0, scales=(1e-1, 1e-3),
                      rtol: float = 1e-12) -> bool:
    """Test that ``u_star`` minimizes ``J_beta`` against random perturbations.

    Each of ``trials`` white-noise directions is applied at every relative
    scale in ``scales``. ``rtol`` absorbs floating-point noise in ``J``.

    ``J`` is evaluated on the transforms (Parseval is exact on the grid), so
    each direction costs a single FFT.
    """
    _check_beta(beta)
    grid = require_same_grid(spec, g, u_star)
    rng = np.random.default_rng(seed)
    psi = grid.expand_radial(spec.psi)
    pen = grid.expand_radial(spec.mollifier.one_minus_sq(grid.radii_sq, beta))
    g_hat = forward_ft(g).values
    u_hat = forward_ft(u_star).values
    w2 = grid.xi_spacing ** 2

    def J(v_hat):
        return w2 * (np.sum(np.abs(psi * v_hat - g_hat) ** 2) + np.sum(np.abs(pen * v_hat) ** 2))

    j0 = J(u_hat)
    ref = l2_norm(u_star) or 1.0
    for _ in range(trials):
        p = rng.standard_normal(grid.shape)
        p *= ref / (grid.kappa * np.linalg.norm(p))
        p_hat = forward_ft(RealField(grid, p)).values
        for scale in scales:
            j1 = J(u_hat + scale * p_hat)
            if j1 < j0 * (1.0 - rtol):
                log.debug("perturbation at scale %g lowered J: %.17g < %.17g", scale, j1, j0)
                return False
    return True


class DiscrepancyCurve:
    """``beta -> ||A u_beta - g_delta||`` for fixed data.

    The data spectrum is reduced to per-radius energies once, so each
    evaluation costs one pass over the distinct radii.
    """

    def __init__(self, spec: FilterSpec, g_hat: SpectralField):
        require_same_grid(spec, g_hat)
        self.spec = spec
        self.energy = spec.grid.radial_sum(np.abs(g_hat.values) ** 2)

    def __call__(self, beta: float) -> float:
        pi = self.spec.residual_symbol(beta)
        return float(self.spec.grid.xi_spacing * math.sqrt(np.dot(pi ** 2, self.energy)))


def discrepancy(spec: FilterSpec, beta: float, g_delta: RealField) -> float:
    """``||Pi(beta, .) g_delta^||``, the misfit norm of the regularized solution."""
    _check_beta(beta)
    return DiscrepancyCurve(spec, forward_ft(g_delta))(beta)


def select_beta_apriori(delta: float, c: float, s: float) -> SelectionResult:
    """``beta = c * delta**(1 / (2 s))``."""
    for name, v in (("delta", delta), ("c", c), ("s", s)):
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")
    return SelectionResult(beta=c * delta ** (1.0 / (2.0 * s)), rule="apriori")


def select_beta_morozov(spec: FilterSpec, g_delta: RealField, delta: float, r: float = 1.0,
                        beta0: float = 10.0, q: float = 0.98,
                        max_iter: int = MAX_ITER) -> SelectionResult:
    """Discrepancy rule by geometric descent.

    Returns the first ``beta = beta0 * q**k`` whose misfit is at most
    ``delta + delta**r``.

    Raises
    ------
    NoiseDominatedError
        If ``delta + delta**r > ||g_delta|| / 2``.
    NonConvergenceError
        If no feasible ``beta`` appears within ``max_iter`` steps.
    """
    if not 0 < r <= 1:
        raise DomainError(f"r must lie in (0, 1], got {r}")
    if not 0 < q < 1:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    _check_beta(beta0)
    if not delta >= 0:
        raise DomainError(f"delta must be nonnegative, got {delta}")
    require_same_grid(spec, g_delta)
    target = delta + delta ** r
    g_norm = l2_norm(g_delta)
    if target > 0.5 * g_norm:
        raise NoiseDominatedError(
            f"delta + delta^r = {target:.6g} exceeds ||g_delta|| / 2 = {0.5 * g_norm:.6g}")

    curve = DiscrepancyCurve(spec, forward_ft(g_delta))
    k = 0
    beta = beta0
    res = curve(beta)
    prev = None
    while res > target:
        if k >= max_iter:
            raise NonConvergenceError(
                f"discrepancy still {res:.6g} > {target:.6g} after {max_iter} steps (beta={beta:.3g})")
        prev = res
        k += 1
        beta = beta0 * q ** k
        res = curve(beta)
    log.debug("morozov: beta=%.6g after %d steps (residual %.6g, target %.6g)", beta, k, res, target)
    return SelectionResult(beta=beta, rule="morozov", residual=res, target=target,
                           iterations=k, bracket_residual=prev, q=q)


def noisy_operator_beta(delta: float, h: float, rho: float, s: float) -> float:
    """``(h + delta / rho)**(1 / (2 s))`` for studies where ``rho`` is known."""
    if not (delta >= 0 and h >= 0 and rho > 0 and s > 0) or delta + h == 0:
        raise DomainError("need delta, h >= 0 (not both zero) and rho, s > 0")
    return (h + delta / rho) ** (1.0 / (2.0 * s))
