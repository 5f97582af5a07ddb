"""Uniform 2-D grids and a quadrature-accurate continuous Fourier transform.

The spatial window ``[-L, L]^2`` is sampled at ``N`` half-offset nodes per axis,

    x_i = -L + (i + 1/2) * kappa,      kappa = 2L / N,       i = 0..N-1

and the matching frequency window ``[-Omega, Omega]^2`` with ``Omega = N / (4L)``
uses the same half-offset convention,

    xi_k = -Omega + (k + 1/2) * dxi,   dxi = 1 / (2L).

Because ``kappa * dxi = 1 / N`` the midpoint-rule approximation of

    F(f)(xi) = \\int f(x) exp(-2 pi i x . xi) dx

collapses to one FFT bracketed by phase factors, and the discrete pair is an
exact inverse of each other. Weighted norms (``kappa`` in space, ``dxi`` in
frequency) make Parseval hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft

from .errors import DimensionError, DomainError, InvalidFieldError

__all__ = [
    "Grid2D",
    "RealField",
    "SpectralField",
    "forward_ft",
    "inverse_ft",
    "l2_norm",
]


@dataclass(frozen=True)
class Grid2D:
    """``N x N`` grid on ``[-L, L]^2`` with its frequency window.

    Parameters
    ----------
    N : int
        Samples per axis, positive and even.
    L : float
        Half-width of the spatial window.
    """

    N: int
    L: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N <= 0 or self.N % 2:
            raise DomainError(f"N must be a positive even integer, got {self.N!r}")
        if not np.isfinite(self.L) or self.L <= 0:
            raise DomainError(f"L must be positive and finite, got {self.L!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def kappa(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def Omega(self) -> float:
        return self.N / (4.0 * self.L)

    @property
    def xi_spacing(self) -> float:
        return 1.0 / (2.0 * self.L)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N, self.N)

    @cached_property
    def _offsets(self) -> np.ndarray:
        # k + 1/2 - N/2 is exact in binary, so node sets are exactly symmetric
        return np.arange(self.N) + 0.5 - self.N / 2

    @cached_property
    def x(self) -> np.ndarray:
        """Spatial nodes along one axis."""
        return self._offsets * self.kappa

    @cached_property
    def xi(self) -> np.ndarray:
        """Frequency nodes along one axis."""
        return self._offsets * self.xi_spacing

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Spatial coordinates ``(x1, x2)``, indexed ``[i over x1, j over x2]``."""
        return np.meshgrid(self.x, self.x, indexing="ij")

    @cached_property
    def _radial(self) -> tuple[np.ndarray, np.ndarray]:
        # |xi|^2 = (dxi / 2)^2 * (m1^2 + m2^2) with m = 2k + 1 - N odd integers,
        # so integer keys identify equal radii exactly
        m = 2 * np.arange(self.N) + 1 - self.N
        key = (m[:, None] ** 2 + m[None, :] ** 2).ravel()
        uniq, inverse = np.unique(key, return_inverse=True)
        r2 = uniq * (self.xi_spacing / 2.0) ** 2
        return r2, inverse.reshape(self.shape)

    @property
    def radii_sq(self) -> np.ndarray:
        """Distinct values of ``|xi|^2`` over the frequency nodes (ascending)."""
        return self._radial[0]

    @property
    def radial_index(self) -> np.ndarray:
        """``N x N`` map from each frequency node to its entry in :attr:`radii_sq`."""
        return self._radial[1]

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """``|xi|^2`` at every frequency node."""
        return self.radii_sq[self.radial_index]

    def expand_radial(self, values: np.ndarray) -> np.ndarray:
        """Scatter a radial profile given on :attr:`radii_sq` onto the full grid."""
        return np.asarray(values)[self.radial_index]

    def radial_sum(self, weights: np.ndarray) -> np.ndarray:
        """Sum node weights over each distinct radius."""
        return np.bincount(self.radial_index.ravel(), weights=np.ravel(weights),
                           minlength=self.radii_sq.size)

    @cached_property
    def _phases(self) -> tuple[np.ndarray, np.ndarray]:
        x0, xi0 = self.x[0], self.xi[0]
        j = np.arange(self.N)
        pre = np.exp(-2j * np.pi * xi0 * self.kappa * j)
        post = np.exp(-2j * np.pi * x0 * self.xi_spacing * j) * np.exp(-2j * np.pi * x0 * xi0)
        return pre, post


@dataclass(frozen=True, eq=False)
class RealField:
    """Real samples of a function on :class:`Grid2D` nodes."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.iscomplexobj(v):
            raise InvalidFieldError("RealField values must be real")
        v = np.array(v, dtype=float)
        if v.shape != self.grid.shape:
            raise InvalidFieldError(f"expected shape {self.grid.shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidFieldError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def _other(self, other):
        if isinstance(other, RealField):
            if other.grid != self.grid:
                raise DimensionError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return RealField(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RealField(self.grid, self.values - self._other(other))

    def __mul__(self, scalar):
        return RealField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return RealField(self.grid, -self.values)

    @classmethod
    def zeros(cls, grid: Grid2D) -> "RealField":
        return cls(grid, np.zeros(grid.shape))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients sampled at the frequency nodes of a :class:`Grid2D`."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise InvalidFieldError(f"expected shape {self.grid.shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidFieldError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def multiply(self, multiplier: np.ndarray) -> "SpectralField":
        """Pointwise product with a real multiplier sampled on the nodes."""
        return SpectralField(self.grid, self.values * multiplier)


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise InvalidFieldError("field contains non-finite values")


def forward_ft(f: RealField) -> SpectralField:
    """Continuous Fourier transform of ``f`` sampled at the frequency nodes."""
    _check_finite(f.values)
    g = f.grid
    pre, post = g._phases
    spec = scipy.fft.fft2(f.values * np.outer(pre, pre))
    spec *= np.outer(post, post) * g.kappa ** 2
    return SpectralField(g, spec)


def inverse_ft(F: SpectralField, imag_rtol: float = 1e-8) -> RealField:
    """Inverse of :func:`forward_ft`.

    The imaginary part of the synthesis is dropped after checking that it is
    at most ``imag_rtol * max|f|``; a larger residue means ``F`` is not the
    transform of a real field.
    """
    _check_finite(F.values)
    g = F.grid
    pre, post = g._phases
    spat = scipy.fft.ifft2(F.values * np.outer(post.conj(), post.conj()))
    spat *= np.outer(pre.conj(), pre.conj()) * (g.N * g.xi_spacing) ** 2
    scale = np.max(np.abs(spat)) if spat.size else 0.0
    residue = np.max(np.abs(spat.imag)) if spat.size else 0.0
    if residue > imag_rtol * scale:
        raise InvalidFieldError(
            f"spectrum is not Hermitian: imaginary residue {residue:.3e} vs scale {scale:.3e}")
    return RealField(g, spat.real)


def l2_norm(f: RealField | SpectralField) -> float:
    """Quadrature L2 norm, weighted so that Parseval holds exactly."""
    _check_finite(f.values)
    w = f.grid.kappa if isinstance(f, RealField) else f.grid.xi_spacing
    return float(w * np.linalg.norm(f.values))


def require_same_grid(*objs) -> Grid2D:
    grids = {o.grid for o in objs}
    if len(grids) != 1:
        raise DimensionError("inputs live on different grids")
    return grids.pop()
