"""Periodic pseudospectral building blocks.

Everything downstream (norms, linear solves, nonlinear fixed-point runs)
works on Fourier coefficients of functions on the torus ``[0, L)^n``.  A
field is stored as the full complex coefficient array in the usual FFT
layout; the coefficient ``c_k`` multiplies ``exp(i <2*pi*k/L, x>)``, so a
physical sample array ``u`` and its coefficients are related by
``c = fftn(u) / N**n``.  With this normalisation a single mode has unit
coefficient and Parseval reads ``||u||_L2 = L**(n/2) * ||c||_2``.

Products (tensor divergence, pointwise powers) are formed in physical
space with two-thirds dealiasing applied before and after.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "TorusGrid",
    "SpectralField",
    "FourierMultiplier",
    "identity_multiplier",
    "laplacian_multiplier",
    "heat_multiplier",
    "sector_multiplier",
    "constant_multiplier",
    "resolvent_scalar_multiplier",
    "apply_multiplier",
    "heat_semigroup_apply",
    "fractional_laplacian_apply",
    "helmholtz_project",
    "gradient",
    "divergence",
    "tensor_divergence",
    "pointwise_power_nonlinearity",
    "dealias",
]

#: Relative tolerance used when a nominally-real physical field is checked.
_REALITY_TOL = 1e-10


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the torus ``[0, L)^n`` with FFT wavevectors.

    Parameters
    ----------
    dimension:
        Spatial dimension ``n >= 1``.
    points_per_axis:
        Number of points ``N`` per axis; must be a power of two, ``N >= 4``.
    period:
        Side length ``L > 0`` of the torus.
    """

    dimension: int = 2
    points_per_axis: int = 64
    period: float = 2.0 * np.pi

    def __post_init__(self) -> None:
        n, N, L = self.dimension, self.points_per_axis, self.period
        if n < 1:
            raise ValueError("dimension must be positive")
        if N < 4 or (N & (N - 1)) != 0:
            raise ValueError("points_per_axis must be a power of two, at least 4")
        if not L > 0:
            raise ValueError("period must be positive")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dimension

    @property
    def cell_volume(self) -> float:
        return (self.period / self.points_per_axis) ** self.dimension

    @property
    def volume(self) -> float:
        return self.period ** self.dimension

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """1-D wavevector component ``2*pi*k/L`` in FFT ordering."""
        N = self.points_per_axis
        return 2.0 * np.pi * np.fft.fftfreq(N, d=self.period / N)

    @cached_property
    def xi(self) -> np.ndarray:
        """Stacked wavevectors, shape ``(n,) + shape``."""
        axes = np.meshgrid(*([self.wavenumbers] * self.dimension), indexing="ij")
        return np.stack(axes)

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """``|xi|**2``, the symbol of ``-Laplacian``."""
        return np.sum(self.xi**2, axis=0)

    @cached_property
    def laplacian_spectrum(self) -> np.ndarray:
        """Sorted distinct eigenvalues of ``-Laplacian`` on this grid."""
        return np.unique(self.xi_sq)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean mask keeping ``|k| < N/3`` along every axis (2/3 rule)."""
        N = self.points_per_axis
        k = np.fft.fftfreq(N, d=1.0 / N)  # integer mode numbers
        keep_1d = np.abs(k) < N / 3.0
        mask = np.ones(self.shape, dtype=bool)
        for axis in range(self.dimension):
            idx = [np.newaxis] * self.dimension
            idx[axis] = slice(None)
            mask &= keep_1d[tuple(idx)]
        return mask

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Physical grid coordinates, shape ``(n,) + shape``."""
        x1 = np.linspace(0.0, self.period, self.points_per_axis, endpoint=False)
        return np.stack(np.meshgrid(*([x1] * self.dimension), indexing="ij"))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier-side representation of an ``m``-component field.

    ``coefficients`` has shape ``(m,) + grid.shape`` and is complex.  Real
    physical fields correspond to conjugate-symmetric coefficients; that
    symmetry is never enforced on construction, only checked where an
    operation requires real samples.
    """

    grid: TorusGrid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coeff = np.asarray(self.coefficients, dtype=np.complex128)
        if coeff.ndim == self.grid.dimension:
            coeff = coeff[np.newaxis]
        if coeff.shape[1:] != self.grid.shape:
            raise ValueError(
                f"coefficient shape {coeff.shape} incompatible with grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "coefficients", coeff)

    # -- basic queries -------------------------------------------------

    @property
    def components(self) -> int:
        return self.coefficients.shape[0]

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        return tuple(range(1, self.grid.dimension + 1))

    def is_mean_free(self, tol: float = 1e-12) -> bool:
        zero_mode = self.coefficients[(slice(None),) + (0,) * self.grid.dimension]
        scale = max(1.0, float(np.max(np.abs(self.coefficients))))
        return bool(np.all(np.abs(zero_mode) <= tol * scale))

    # -- transforms ----------------------------------------------------

    @classmethod
    def from_physical(cls, grid: TorusGrid, values: np.ndarray) -> "SpectralField":
        """Build a field from physical samples on ``grid``."""
        values = np.asarray(values)
        if values.ndim == grid.dimension:
            values = values[np.newaxis]
        if values.shape[1:] != grid.shape:
            raise ValueError(
                f"sample shape {values.shape} incompatible with grid shape {grid.shape}"
            )
        coeff = np.fft.fftn(values, axes=tuple(range(1, grid.dimension + 1)))
        coeff /= grid.points_per_axis**grid.dimension
        return cls(grid, coeff)

    @classmethod
    def zeros(cls, grid: TorusGrid, components: int = 1) -> "SpectralField":
        return cls(grid, np.zeros((components,) + grid.shape, dtype=np.complex128))

    def to_physical(self, *, require_real: bool = False) -> np.ndarray:
        """Physical samples; complex in general, real part if requested.

        With ``require_real`` the imaginary part must be negligible
        (conjugate symmetry), otherwise a ``ValueError`` is raised.
        """
        n = self.grid.dimension
        values = np.fft.ifftn(self.coefficients, axes=self.spatial_axes)
        values *= self.grid.points_per_axis**n
        if require_real:
            scale = max(1.0, float(np.max(np.abs(values))))
            if np.max(np.abs(values.imag)) > _REALITY_TOL * scale:
                raise ValueError("field is not real: conjugate symmetry is broken")
            return values.real
        return values

    # -- linear structure ----------------------------------------------

    def _check_compatible(self, other: "SpectralField") -> None:
        if self.grid != other.grid or self.components != other.components:
            raise ValueError("fields live on different grids or component counts")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.grid, self.coefficients + other.coefficients)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.grid, self.coefficients - other.coefficients)

    def __mul__(self, scalar: complex) -> "SpectralField":
        return SpectralField(self.grid, self.coefficients * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coefficients)


@dataclass(frozen=True)
class FourierMultiplier:
    """Operator acting modewise through a symbol ``xi -> a(xi)``.

    ``symbol`` receives the stacked wavevector array of shape
    ``(n,) + shape`` and returns either a scalar symbol of shape ``shape``
    or a matrix symbol of shape ``(m, m) + shape``.
    """

    symbol: Callable[[np.ndarray], np.ndarray]
    descriptor: str = "multiplier"

    def evaluate(self, grid: TorusGrid) -> np.ndarray:
        return np.asarray(self.symbol(grid.xi))


# -- common symbols ----------------------------------------------------


def identity_multiplier() -> FourierMultiplier:
    return FourierMultiplier(lambda xi: np.ones(xi.shape[1:]), "identity")


def laplacian_multiplier() -> FourierMultiplier:
    """Symbol of ``A = -Laplacian``: ``|xi|**2``."""
    return FourierMultiplier(lambda xi: np.sum(xi**2, axis=0), "minus-laplacian")


def heat_multiplier(t: float) -> FourierMultiplier:
    """Heat semigroup ``exp(t*Laplacian)`` at time ``t >= 0``."""
    if t < 0:
        raise ValueError("heat semigroup time must be nonnegative")
    return FourierMultiplier(
        lambda xi: np.exp(-t * np.sum(xi**2, axis=0)), f"heat(t={t})"
    )


def sector_multiplier(theta: float) -> FourierMultiplier:
    """Rotated Laplacian symbol ``|xi|**2 * exp(i*theta)``."""
    phase = np.exp(1j * theta)
    return FourierMultiplier(
        lambda xi: np.sum(xi**2, axis=0) * phase, f"sector(theta={theta})"
    )


def constant_multiplier(value: complex) -> FourierMultiplier:
    """Scalar multiple of the identity, constant symbol ``value``."""
    return FourierMultiplier(
        lambda xi: np.full(xi.shape[1:], value, dtype=np.complex128),
        f"const({value})",
    )


def resolvent_scalar_multiplier(sigma: float) -> FourierMultiplier:
    """Symbol ``i*sigma / (i*sigma + |xi|**2)`` of the scaled resolvent."""

    def symbol(xi: np.ndarray) -> np.ndarray:
        lam = np.sum(xi**2, axis=0)
        denom = 1j * sigma + lam
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(denom == 0, 0.0, (1j * sigma) / np.where(denom == 0, 1.0, denom))
        return out

    return FourierMultiplier(symbol, f"resolvent(sigma={sigma})")


# -- operations --------------------------------------------------------


def apply_multiplier(field: SpectralField, op: FourierMultiplier) -> SpectralField:
    """Apply a Fourier multiplier modewise.

    Scalar symbols broadcast over components; matrix symbols contract the
    component index and must match the field's component count.
    """
    sym = op.evaluate(field.grid)
    if sym.shape == field.grid.shape:
        return SpectralField(field.grid, field.coefficients * sym[np.newaxis])
    m = field.components
    if sym.shape == (m, m) + field.grid.shape:
        out = np.einsum("ij...,j...->i...", sym, field.coefficients)
        return SpectralField(field.grid, out)
    raise ValueError(
        f"symbol shape {sym.shape} does not match grid shape {field.grid.shape} "
        f"or matrix form for {m} components"
    )


def heat_semigroup_apply(field: SpectralField, t: float) -> SpectralField:
    """``exp(t*Laplacian)`` applied to ``field``; contraction for ``t >= 0``."""
    if t < 0:
        raise ValueError("heat semigroup time must be nonnegative")
    damp = np.exp(-t * field.grid.xi_sq)
    return SpectralField(field.grid, field.coefficients * damp[np.newaxis])


def fractional_laplacian_apply(field: SpectralField, s: float) -> SpectralField:
    """``(-Laplacian)**s`` through the symbol ``|xi|**(2s)``.

    The zero mode is annihilated for ``s > 0`` and requires a mean-free
    field for ``s < 0`` (the inverse does not see constants).
    """
    if s < 0 and not field.is_mean_free(tol=1e-12):
        raise ValueError("negative fractional power requires a mean-free field")
    xi_sq = field.grid.xi_sq
    zero = (0,) * field.grid.dimension
    if s == 0:
        return SpectralField(field.grid, field.coefficients.copy())
    with np.errstate(divide="ignore"):
        sym = xi_sq**s
    sym[zero] = 0.0
    return SpectralField(field.grid, field.coefficients * sym[np.newaxis])


def helmholtz_project(field: SpectralField) -> SpectralField:
    """Leray projection onto divergence-free fields.

    Modewise ``P = I - xi xi^T / |xi|**2``; the zero mode (spatial mean)
    passes through unchanged.
    """
    grid = field.grid
    if field.components != grid.dimension:
        raise ValueError(
            f"projection needs {grid.dimension} components, field has {field.components}"
        )
    xi = grid.xi
    inv = np.zeros_like(grid.xi_sq)
    nonzero = grid.xi_sq > 0
    inv[nonzero] = 1.0 / grid.xi_sq[nonzero]
    xi_dot_u = np.einsum("i...,i...->...", xi, field.coefficients)
    out = field.coefficients - xi * (xi_dot_u * inv)[np.newaxis]
    return SpectralField(grid, out)


def gradient(field: SpectralField) -> SpectralField:
    """Gradient of a scalar field: ``i*xi_j*c`` per direction."""
    if field.components != 1:
        raise ValueError("gradient expects a scalar field")
    out = 1j * field.grid.xi * field.coefficients[0][np.newaxis]
    return SpectralField(field.grid, out)


def divergence(field: SpectralField) -> SpectralField:
    """Divergence of a vector field: ``i * sum_j xi_j c_j``."""
    if field.components != field.grid.dimension:
        raise ValueError("divergence expects one component per dimension")
    out = 1j * np.einsum("i...,i...->...", field.grid.xi, field.coefficients)
    return SpectralField(field.grid, out[np.newaxis])


def dealias(field: SpectralField) -> SpectralField:
    """Zero all modes outside the 2/3-rule ball."""
    mask = field.grid.dealias_mask
    return SpectralField(field.grid, field.coefficients * mask[np.newaxis])


def tensor_divergence(u: SpectralField, v: SpectralField) -> SpectralField:
    """``div(u (x) v)``, the vector with components ``sum_i d_i (u_i v_j)``.

    The tensor product is formed in physical space with dealiasing before
    and after, then differentiated spectrally.
    """
    u._check_compatible(v)
    grid = u.grid
    n = grid.dimension
    if u.components != n:
        raise ValueError("tensor divergence expects one component per dimension")
    mask = grid.dealias_mask
    u_phys = SpectralField(grid, u.coefficients * mask[np.newaxis]).to_physical()
    v_phys = SpectralField(grid, v.coefficients * mask[np.newaxis]).to_physical()
    # m_ij = u_i v_j, transformed and dealiased rowwise
    out = np.zeros((n,) + grid.shape, dtype=np.complex128)
    for j in range(n):
        prod = u_phys * v_phys[j][np.newaxis]
        coeff = np.fft.fftn(prod, axes=tuple(range(1, n + 1)))
        coeff /= grid.points_per_axis**n
        coeff *= mask[np.newaxis]
        out[j] = 1j * np.einsum("i...,i...->...", grid.xi, coeff)
    return SpectralField(grid, out)


def pointwise_power_nonlinearity(
    u: SpectralField, nu: float, variant: str = "signed"
) -> SpectralField:
    """Dealiased pointwise power of a real scalar field.

    ``signed`` produces ``|u|**(nu-1) * u`` and ``unsigned`` produces
    ``|u|**nu``.  The input must have negligible imaginary part in physical
    space.
    """
    if u.components != 1:
        raise ValueError("pointwise power expects a scalar field")
    if nu <= 1:
        raise ValueError("power exponent nu must exceed 1")
    if variant not in ("signed", "unsigned"):
        raise ValueError(f"unknown variant {variant!r}; use 'signed' or 'unsigned'")
    grid = u.grid
    mask = grid.dealias_mask
    values = SpectralField(grid, u.coefficients * mask[np.newaxis]).to_physical(
        require_real=True
    )
    if variant == "signed":
        w = np.abs(values) ** (nu - 1.0) * values
    else:
        w = np.abs(values) ** nu
    out = SpectralField.from_physical(grid, w)
    return SpectralField(grid, out.coefficients * mask[np.newaxis])
