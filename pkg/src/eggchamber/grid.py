"""Uniform node-centered grids, scalar fields, and discrete operators.

Conventions used throughout the package:

* fields are stored row-major with shape (ny, nx); index [iy, ix] sits at
  physical (x0 + ix*dx, y0 + iy*dx); the physical extent is (n-1)*dx per axis
* the Laplacian and conservative flux divergence see zero-flux (homogeneous
  Neumann) walls: mirror ghost nodes for the former, zero boundary-face
  fluxes for the latter
* raw gradients use central differences inside and one-sided differences on
  the boundary
* 1D runs are grids with ny == 1; y-derivatives are identically zero
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ContractError, StructuralError


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a uniform, isotropic (dx = dy) node-centered grid."""

    nx: int
    ny: int = 1
    dx: float = 0.05
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.nx < 3:
            raise StructuralError(f"nx must be >= 3, got {self.nx}")
        if self.ny != 1 and self.ny < 3:
            raise StructuralError(f"ny must be 1 or >= 3, got {self.ny}")
        if not self.dx > 0:
            raise StructuralError(f"dx must be positive, got {self.dx}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def is_1d(self) -> bool:
        return self.ny == 1

    @property
    def extent(self) -> tuple[float, float]:
        return ((self.nx - 1) * self.dx, (self.ny - 1) * self.dx)

    def x(self) -> np.ndarray:
        return self.origin[0] + self.dx * np.arange(self.nx)

    def y(self) -> np.ndarray:
        return self.origin[1] + self.dx * np.arange(self.ny)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x(), self.y())

    def cell_measure(self) -> float:
        """Quadrature cell size: dx^2 in 2D, dx for 1D line integrals."""
        return self.dx if self.is_1d else self.dx * self.dx


@dataclass
class ScalarField:
    """A real-valued field on a GridSpec; carrier for phases, c, D, forces."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.spec.shape:
            raise StructuralError(
                f"field shape {self.values.shape} != grid shape {self.spec.shape}"
            )

    @classmethod
    def zeros(cls, spec: GridSpec) -> "ScalarField":
        return cls(spec, np.zeros(spec.shape))

    @classmethod
    def full(cls, spec: GridSpec, value: float) -> "ScalarField":
        return cls(spec, np.full(spec.shape, float(value)))

    @classmethod
    def from_function(cls, spec: GridSpec, fn) -> "ScalarField":
        X, Y = spec.meshgrid()
        return cls(spec, np.asarray(fn(X, Y), dtype=np.float64))

    def copy(self) -> "ScalarField":
        return ScalarField(self.spec, self.values.copy())

    def check_finite(self, context: str = "field"):
        if not np.all(np.isfinite(self.values)):
            raise ContractError(f"{context} contains non-finite values")


def _same_spec(a: ScalarField, b: ScalarField):
    if a.spec != b.spec:
        raise StructuralError("fields live on different grids")


def laplacian(f: ScalarField) -> ScalarField:
    """5-point Laplacian; boundaries use mirrored ghosts (zero normal flux)."""
    return ScalarField(f.spec, kernels.laplacian(f.values, f.spec.dx))


def gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    """(df/dx, df/dy): central differences inside, one-sided at the boundary."""
    v = f.values
    dx = f.spec.dx
    gx = np.empty_like(v)
    gx[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * dx)
    gx[:, 0] = (v[:, 1] - v[:, 0]) / dx
    gx[:, -1] = (v[:, -1] - v[:, -2]) / dx
    gy = np.zeros_like(v)
    if not f.spec.is_1d:
        gy[1:-1, :] = (v[2:, :] - v[:-2, :]) / (2.0 * dx)
        gy[0, :] = (v[1, :] - v[0, :]) / dx
        gy[-1, :] = (v[-1, :] - v[-2, :]) / dx
    return ScalarField(f.spec, gx), ScalarField(f.spec, gy)


def perp_gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Counterclockwise rotation (-df/dy, df/dx) of the gradient."""
    gx, gy = gradient(f)
    return ScalarField(f.spec, -gy.values), gx


def grad_norm(f: ScalarField) -> ScalarField:
    gx, gy = gradient(f)
    return ScalarField(f.spec, np.hypot(gx.values, gy.values))


def face_diffusivities(D: np.ndarray, harmonic: bool = False):
    """Face-centered diffusivities from nodal values (x-faces, y-faces)."""
    if harmonic:
        # 2ab/(a+b); falls back to 0 on fully insulating face pairs
        ax, bx = D[:, 1:], D[:, :-1]
        dfx = np.divide(2.0 * ax * bx, ax + bx,
                        out=np.zeros_like(ax), where=(ax + bx) > 0)
        ay, by = D[1:, :], D[:-1, :]
        dfy = np.divide(2.0 * ay * by, ay + by,
                        out=np.zeros_like(ay), where=(ay + by) > 0)
    else:
        dfx = (D[:, 1:] + D[:, :-1]) * 0.5
        dfy = (D[1:, :] + D[:-1, :]) * 0.5
    return np.ascontiguousarray(dfx), np.ascontiguousarray(dfy)


def div_flux(D: ScalarField, c: ScalarField, harmonic: bool = False) -> ScalarField:
    """Conservative divergence of D grad c with zero-flux domain boundaries.

    Face diffusivity is the arithmetic mean of the adjacent nodes by default
    (harmonic averaging available for confinement-sensitivity studies).
    The face fluxes telescope, so the plain grid sum of the result is zero.
    """
    _same_spec(D, c)
    if np.any(D.values < 0):
        raise ContractError("diffusivity must be non-negative")
    dfx, dfy = face_diffusivities(D.values, harmonic=harmonic)
    return ScalarField(c.spec, kernels.div_flux_faces(dfx, dfy, c.values, c.spec.dx))


def _trapezoid_weights(spec: GridSpec) -> np.ndarray:
    wx = np.ones(spec.nx)
    wx[0] = wx[-1] = 0.5
    if spec.is_1d:
        return wx[None, :]
    wy = np.ones(spec.ny)
    wy[0] = wy[-1] = 0.5
    return wy[:, None] * wx[None, :]


def integrate(f: ScalarField) -> float:
    """Trapezoidal integral over the domain (dx^2 cells; dx in 1D)."""
    return float(np.sum(_trapezoid_weights(f.spec) * f.values) * f.spec.cell_measure())


def grid_sum(f: ScalarField) -> float:
    """Plain node sum times cell measure: the mass the flux form conserves."""
    return float(f.values.sum() * f.spec.cell_measure())
