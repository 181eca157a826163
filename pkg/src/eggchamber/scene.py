"""Initial conditions: the egg-chamber scene and the 1D moving-window scene.

Seeds are smooth tanh profiles with the equilibrium interface width
2*sqrt(2*eps2) of the phase dynamics, so relaxation starts close to a
stationary profile.  All coordinates are configuration, not constants; the
defaults approximate the standard architecture (elliptical chamber, six
nurse cells in two rows of three, anterior cluster on the midline, oocyte
cap on the posterior ~30% of the chamber).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chemo import ChemoParams, ChemoState, diffusivity_single
from .errors import ConfigError
from .grid import GridSpec, ScalarField, integrate
from .phases import CellType, PhaseSet, PhaseVar, smooth_h


def interface_width(eps2: float) -> float:
    """Equilibrium tanh width 2*sqrt(2)*eps of the double-well dynamics."""
    return 2.0 * math.sqrt(2.0 * eps2)


@dataclass
class SceneConfig:
    """Chamber geometry; lengths in domain units on [0,5]^2 by default."""

    center: tuple[float, float] = (2.5, 2.5)
    axes: tuple[float, float] = (2.3, 1.9)
    wall_width: float = 0.09
    oocyte_cap_fraction: float = 0.30
    oocyte_margin: float = 0.10
    nurse_centers: list[tuple[float, float]] = field(
        default_factory=lambda: [
            (1.0, 1.75), (1.8, 1.75), (2.6, 1.75),
            (1.0, 3.25), (1.8, 3.25), (2.6, 3.25),
        ]
    )
    nurse_radius: float = 0.38
    cluster_center: tuple[float, float] = (0.55, 2.5)
    cluster_radius: float = 0.22
    cluster_target_volume: float = 0.15
    seed_overlap_tol: float = 0.02  # fraction of the smaller seed volume

    def __post_init__(self):
        if self.cluster_target_volume <= 0:
            raise ConfigError("cluster target volume must be positive")
        if not 0 < self.oocyte_cap_fraction < 1:
            raise ConfigError("oocyte cap fraction must lie in (0, 1)")

    @property
    def oocyte_cap_x(self) -> float:
        """Anterior edge of the posterior cap, measured along x."""
        cx = self.center[0]
        a = self.axes[0]
        return cx + a * (1.0 - 2.0 * self.oocyte_cap_fraction)


def _ellipse_signed_distance(X, Y, center, axes):
    """First-order signed distance to the ellipse (positive outside)."""
    cx, cy = center
    a, b = axes
    u = (X - cx) / a
    v = (Y - cy) / b
    rho = np.sqrt(u * u + v * v)
    grad = np.sqrt((u / a) ** 2 + (v / b) ** 2)
    # rho/grad tends to the local axis length at the center; avoid 0/0 there
    ratio = np.where(grad > 1e-9, rho / np.maximum(grad, 1e-9), min(a, b))
    return (rho - 1.0) * ratio


def _disc(X, Y, center, radius, width):
    r = np.hypot(X - center[0], Y - center[1])
    return 0.5 * (1.0 - np.tanh((r - radius) / width))


def build_chamber(sc: SceneConfig, spec: GridSpec,
                  eps2: dict[CellType, float] | None = None) -> PhaseSet:
    """Seed the chamber scene: epithelium, 6 nurse cells, oocyte, cluster.

    Nurse and oocyte target volumes start at their seeded values; the driver
    lets them track the actual volume while the chamber fills and then
    freezes them (the cluster target stays pinned to the configured value).
    """
    if spec.is_1d:
        raise ConfigError("the chamber scene needs a 2D grid")
    eps2 = eps2 or {CellType.NURSE: 0.001, CellType.CLUSTER: 0.001,
                    CellType.OOCYTE: 0.0005}
    X, Y = spec.meshgrid()

    sd = _ellipse_signed_distance(X, Y, sc.center, sc.axes)
    phi0 = 0.5 * (1.0 + np.tanh(sd / sc.wall_width))
    epithelium = ScalarField(spec, phi0)

    w_nurse = interface_width(eps2[CellType.NURSE])
    w_cluster = interface_width(eps2[CellType.CLUSTER])
    w_oocyte = interface_width(eps2[CellType.OOCYTE])

    phases: list[PhaseVar] = []
    for cx, cy in sc.nurse_centers:
        values = _disc(X, Y, (cx, cy), sc.nurse_radius, w_nurse)
        f = ScalarField(spec, values)
        phases.append(PhaseVar(f, CellType.NURSE, _h_volume(f)))

    cluster = ScalarField(
        spec, _disc(X, Y, sc.cluster_center, sc.cluster_radius, w_cluster)
    )
    phases.append(PhaseVar(cluster, CellType.CLUSTER, sc.cluster_target_volume))

    inside = 0.5 * (1.0 - np.tanh((sd + sc.oocyte_margin) / w_oocyte))
    cap = 0.5 * (1.0 + np.tanh((X - sc.oocyte_cap_x) / w_oocyte))
    oocyte = ScalarField(spec, inside * cap)
    phases.append(PhaseVar(oocyte, CellType.OOCYTE, _h_volume(oocyte)))

    ps = PhaseSet(phases, epithelium)
    _check_seed_overlaps(ps, sc.seed_overlap_tol)
    return ps


def _h_volume(f: ScalarField) -> float:
    return integrate(ScalarField(f.spec, smooth_h(f.values)))


def _check_seed_overlaps(ps: PhaseSet, tol: float):
    meas = ps.spec.cell_measure()
    h = [smooth_h(p.field.values) for p in ps.phases]
    vols = [float(v.sum() * meas) for v in h]
    for i in range(len(h)):
        for j in range(i + 1, len(h)):
            overlap = float((h[i] * h[j]).sum() * meas)
            if overlap > tol * min(vols[i], vols[j]):
                raise ConfigError(
                    f"seeds {i} and {j} overlap by {overlap:.4f} "
                    f"(> {tol:.0%} of the smaller seed volume)"
                )


@dataclass
class Window1D:
    """Top-hat mask from two counter-oriented stationary interface walls."""

    x0: float = 5.0
    R: float = 1.0
    eps: float = 0.07
    D_phi: float = 1.0
    v: float = 0.005

    def __post_init__(self):
        if self.R <= 0 or self.eps <= 0 or self.D_phi <= 0:
            raise ConfigError("R, eps and D_phi must be positive")
        if self.R < 5.0 * self.wall_width:
            raise ConfigError("walls too close: R must exceed ~5 interface widths")

    @property
    def wall_width(self) -> float:
        return math.sqrt(2.0 * self.D_phi) * self.eps

    def center_at(self, t: float) -> float:
        return self.x0 + self.v * t


def tanh_window(w: Window1D, t: float, spec: GridSpec) -> ScalarField:
    """Kinematically translated window phi(x - v t) in (0, 1)."""
    x = spec.x()[None, :] * np.ones(spec.shape)
    wall = w.wall_width
    xs = x - w.v * t
    values = 0.5 * (
        np.tanh((xs - (w.x0 - w.R)) / wall) - np.tanh((xs - (w.x0 + w.R)) / wall)
    )
    return ScalarField(spec, values)


def single_wall(spec: GridSpec, x_star: float, w: Window1D) -> ScalarField:
    """Exact stationary interface tanh((x - x*)/wall) between the -1/+1 wells."""
    x = spec.x()[None, :] * np.ones(spec.shape)
    return ScalarField(spec, np.tanh((x - x_star) / w.wall_width))


def ac_residual(phi: ScalarField, w: Window1D) -> float:
    """Max interior defect of D_phi phi'' - f'(phi)/eps^2 for the +-1 profile.

    f(phi) = (phi^2 - 1)^2 / 4, so f'(phi) = phi^3 - phi.  The boundary
    nodes are excluded: mirror ghosts do not represent the open profile.
    """
    from . import kernels

    vals = phi.values
    lap = kernels.laplacian(np.ascontiguousarray(vals), phi.spec.dx)
    fprime = vals ** 3 - vals
    res = w.D_phi * lap - fprime / (w.eps * w.eps)
    interior = res[:, 1:-1] if phi.spec.is_1d else res[1:-1, 1:-1]
    return float(np.max(np.abs(interior)))


def build_1d_scene(w: Window1D, spec: GridSpec,
                   cp: ChemoParams) -> tuple[PhaseSet, ChemoState]:
    """Window phase at t = 0 plus a zero concentration field.

    The distant source is modeled by a fixed concentration on the right
    boundary (cp.dirichlet_right); the left boundary stays zero-flux.
    """
    if not spec.is_1d:
        raise ConfigError("the window scene needs a 1D grid")
    phi = tanh_window(w, 0.0, spec)
    ps = PhaseSet(
        [PhaseVar(phi, CellType.CLUSTER, _h_volume(phi))],
        ScalarField.zeros(spec),
    )
    c = ScalarField.zeros(spec)
    D = diffusivity_single(phi, cp)
    source = ScalarField.zeros(spec)
    if cp.dirichlet_right is not None:
        c.values[:, -1] = cp.dirichlet_right
    st = ChemoState(c=c, D=D, source=source, time=0.0)
    return ps, st
