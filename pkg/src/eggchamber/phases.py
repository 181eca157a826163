"""Multiphase-field dynamics: interpolation functional, volumes, occupancy,
the mechanical constraint field, and the explicit phase update.

Model summary.  Each cell region m carries a phase variable phi_m in [0, 1]
evolving by

    d(phi_m)/dt = mu * [ eps_m^2 lap(phi_m)
                         + phi_m (1 - phi_m) (phi_m - 1/2 - 6 F_m) ] + external

where F_m collects the constraints; positive F_m suppresses phi_m locally:

    F_m =  2 alpha_m (V_m - Vbar_m)              volume restoring
         + beta_0 h(phi_0)                        exclusion from the wall
         + sum_{n != m} beta(t_m, t_n) h(phi_n)   cell-cell exclusion
         - 2 alpha_0 (A - sum_n V_n)              fill the chamber area A
         - gamma_0 lap(h(phi_0))                  adhesion to the wall
         - sum_{n != m} gamma(t_m, t_n) lap(h(phi_n))   cell-cell adhesion

with h(phi) = phi^2 (3 - 2 phi), V_m = integral of h(phi_m), and
A = integral of (1 - h(phi_0)) the area enclosed by the static epithelium.

The volume/fill couplings are global and stiff (alpha ~ 100), so the update
sub-divides the outer step whenever the estimated feedback rate approaches
the explicit-Euler limit; see _stiffness below.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from . import kernels
from .errors import ConfigError, StructuralError
from .grid import GridSpec, ScalarField, integrate

log = logging.getLogger(__name__)

# diffuse-interface overshoot band tolerated before a warning is emitted
PHI_BAND = (-0.05, 1.05)


class CellType(IntEnum):
    EPITHELIUM = 0
    NURSE = 1
    CLUSTER = 2
    OOCYTE = 3


@dataclass
class PhaseVar:
    """One phase variable: field, cell type, and target volume."""

    field: ScalarField
    cell_type: CellType
    target_volume: float


@dataclass
class PhaseSet:
    """All dynamic phases plus the static epithelial field phi_0."""

    phases: list[PhaseVar]
    epithelium: ScalarField
    _static: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.phases:
            raise StructuralError("PhaseSet needs at least one phase")
        spec = self.epithelium.spec
        for p in self.phases:
            if p.field.spec != spec:
                raise StructuralError("phase grids differ from epithelium grid")
        self.epithelium.values.setflags(write=False)

    @property
    def spec(self) -> GridSpec:
        return self.epithelium.spec

    @property
    def count(self) -> int:
        return len(self.phases)

    def phase(self, m: int) -> PhaseVar:
        if not 0 <= m < len(self.phases):
            raise StructuralError(f"phase index {m} out of range")
        return self.phases[m]

    def indices_of(self, cell_type: CellType) -> list[int]:
        return [i for i, p in enumerate(self.phases) if p.cell_type == cell_type]

    def wall_cache(self) -> dict:
        """h(phi_0), lap h(phi_0), quadrature weights, and the enclosed area."""
        if not self._static:
            h0 = smooth_h(self.epithelium.values)
            self._static["h0"] = np.ascontiguousarray(h0)
            self._static["lap_h0"] = kernels.laplacian(
                self._static["h0"], self.spec.dx
            )
            self._static["area"] = integrate(ScalarField(self.spec, 1.0 - h0))
            self._static["weights"] = _trap_weights(self.spec)
            self._static["zeros"] = np.zeros(self.spec.shape)
        return self._static

    @property
    def chamber_area(self) -> float:
        return self.wall_cache()["area"]

    def with_fields(self, new_values: list[np.ndarray]) -> "PhaseSet":
        phases = [
            PhaseVar(ScalarField(self.spec, v), p.cell_type, p.target_volume)
            for p, v in zip(self.phases, new_values)
        ]
        return PhaseSet(phases, self.epithelium, self._static)

    def with_targets(self, targets: dict[int, float]) -> "PhaseSet":
        phases = [
            PhaseVar(p.field, p.cell_type, targets.get(i, p.target_volume))
            for i, p in enumerate(self.phases)
        ]
        return PhaseSet(phases, self.epithelium, self._static)


@dataclass
class EnergyParams:
    """Free-energy coefficients; beta/gamma are indexed by CellType pairs."""

    eps2: dict[CellType, float]
    mobility: float = 0.025
    alpha0: float = 100.0
    alpha: float = 100.0
    beta0: float = 0.9
    beta: np.ndarray = None
    gamma0: float = 0.007
    gamma: np.ndarray = None

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=float)
        for name, mat in (("beta", self.beta), ("gamma", self.gamma)):
            if mat.shape != (4, 4):
                raise ConfigError(f"{name} must be 4x4 (indexed by CellType)")
            if not np.allclose(mat, mat.T):
                raise ConfigError(f"{name} matrix must be symmetric")
            for t in (CellType.CLUSTER, CellType.OOCYTE):
                if mat[t, t] != 0.0:
                    raise ConfigError(f"{name}({int(t)},{int(t)}) must be 0")
        if any(v <= 0 for v in self.eps2.values()):
            raise ConfigError("eps2 entries must be positive")
        if not np.isfinite(
            [self.mobility, self.alpha0, self.alpha, self.beta0, self.gamma0]
        ).all():
            raise ConfigError("energy coefficients must be finite")

    def max_eps2(self) -> float:
        return max(self.eps2.values())


def table_defaults() -> EnergyParams:
    """Standard parameter set for the chamber scenarios."""
    beta = np.zeros((4, 4))
    beta[1, 1] = 0.25
    beta[1, 2] = beta[2, 1] = 0.25
    beta[1, 3] = beta[3, 1] = 0.25
    beta[2, 3] = beta[3, 2] = 0.3
    gamma = np.zeros((4, 4))
    gamma[1, 1] = 0.003
    gamma[1, 2] = gamma[2, 1] = 0.004
    gamma[1, 3] = gamma[3, 1] = 0.008
    gamma[2, 3] = gamma[3, 2] = 0.005
    eps2 = {
        CellType.NURSE: 0.001,
        CellType.CLUSTER: 0.001,
        CellType.OOCYTE: 0.0005,
    }
    return EnergyParams(eps2=eps2, beta=beta, gamma=gamma)


def smooth_h(phi):
    """Interpolation ramp h(phi) = phi^2 (3 - 2 phi); h'(0) = h'(1) = 0."""
    return phi * phi * (3.0 - 2.0 * phi)


def volume(phi: ScalarField) -> float:
    """Interpolated volume of one phase."""
    return integrate(ScalarField(phi.spec, smooth_h(phi.values)))


def occupancy(ps: PhaseSet) -> ScalarField:
    """xi = sum_m h(phi_m) over the dynamic phases; xi > 1 flags overlap."""
    xi = np.zeros(ps.spec.shape)
    for p in ps.phases:
        xi += smooth_h(p.field.values)
    return ScalarField(ps.spec, xi)


def _trap_weights(spec: GridSpec) -> np.ndarray:
    wx = np.ones(spec.nx)
    wx[0] = wx[-1] = 0.5
    if spec.is_1d:
        return wx[None, :]
    wy = np.ones(spec.ny)
    wy[0] = wy[-1] = 0.5
    return wy[:, None] * wx[None, :]


_TYPES = (CellType.NURSE, CellType.CLUSTER, CellType.OOCYTE)


class _Shared:
    """Shared per-evaluation quantities over raw phase arrays.

    Pairwise beta/gamma terms are assembled per cell type, not per pair:
    with type-uniform coefficients the sum over neighbors n != m is the
    type-grouped total minus the phase's own contribution.
    """

    def __init__(self, arrays: list[np.ndarray], ps: PhaseSet, ep: EnergyParams):
        spec = ps.spec
        wall = ps.wall_cache()
        meas = spec.cell_measure()
        weights = wall["weights"]
        zeros = wall["zeros"]
        self.h = [smooth_h(a) for a in arrays]
        self.lap_h = [kernels.laplacian(h, spec.dx) for h in self.h]
        self.vols = [float(np.sum(weights * h) * meas) for h in self.h]
        self.gap = wall["area"] - sum(self.vols)

        types = [p.cell_type for p in ps.phases]
        present = sorted(set(types))
        sum_h = {t: zeros for t in _TYPES}
        sum_lap = {t: zeros for t in _TYPES}
        for t in present:
            idx = [i for i, tt in enumerate(types) if tt == t]
            sum_h[t] = sum(self.h[i] for i in idx)
            sum_lap[t] = sum(self.lap_h[i] for i in idx)
        self.beta_tot = {}
        self.gamma_tot = {}
        for t in present:
            b = zeros
            g = zeros
            for tt in present:
                if ep.beta[t, tt] != 0.0:
                    b = b + ep.beta[t, tt] * sum_h[tt]
                if ep.gamma[t, tt] != 0.0:
                    g = g + ep.gamma[t, tt] * sum_lap[tt]
            self.beta_tot[t] = b
            self.gamma_tot[t] = g

    def terms_for(self, m: int, ps: PhaseSet, ep: EnergyParams):
        """(beta_sum, gamma_sum, scalar) entering F for phase m."""
        t = ps.phases[m].cell_type
        bsum = self.beta_tot[t]
        if ep.beta[t, t] != 0.0:
            bsum = bsum - ep.beta[t, t] * self.h[m]
        gsum = self.gamma_tot[t]
        if ep.gamma[t, t] != 0.0:
            gsum = gsum - ep.gamma[t, t] * self.lap_h[m]
        scalar = (
            2.0 * ep.alpha * (self.vols[m] - ps.phases[m].target_volume)
            - 2.0 * ep.alpha0 * self.gap
        )
        return bsum, gsum, scalar

    def max_scalar(self, ps: PhaseSet, ep: EnergyParams) -> float:
        return max(
            abs(2.0 * ep.alpha * (self.vols[m] - ps.phases[m].target_volume)
                - 2.0 * ep.alpha0 * self.gap)
            for m in range(len(self.vols))
        )


def _wall_terms(ps: PhaseSet, ep: EnergyParams):
    wall = ps.wall_cache()
    return ep.beta0 * wall["h0"], ep.gamma0 * wall["lap_h0"]


def coupling_field(m: int, ps: PhaseSet, ep: EnergyParams) -> ScalarField:
    """Constraint field F for phase m; positive values suppress the phase."""
    ps.phase(m)
    arrays = [np.ascontiguousarray(p.field.values) for p in ps.phases]
    shared = _Shared(arrays, ps, ep)
    wall_pos, wall_neg = _wall_terms(ps, ep)
    bsum, gsum, scalar = shared.terms_for(m, ps, ep)
    F = (((scalar + wall_pos) + bsum) - wall_neg) - gsum
    return ScalarField(ps.spec, F)


def _rhs_arrays(arrays: list[np.ndarray], ps: PhaseSet, ep: EnergyParams,
                wall_pos, wall_neg, ext: dict[int, np.ndarray],
                shared: _Shared | None = None):
    shared = shared or _Shared(arrays, ps, ep)
    rhs = []
    for m, phi in enumerate(arrays):
        bsum, gsum, scalar = shared.terms_for(m, ps, ep)
        lap_phi = kernels.laplacian(phi, ps.spec.dx)
        r = kernels.phase_reaction(
            phi, lap_phi, wall_pos, wall_neg, bsum, gsum, scalar,
            ep.mobility, ep.eps2[ps.phases[m].cell_type],
        )
        e = ext.get(m)
        if e is not None:
            r = r + e
        rhs.append(r)
    return rhs, shared


def phase_rhs(m: int, ps: PhaseSet, ep: EnergyParams,
              external: ScalarField | None = None) -> ScalarField:
    """Time derivative of phase m, including an optional external force field."""
    if external is not None and external.spec != ps.spec:
        raise StructuralError("external force grid mismatch")
    ps.phase(m)
    arrays = [np.ascontiguousarray(p.field.values) for p in ps.phases]
    wall_pos, wall_neg = _wall_terms(ps, ep)
    ext = {m: external.values} if external is not None else {}
    rhs, _ = _rhs_arrays(arrays, ps, ep, wall_pos, wall_neg, ext)
    return ScalarField(ps.spec, rhs[m])


def _stiffness(ps: PhaseSet, ep: EnergyParams, arrays: list[np.ndarray],
               max_abs_F: float) -> float:
    """Upper bound on the fastest explicit-Euler rate of the update.

    The volume terms feed back through V_m with rate 72 mu alpha I_m where
    I_m = integral of [phi(1-phi)]^2; the fill term couples all phases with
    rate 72 mu alpha0 sum_m I_m; locally the reaction slope is bounded by
    mu (6 |F| + 1).
    """
    meas = ps.spec.cell_measure()
    iface = [float(np.sum((a * (1.0 - a)) ** 2)) * meas for a in arrays]
    lam_fill = 72.0 * ep.mobility * ep.alpha0 * sum(iface)
    lam_vol = 72.0 * ep.mobility * ep.alpha * max(iface, default=0.0)
    lam_local = ep.mobility * (6.0 * max_abs_F + 1.0)
    lam_diff = 4.0 * ep.mobility * ep.max_eps2() / ps.spec.dx ** 2
    return lam_fill + lam_vol + lam_local + lam_diff


@dataclass
class PhaseStepInfo:
    max_rate: float
    n_sub: int
    phi_min: float
    phi_max: float

    @property
    def overshoot(self) -> bool:
        return self.phi_min < PHI_BAND[0] or self.phi_max > PHI_BAND[1]


def step_phases(ps: PhaseSet, ep: EnergyParams, dt: float,
                externals: dict[int, ScalarField] | None = None,
                substep_target: float = 1.0) -> tuple[PhaseSet, PhaseStepInfo]:
    """Advance every dynamic phase by dt with forward Euler.

    dt must satisfy the interface-diffusion bound dx^2 / (4 mu max eps2);
    the stiff constraint couplings are handled by internal sub-stepping
    (a deterministic function of the state, so runs are reproducible).
    """
    if dt <= 0:
        raise ConfigError("dt must be positive")
    bound = ps.spec.dx ** 2 / (4.0 * ep.mobility * ep.max_eps2())
    if dt > bound:
        raise ConfigError(
            f"dt={dt} exceeds the interface stability bound dx^2/(4 mu eps2) = {bound}"
        )
    ext = {}
    if externals:
        for i, f in externals.items():
            if f.spec != ps.spec:
                raise StructuralError("external force grid mismatch")
            ext[i] = f.values

    arrays = [np.ascontiguousarray(p.field.values) for p in ps.phases]
    wall_pos, wall_neg = _wall_terms(ps, ep)

    rhs, shared = _rhs_arrays(arrays, ps, ep, wall_pos, wall_neg, ext)
    # cheap bound on max |F| for the stiffness estimate (h <= 1 per phase)
    beta_reach = float(
        max(
            (ep.beta[p.cell_type, :].sum() * len(ps.phases) for p in ps.phases),
            default=0.0,
        )
    )
    max_abs_F = shared.max_scalar(ps, ep) + ep.beta0 + beta_reach
    lam = _stiffness(ps, ep, arrays, max_abs_F)
    n_sub = max(1, math.ceil(dt * lam / substep_target))
    dt_sub = dt / n_sub

    for sub in range(n_sub):
        if sub > 0:
            rhs, _ = _rhs_arrays(arrays, ps, ep, wall_pos, wall_neg, ext)
        arrays = [f + dt_sub * r for f, r in zip(arrays, rhs)]

    max_rate = max(float(np.max(np.abs(r))) for r in rhs)
    work = ps.with_fields(arrays)
    phi_min = min(float(f.min()) for f in arrays)
    phi_max = max(float(f.max()) for f in arrays)
    info = PhaseStepInfo(max_rate=max_rate, n_sub=n_sub,
                         phi_min=phi_min, phi_max=phi_max)
    if info.overshoot:
        log.warning("phase values left the diffuse band: min=%.4f max=%.4f",
                    phi_min, phi_max)
    return work, info


def relax_phases(ps: PhaseSet, ep: EnergyParams, dt: float, tol: float,
                 max_steps: int, tracked: tuple[int, ...] = (),
                 callback=None) -> tuple[PhaseSet, int, float]:
    """Step until max |dphi/dt| < tol (tol = 0 runs exactly max_steps).

    Phases listed in `tracked` have their target volume follow the current
    volume (free shapes while the chamber fills); freeze them by calling
    again without tracking.
    """
    rate = math.inf
    for step in range(1, max_steps + 1):
        if tracked:
            vols = {m: volume(ps.phases[m].field) for m in tracked}
            ps = ps.with_targets(vols)
        ps, info = step_phases(ps, ep, dt)
        rate = info.max_rate
        if callback is not None:
            callback(ps, step, info)
        if tol > 0 and rate < tol:
            return ps, step, rate
    if tol > 0:
        from .errors import NonConvergenceError

        raise NonConvergenceError(
            f"phase relaxation still at rate {rate:.3e} after {max_steps} steps",
            residual=rate, steps=max_steps,
        )
    return ps, max_steps, rate
