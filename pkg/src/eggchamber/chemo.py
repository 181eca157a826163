"""Chemoattractant transport: phase-gated diffusivity, boundary-localized
secretion, the sub-stepped explicit diffusion-reaction update, and
steady-state detection.

The outer clock advances in steps of dt_outer (0.05 by default), but the
explicit diffusion bound at D0 = 1, dx = 0.05 is dx^2/(4 D0) = 6.25e-4, so
each outer step is internally divided into CFL-safe sub-steps.  Because the
update is a convex combination under that bound, concentrations stay
non-negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import ConfigError, ContractError, NonConvergenceError
from .grid import ScalarField, face_diffusivities, grad_norm
from .phases import PhaseSet, smooth_h

STEADY_TOL = 1e-6  # default threshold on max |dc| / dt_outer


@dataclass
class ChemoParams:
    """Transport constants; defaults follow the standard chamber set."""

    D0: float = 1.0
    k: float = 0.002
    sigma: float = 0.2
    phi_star: float = 0.5
    s: float = 0.05
    substep_safety: float = 0.8
    include_epithelium: bool = True
    harmonic_faces: bool = False
    dirichlet_right: float | None = None  # 1D distant-source boundary

    def __post_init__(self):
        if self.D0 <= 0:
            raise ConfigError("D0 must be positive")
        if self.k < 0 or self.sigma < 0:
            raise ConfigError("k and sigma must be non-negative")
        if self.s <= 0:
            raise ConfigError("s must be positive")
        if not 0 < self.substep_safety <= 1:
            raise ConfigError("substep_safety must lie in (0, 1]")


@dataclass
class ChemoState:
    """Concentration, current effective diffusivity, source, and clock."""

    c: ScalarField
    D: ScalarField
    source: ScalarField
    time: float = 0.0

    def check(self):
        self.c.check_finite("concentration")
        if float(self.c.values.min()) < -1e-9:
            raise ContractError("concentration went negative beyond round-off")


def diffusivity_single(phi: ScalarField, cp: ChemoParams) -> ScalarField:
    """Sigmoidal gate D0 / (1 + exp((phi - phi*)/s)); decreasing in phi."""
    D = cp.D0 / (1.0 + np.exp((phi.values - cp.phi_star) / cp.s))
    return ScalarField(phi.spec, D)


def diffusivity_multi(ps: PhaseSet, cp: ChemoParams) -> ScalarField:
    """Multi-cell gate D0 * h(1 / (1 + sum_i exp((phi_i - phi*)/s))).

    The epithelial field joins the suppression sum by default so nothing
    leaks through the chamber wall.
    """
    expsum = np.zeros(ps.spec.shape)
    for p in ps.phases:
        expsum += np.exp((p.field.values - cp.phi_star) / cp.s)
    if cp.include_epithelium:
        expsum += np.exp((ps.epithelium.values - cp.phi_star) / cp.s)
    inner = 1.0 / (1.0 + expsum)
    return ScalarField(ps.spec, cp.D0 * smooth_h(inner))


def secretion_field(phi_oct: ScalarField, sigma: float) -> ScalarField:
    """sigma * |grad phi_oct|: support concentrated on the oocyte interface."""
    g = grad_norm(phi_oct)
    return ScalarField(phi_oct.spec, sigma * g.values)


def chemo_rhs(st: ChemoState, cp: ChemoParams) -> ScalarField:
    """dc/dt = div(D grad c) - k c + source."""
    from .grid import div_flux

    div = div_flux(st.D, st.c, harmonic=cp.harmonic_faces)
    rhs = div.values - cp.k * st.c.values + st.source.values
    return ScalarField(st.c.spec, rhs)


def substep_count(cp: ChemoParams, dx: float, dt_outer: float,
                  max_D: float | None = None) -> int:
    """CFL-safe sub-step count: ceil(dt / (safety * dx^2 / (4 max D)))."""
    D = cp.D0 if max_D is None else max_D
    if D <= 0:
        return 1
    dt_stable = cp.substep_safety * dx * dx / (4.0 * D)
    # shave one ulp so exact multiples don't round up spuriously
    return max(1, math.ceil(dt_outer / dt_stable * (1.0 - 1e-12)))


def step_chemo(st: ChemoState, cp: ChemoParams, dt_outer: float) -> ChemoState:
    """Advance c by one outer step; D and the source stay frozen inside it."""
    if dt_outer <= 0:
        raise ConfigError("dt_outer must be positive")
    dx = st.c.spec.dx
    max_D = float(st.D.values.max())
    n_sub = substep_count(cp, dx, dt_outer, max_D)
    dt_sub = dt_outer / n_sub
    dfx, dfy = face_diffusivities(st.D.values, harmonic=cp.harmonic_faces)
    pin = cp.dirichlet_right if cp.dirichlet_right is not None else math.nan
    c_new = kernels.chemo_substeps(
        st.c.values, dfx, dfy, st.source.values, cp.k, dt_sub, n_sub, dx, pin
    )
    return ChemoState(
        c=ScalarField(st.c.spec, c_new), D=st.D, source=st.source,
        time=st.time + dt_outer,
    )


def relax_to_steady(st: ChemoState, cp: ChemoParams, dt_outer: float,
                    tol: float = STEADY_TOL, max_steps: int = 400_000,
                    callback=None) -> tuple[ChemoState, int]:
    """Iterate outer steps until max |dc| / dt_outer drops below tol.

    At the fixed point the global budget k * int(c) = int(source) holds to
    within the residual; see analysis.mass_balance_residual.
    """
    if tol <= 0:
        raise ConfigError("steady tolerance must be positive")
    for step in range(1, max_steps + 1):
        new = step_chemo(st, cp, dt_outer)
        resid = float(np.max(np.abs(new.c.values - st.c.values))) / dt_outer
        st = new
        if callback is not None:
            callback(st, step, resid)
        if resid < tol:
            return st, step
    raise NonConvergenceError(
        f"chemo field not steady after {max_steps} steps (residual {resid:.3e})",
        residual=resid, steps=max_steps,
    )
