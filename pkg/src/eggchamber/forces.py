"""Contact-mediated migration forces.

The tangential interface migration (TIM) force is the divergence of a
tangential flux that lives on the contact band between the cluster and its
neighbors and always points toward increasing chemoattractant:

    F_TIM = -mu_bar_c * div( rho(c) * phi_c * phi_j
                             * sign(grad c . perp(grad phi_c))
                             * perp(grad phi_c) )

with perp the counterclockwise rotation (-d/dy, d/dx), rho a Hill-type
receptor response, and phi_j the summed neighbor phases.  The divergence is
taken in face-flux form, so the force integrates to zero over the domain
and the scalar result feeds straight into the cluster phase update.

A classical bulk chemotaxis force (up-gradient advection of the whole
cluster body, no contact required) is provided for comparison runs only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, ContractError, StructuralError
from .grid import ScalarField, gradient

DEFAULT_SIGN_ETA = 1e-3


@dataclass
class TimParams:
    """TIM strength plus the receptor response and sign smoothing knobs.

    rho_K = None asks the driver to calibrate the half-saturation point to
    half the steady-state extracellular maximum along the migration path.
    """

    mu_bar_c: float = 0.005
    rho_K: float | None = None
    rho_n: float = 2.0
    sign_eta: float = DEFAULT_SIGN_ETA
    activation: str | float = "after_chemo_steady"
    nurse_only: bool = False

    def __post_init__(self):
        if self.mu_bar_c < 0:
            raise ConfigError("mu_bar_c must be non-negative")
        if self.rho_K is not None and self.rho_K <= 0:
            raise ConfigError("rho_K must be positive")
        if self.rho_n < 1:
            raise ConfigError("rho_n must be >= 1")
        if self.sign_eta < 0:
            raise ConfigError("sign_eta must be non-negative")

    def resolved_K(self) -> float:
        if self.rho_K is None:
            raise ConfigError("rho_K not calibrated yet")
        return self.rho_K


def receptor_response(c, tp: TimParams):
    """Hill response c^n / (K^n + c^n): silent at 0, half at K, saturating."""
    arr = np.asarray(c, dtype=float)
    if np.any(arr < 0):
        raise ContractError("receptor response needs non-negative concentration")
    K = tp.resolved_K()
    cn = arr ** tp.rho_n
    out = cn / (K ** tp.rho_n + cn)
    return out if isinstance(c, np.ndarray) else float(out)


def smoothed_sign(x, eta: float):
    """tanh(x/eta); eta = 0 recovers the exact sign (sgn 0 = 0)."""
    if eta < 0:
        raise ConfigError("eta must be non-negative")
    if eta == 0.0:
        return np.sign(x)
    return np.tanh(np.asarray(x, dtype=float) / eta)


def _face_divergence(qx: np.ndarray, qy: np.ndarray, dx: float) -> np.ndarray:
    """Divergence of a node-centered vector field via averaged face fluxes.

    Boundary faces carry zero flux, so the plain grid sum of the result
    telescopes to zero exactly.
    """
    fx = (qx[:, 1:] + qx[:, :-1]) * 0.5
    fy = (qy[1:, :] + qy[:-1, :]) * 0.5
    ny, nx = qx.shape
    fe = np.zeros((ny, nx))
    fw = np.zeros((ny, nx))
    fe[:, :-1] = fx
    fw[:, 1:] = fx
    fn = np.zeros((ny, nx))
    fs = np.zeros((ny, nx))
    if ny > 1:
        fn[:-1, :] = fy
        fs[1:, :] = fy
    return ((fe - fw) + (fn - fs)) / dx


def tim_force(phi_c: ScalarField, neighbors: list[ScalarField], c: ScalarField,
              tp: TimParams, clockwise_perp: bool = False) -> ScalarField:
    """TIM force field to add to the cluster phase RHS.

    `clockwise_perp` flips the tangential convention; the sign factor flips
    with it, so the result is invariant (asserted in the test suite).
    """
    spec = phi_c.spec
    for f in neighbors + [c]:
        if f.spec != spec:
            raise StructuralError("TIM inputs live on different grids")
    if not neighbors:
        return ScalarField.zeros(spec)

    phi_j = np.zeros(spec.shape)
    for f in neighbors:
        phi_j += f.values

    gx, gy = gradient(phi_c)
    px, py = -gy.values, gx.values
    if clockwise_perp:
        px, py = -px, -py
    cx, cy = gradient(c)
    alignment = cx.values * px + cy.values * py
    sign = smoothed_sign(alignment, tp.sign_eta)

    c_safe = np.maximum(c.values, 0.0)
    if float(c.values.min()) < -1e-9:
        raise ContractError("concentration went negative beyond round-off")
    amp = receptor_response(c_safe, tp) * phi_c.values * phi_j * sign
    div = _face_divergence(amp * px, amp * py, spec.dx)
    return ScalarField(spec, -tp.mu_bar_c * div)


def classical_chemo_force(phi_c: ScalarField, c: ScalarField, mu_c: float,
                          tp: TimParams) -> ScalarField:
    """Bulk chemotaxis force mu_c * div(rho(c) phi_c grad c); OFF by default."""
    if mu_c < 0:
        raise ConfigError("mu_c must be non-negative")
    if phi_c.spec != c.spec:
        raise StructuralError("force inputs live on different grids")
    cx, cy = gradient(c)
    amp = receptor_response(np.maximum(c.values, 0.0), tp) * phi_c.values
    div = _face_divergence(amp * cx.values, amp * cy.values, phi_c.spec.dx)
    return ScalarField(phi_c.spec, mu_c * div)
