"""Pure-numpy stencil kernels (fallback backend).

Every kernel mirrors the expression tree of the compiled backend exactly,
so both backends produce bit-identical output on the same input.
Boundary handling: mirror ghost nodes for the Laplacian, zero-flux faces
for the conservative divergence.
"""

import numpy as np


def laplacian(f, dx):
    """5-point Laplacian with mirror ghosts (homogeneous Neumann)."""
    inv = 1.0 / (dx * dx)
    ny, nx = f.shape
    out = np.empty_like(f)
    if ny == 1:
        row = f[0]
        fp = np.empty(nx + 2, dtype=f.dtype)
        fp[1:-1] = row
        fp[0] = row[1]
        fp[-1] = row[-2]
        out[0] = ((fp[:-2] + fp[2:]) - 2.0 * row) * inv
        return out
    fp = np.pad(f, 1, mode="reflect")
    out[:] = (
        (fp[1:-1, :-2] + fp[1:-1, 2:]) + (fp[:-2, 1:-1] + fp[2:, 1:-1]) - 4.0 * f
    ) * inv
    return out


def _face_div(fx, fy, inv):
    """Divergence of face fluxes; absent boundary faces carry zero flux."""
    ny, nx = fx.shape[0], fx.shape[1] + 1
    fe = np.zeros((ny, nx), dtype=fx.dtype)
    fw = np.zeros((ny, nx), dtype=fx.dtype)
    fe[:, :-1] = fx
    fw[:, 1:] = fx
    fn = np.zeros((ny, nx), dtype=fx.dtype)
    fs = np.zeros((ny, nx), dtype=fx.dtype)
    if ny > 1:
        fn[:-1, :] = fy
        fs[1:, :] = fy
    return ((fe - fw) + (fn - fs)) * inv


def div_flux_faces(dfx, dfy, c, dx):
    """Conservative divergence of D∇c given face diffusivities."""
    inv = 1.0 / (dx * dx)
    fx = dfx * (c[:, 1:] - c[:, :-1])
    fy = dfy * (c[1:, :] - c[:-1, :])
    return _face_div(fx, fy, inv)


def phase_reaction(phi, lap_phi, wall_pos, wall_neg, beta_sum, gamma_sum,
                   scalar, mu, eps2):
    """Phase RHS: mu (eps2 lap + phi(1-phi)((phi-1/2) - 6F)) with
    F = (((scalar + wall_pos) + beta_sum) - wall_neg) - gamma_sum."""
    F = (((scalar + wall_pos) + beta_sum) - wall_neg) - gamma_sum
    return mu * (eps2 * lap_phi + phi * (1.0 - phi) * ((phi - 0.5) - 6.0 * F))


def chemo_substeps(c, dfx, dfy, src, k, dt, n_sub, dx, dirichlet_right):
    """Advance c by n_sub forward-Euler diffusion-decay-source sub-steps.

    Face diffusivities are held fixed for the whole call.  When
    dirichlet_right is finite the last column is pinned to it after
    every sub-step (1D oocyte-at-a-distance boundary).
    """
    inv = 1.0 / (dx * dx)
    out = c.copy()
    pin = np.isfinite(dirichlet_right)
    for _ in range(n_sub):
        fx = dfx * (out[:, 1:] - out[:, :-1])
        fy = dfy * (out[1:, :] - out[:-1, :])
        div = _face_div(fx, fy, inv)
        out = out + dt * ((div - k * out) + src)
        if pin:
            out[:, -1] = dirichlet_right
    return out
