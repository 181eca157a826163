# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled stencil kernels.

Expression trees match src/eggchamber/_stencils_py.py node for node, so the
two backends are bit-identical (the build disables FP contraction).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def laplacian(double[:, ::1] f, double dx):
    cdef Py_ssize_t ny = f.shape[0]
    cdef Py_ssize_t nx = f.shape[1]
    cdef double inv = 1.0 / (dx * dx)
    out_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t ix, iy, iw, ie, ip, iq
    cdef double w, e, p, q
    if ny == 1:
        for ix in range(nx):
            iw = ix - 1 if ix > 0 else 1
            ie = ix + 1 if ix < nx - 1 else nx - 2
            out[0, ix] = ((f[0, iw] + f[0, ie]) - 2.0 * f[0, ix]) * inv
        return out_arr
    for iy in range(ny):
        ip = iy - 1 if iy > 0 else 1
        iq = iy + 1 if iy < ny - 1 else ny - 2
        for ix in range(nx):
            iw = ix - 1 if ix > 0 else 1
            ie = ix + 1 if ix < nx - 1 else nx - 2
            w = f[iy, iw]
            e = f[iy, ie]
            p = f[ip, ix]
            q = f[iq, ix]
            out[iy, ix] = ((w + e) + (p + q) - 4.0 * f[iy, ix]) * inv
    return out_arr


def div_flux_faces(double[:, ::1] dfx, double[:, ::1] dfy, double[:, ::1] c,
                   double dx):
    cdef Py_ssize_t ny = c.shape[0]
    cdef Py_ssize_t nx = c.shape[1]
    cdef double inv = 1.0 / (dx * dx)
    out_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    _div_flux_into(dfx, dfy, c, inv, out)
    return out_arr


cdef inline void _div_flux_into(double[:, ::1] dfx, double[:, ::1] dfy,
                                double[:, ::1] c, double inv,
                                double[:, ::1] out) noexcept nogil:
    # Branch-free interior sweep; boundary rows/columns handled separately
    # with the same expression tree (missing faces enter as literal 0.0).
    cdef Py_ssize_t ny = c.shape[0]
    cdef Py_ssize_t nx = c.shape[1]
    cdef Py_ssize_t ix, iy
    cdef double fe, fw, fn, fs
    for iy in range(ny):
        fe = dfx[iy, 0] * (c[iy, 1] - c[iy, 0])
        fn = dfy[iy, 0] * (c[iy + 1, 0] - c[iy, 0]) if iy < ny - 1 else 0.0
        fs = dfy[iy - 1, 0] * (c[iy, 0] - c[iy - 1, 0]) if iy > 0 else 0.0
        out[iy, 0] = ((fe - 0.0) + (fn - fs)) * inv
        if 0 < iy < ny - 1:
            for ix in range(1, nx - 1):
                fe = dfx[iy, ix] * (c[iy, ix + 1] - c[iy, ix])
                fw = dfx[iy, ix - 1] * (c[iy, ix] - c[iy, ix - 1])
                fn = dfy[iy, ix] * (c[iy + 1, ix] - c[iy, ix])
                fs = dfy[iy - 1, ix] * (c[iy, ix] - c[iy - 1, ix])
                out[iy, ix] = ((fe - fw) + (fn - fs)) * inv
        else:
            for ix in range(1, nx - 1):
                fe = dfx[iy, ix] * (c[iy, ix + 1] - c[iy, ix])
                fw = dfx[iy, ix - 1] * (c[iy, ix] - c[iy, ix - 1])
                fn = dfy[iy, ix] * (c[iy + 1, ix] - c[iy, ix]) if iy < ny - 1 else 0.0
                fs = dfy[iy - 1, ix] * (c[iy, ix] - c[iy - 1, ix]) if iy > 0 else 0.0
                out[iy, ix] = ((fe - fw) + (fn - fs)) * inv
        fw = dfx[iy, nx - 2] * (c[iy, nx - 1] - c[iy, nx - 2])
        fn = dfy[iy, nx - 1] * (c[iy + 1, nx - 1] - c[iy, nx - 1]) if iy < ny - 1 else 0.0
        fs = dfy[iy - 1, nx - 1] * (c[iy, nx - 1] - c[iy - 1, nx - 1]) if iy > 0 else 0.0
        out[iy, nx - 1] = ((0.0 - fw) + (fn - fs)) * inv


def phase_reaction(double[:, ::1] phi, double[:, ::1] lap_phi,
                   double[:, ::1] wall_pos, double[:, ::1] wall_neg,
                   double[:, ::1] beta_sum, double[:, ::1] gamma_sum,
                   double scalar, double mu, double eps2):
    cdef Py_ssize_t ny = phi.shape[0]
    cdef Py_ssize_t nx = phi.shape[1]
    out_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t ix, iy
    cdef double F, p
    with nogil:
        for iy in range(ny):
            for ix in range(nx):
                F = (((scalar + wall_pos[iy, ix]) + beta_sum[iy, ix])
                     - wall_neg[iy, ix]) - gamma_sum[iy, ix]
                p = phi[iy, ix]
                out[iy, ix] = mu * (eps2 * lap_phi[iy, ix]
                                    + p * (1.0 - p) * ((p - 0.5) - 6.0 * F))
    return out_arr


def chemo_substeps(double[:, ::1] c, double[:, ::1] dfx, double[:, ::1] dfy,
                   double[:, ::1] src, double k, double dt, Py_ssize_t n_sub,
                   double dx, double dirichlet_right):
    cdef Py_ssize_t ny = c.shape[0]
    cdef Py_ssize_t nx = c.shape[1]
    cdef double inv = 1.0 / (dx * dx)
    cdef bint pin = dirichlet_right == dirichlet_right  # finite (not NaN)
    a_arr = np.array(c, dtype=np.float64)
    b_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] b = b_arr
    cdef double[:, ::1] tmp
    cdef Py_ssize_t step, ix, iy
    cdef double fe, fw, fn, fs, div
    with nogil:
        for step in range(n_sub):
            for iy in range(ny):
                fe = dfx[iy, 0] * (a[iy, 1] - a[iy, 0])
                fn = dfy[iy, 0] * (a[iy + 1, 0] - a[iy, 0]) if iy < ny - 1 else 0.0
                fs = dfy[iy - 1, 0] * (a[iy, 0] - a[iy - 1, 0]) if iy > 0 else 0.0
                div = ((fe - 0.0) + (fn - fs)) * inv
                b[iy, 0] = a[iy, 0] + dt * ((div - k * a[iy, 0]) + src[iy, 0])
                if 0 < iy < ny - 1:
                    for ix in range(1, nx - 1):
                        fe = dfx[iy, ix] * (a[iy, ix + 1] - a[iy, ix])
                        fw = dfx[iy, ix - 1] * (a[iy, ix] - a[iy, ix - 1])
                        fn = dfy[iy, ix] * (a[iy + 1, ix] - a[iy, ix])
                        fs = dfy[iy - 1, ix] * (a[iy, ix] - a[iy - 1, ix])
                        div = ((fe - fw) + (fn - fs)) * inv
                        b[iy, ix] = a[iy, ix] + dt * ((div - k * a[iy, ix]) + src[iy, ix])
                else:
                    for ix in range(1, nx - 1):
                        fe = dfx[iy, ix] * (a[iy, ix + 1] - a[iy, ix])
                        fw = dfx[iy, ix - 1] * (a[iy, ix] - a[iy, ix - 1])
                        fn = dfy[iy, ix] * (a[iy + 1, ix] - a[iy, ix]) if iy < ny - 1 else 0.0
                        fs = dfy[iy - 1, ix] * (a[iy, ix] - a[iy - 1, ix]) if iy > 0 else 0.0
                        div = ((fe - fw) + (fn - fs)) * inv
                        b[iy, ix] = a[iy, ix] + dt * ((div - k * a[iy, ix]) + src[iy, ix])
                fw = dfx[iy, nx - 2] * (a[iy, nx - 1] - a[iy, nx - 2])
                fn = dfy[iy, nx - 1] * (a[iy + 1, nx - 1] - a[iy, nx - 1]) if iy < ny - 1 else 0.0
                fs = dfy[iy - 1, nx - 1] * (a[iy, nx - 1] - a[iy - 1, nx - 1]) if iy > 0 else 0.0
                div = ((0.0 - fw) + (fn - fs)) * inv
                b[iy, nx - 1] = a[iy, nx - 1] + dt * ((div - k * a[iy, nx - 1]) + src[iy, nx - 1])
            if pin:
                for iy in range(ny):
                    b[iy, nx - 1] = dirichlet_right
            tmp = a
            a = b
            b = tmp
    return b_arr if n_sub % 2 == 1 else a_arr
