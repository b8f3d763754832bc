# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: batched 4x4 sandwich products and leapfrog wave updates."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def sandwich(const double complex[:, :, :] left,
             const double complex[:, :, :] x,
             const double complex[:, :, :] right):
    """out[p] = left[p] @ x[p] @ right[p] for P stacked 4x4 blocks (any strides)."""
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.empty((n, 4, 4), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    cdef double complex tmp[4][4]
    cdef double complex acc
    cdef Py_ssize_t p, i, j, k
    with nogil:
        for p in range(n):
            for i in range(4):
                for j in range(4):
                    acc = 0
                    for k in range(4):
                        acc = acc + x[p, i, k] * right[p, k, j]
                    tmp[i][j] = acc
            for i in range(4):
                for j in range(4):
                    acc = 0
                    for k in range(4):
                        acc = acc + left[p, i, k] * tmp[k][j]
                    out[p, i, j] = acc
    return out_arr


def wave_step_1d(const double[:, ::1] prev, const double[:, ::1] cur,
                 const double[:, ::1] src, double dt, double dx):
    """Leapfrog update of c components on a periodic line (2nd-order stencil)."""
    cdef Py_ssize_t nc = cur.shape[0], n = cur.shape[1]
    out_arr = np.empty((nc, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double r = dt * dt / (dx * dx)
    cdef double dt2 = dt * dt
    cdef Py_ssize_t c, i, im, ip
    with nogil:
        for c in range(nc):
            for i in range(n):
                im = i - 1 if i > 0 else n - 1
                ip = i + 1 if i < n - 1 else 0
                out[c, i] = (2.0 * cur[c, i] - prev[c, i]
                             + r * (cur[c, ip] - 2.0 * cur[c, i] + cur[c, im])
                             + dt2 * src[c, i])
    return out_arr


def wave_step_3d(const double[:, :, :, ::1] prev, const double[:, :, :, ::1] cur,
                 const double[:, :, :, ::1] src, double dt,
                 double dx, double dy, double dz):
    """Leapfrog update of c components on a periodic box (7-point Laplacian)."""
    cdef Py_ssize_t nc = cur.shape[0]
    cdef Py_ssize_t nx = cur.shape[1], ny = cur.shape[2], nz = cur.shape[3]
    out_arr = np.empty((nc, nx, ny, nz), dtype=np.float64)
    cdef double[:, :, :, ::1] out = out_arr
    cdef double rx = 1.0 / (dx * dx), ry = 1.0 / (dy * dy), rz = 1.0 / (dz * dz)
    cdef double dt2 = dt * dt
    cdef double lap, u
    cdef Py_ssize_t c, i, j, k, im, ip, jm, jp, km, kp
    with nogil:
        for c in range(nc):
            for i in range(nx):
                im = i - 1 if i > 0 else nx - 1
                ip = i + 1 if i < nx - 1 else 0
                for j in range(ny):
                    jm = j - 1 if j > 0 else ny - 1
                    jp = j + 1 if j < ny - 1 else 0
                    for k in range(nz):
                        km = k - 1 if k > 0 else nz - 1
                        kp = k + 1 if k < nz - 1 else 0
                        u = cur[c, i, j, k]
                        lap = (rx * (cur[c, ip, j, k] - 2.0 * u + cur[c, im, j, k])
                               + ry * (cur[c, i, jp, k] - 2.0 * u + cur[c, i, jm, k])
                               + rz * (cur[c, i, j, kp] - 2.0 * u + cur[c, i, j, km]))
                        out[c, i, j, k] = 2.0 * u - prev[c, i, j, k] + dt2 * (lap + src[c, i, j, k])
    return out_arr
