# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the two hot tensor-product sums.

Both functions mirror :mod:`atomchip._kernels_py` exactly; the Python
versions are the reference and the tests compare the two.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def geometry_tensor(double[::1] p1, double[::1] p2,
                    double[::1] xs, double[::1] wx,
                    double[::1] ys, double[::1] wy,
                    double[::1] zs, double[::1] wz):
    """Half the weighted sum of (p1-r)_i (p2-r)_j / (|p1-r|^3 |p2-r|^3)."""
    cdef Py_ssize_t nx = xs.shape[0], ny = ys.shape[0], nz = zs.shape[0]
    cdef Py_ssize_t a, b, c
    cdef double acc[9]
    cdef double a1x, a1y, a1z, a2x, a2y, a2z, r1, r2, wgt, f, wxy
    cdef int q
    for q in range(9):
        acc[q] = 0.0
    with nogil:
        for a in range(nx):
            a1x = p1[0] - xs[a]
            a2x = p2[0] - xs[a]
            for b in range(ny):
                a1y = p1[1] - ys[b]
                a2y = p2[1] - ys[b]
                wxy = wx[a] * wy[b]
                for c in range(nz):
                    a1z = p1[2] - zs[c]
                    a2z = p2[2] - zs[c]
                    r1 = a1x * a1x + a1y * a1y + a1z * a1z
                    r2 = a2x * a2x + a2y * a2y + a2z * a2z
                    wgt = wxy * wz[c]
                    f = wgt / (r1 * sqrt(r1) * r2 * sqrt(r2))
                    acc[0] += f * a1x * a2x
                    acc[1] += f * a1x * a2y
                    acc[2] += f * a1x * a2z
                    acc[3] += f * a1y * a2x
                    acc[4] += f * a1y * a2y
                    acc[5] += f * a1y * a2z
                    acc[6] += f * a1z * a2x
                    acc[7] += f * a1z * a2y
                    acc[8] += f * a1z * a2z
    out = np.empty((3, 3))
    cdef double[:, ::1] o = out
    for q in range(9):
        o[q // 3, q % 3] = 0.5 * acc[q]
    return out


def transverse_field(double[::1] xobs, double zobs,
                     double[::1] xs, double[::1] wx,
                     double[:, ::1] ys, double[:, ::1] wy,
                     double[::1] zs, double[::1] wz,
                     double[:, ::1] jy):
    """Sum of jy * (zobs - z') / R^3 over source nodes, for points (xobs, 0, zobs).

    ``ys``/``wy``/``jy`` have shape (nx, ny) so that the transverse nodes can
    follow a corrugated edge.  The mu0/4pi prefactor is applied by the caller.
    """
    cdef Py_ssize_t no = xobs.shape[0], nx = xs.shape[0]
    cdef Py_ssize_t ny = ys.shape[1], nz = zs.shape[0]
    cdef Py_ssize_t o, a, b, c
    cdef double dx, dz, r2, acc, s, wxy
    out = np.zeros(no)
    cdef double[::1] res = out
    with nogil:
        for o in range(no):
            acc = 0.0
            for a in range(nx):
                dx = xobs[o] - xs[a]
                for b in range(ny):
                    wxy = wx[a] * wy[a, b] * jy[a, b]
                    s = 0.0
                    for c in range(nz):
                        dz = zobs - zs[c]
                        r2 = dx * dx + ys[a, b] * ys[a, b] + dz * dz
                        s += wz[c] * dz / (r2 * sqrt(r2))
                    acc += wxy * s
            res[o] = acc
    return out
