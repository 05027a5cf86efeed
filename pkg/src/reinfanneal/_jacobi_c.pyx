# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cyclic complex Jacobi eigensolver for Hermitian matrices (compiled kernel)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, hypot, fabs

cnp.import_array()


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef double offdiag_norm(double complex[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t p, q
    cdef double s = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            s += cabs2(a[p, q])
    return sqrt(2.0 * s)


def jacobi_eigh(m, int max_sweeps, double rel_tol):
    """Diagonalize the Hermitian matrix ``m`` in place of a private copy.

    Returns ``(eigenvalues, eigenvectors, sweeps, off_norm, converged)``;
    eigenvalues are unsorted.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] a_arr = np.array(m, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] v_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef double mag, app, aqq, tau, t, c, s, off, thresh, fro = 0.0
    cdef double complex ph, phc, x, y, sph, cph, sphc, cphc
    cdef int sweep = 0
    cdef bint converged = False

    for p in range(n):
        for q in range(n):
            fro += cabs2(a[p, q])
    fro = sqrt(fro)
    thresh = rel_tol * fro

    with nogil:
        off = offdiag_norm(a, n)
        while True:
            if off <= thresh:
                converged = True
                break
            if sweep >= max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    mag = sqrt(cabs2(a[p, q]))
                    if mag < 1e-300:
                        continue
                    app = a[p, p].real
                    aqq = a[q, q].real
                    ph = a[p, q] / mag
                    phc = ph.conjugate()
                    tau = (aqq - app) / (2.0 * mag)
                    t = 1.0 / (fabs(tau) + hypot(1.0, tau))
                    if tau < 0.0:
                        t = -t
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    sph = s * ph
                    cph = c * ph
                    sphc = s * phc
                    cphc = c * phc
                    # rows p, q of G^dagger A G; columns follow from Hermiticity
                    for k in range(n):
                        x = a[p, k]
                        y = a[q, k]
                        a[p, k] = c * x - sph * y
                        a[q, k] = s * x + cph * y
                    for k in range(n):
                        a[k, p] = a[p, k].conjugate()
                        a[k, q] = a[q, k].conjugate()
                    # v holds eigenvectors as rows so this update is contiguous
                    for k in range(n):
                        x = v[p, k]
                        y = v[q, k]
                        v[p, k] = c * x - sphc * y
                        v[q, k] = s * x + cphc * y
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = app - t * mag
                    a[q, q] = aqq + t * mag
            sweep += 1
            off = offdiag_norm(a, n)

    w = np.real(np.diagonal(a_arr)).copy()
    return w, v_arr.T.copy(), sweep, off, converged
