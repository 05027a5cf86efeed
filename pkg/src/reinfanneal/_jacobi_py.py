"""Pure-Python cyclic complex Jacobi eigensolver.

Same rotation sequence as the compiled kernel in ``_jacobi_c.pyx``; row and
column updates are vectorized with numpy, the pivot loop is not.
"""

import numpy as np


def _offdiag_norm(a):
    # summed directly; total minus diagonal cancels catastrophically near convergence
    upper = np.abs(a[np.triu_indices(a.shape[0], 1)])
    return float(np.sqrt(2.0 * np.sum(upper**2)))


def jacobi_eigh(m, max_sweeps, rel_tol):
    a = np.array(m, dtype=np.complex128, order="C", copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    thresh = rel_tol * float(np.linalg.norm(a))
    sweep = 0
    converged = False
    off = _offdiag_norm(a)
    while True:
        if off <= thresh:
            converged = True
            break
        if sweep >= max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                ph = apq / mag
                phc = ph.conjugate()
                tau = (aqq - app) / (2.0 * mag)
                t = 1.0 / (abs(tau) + np.hypot(1.0, tau))
                if tau < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                x = a[:, p].copy()
                y = a[:, q]
                a[:, p] = c * x - s * phc * y
                a[:, q] = s * x + c * phc * y
                x = a[p, :].copy()
                y = a[q, :]
                a[p, :] = c * x - s * ph * y
                a[q, :] = s * x + c * ph * y
                x = v[:, p].copy()
                y = v[:, q]
                v[:, p] = c * x - s * phc * y
                v[:, q] = s * x + c * phc * y

                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
        sweep += 1
        off = _offdiag_norm(a)

    w = np.real(np.diagonal(a)).copy()
    return w, v, sweep, off, converged
