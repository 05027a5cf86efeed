"""Dense complex linear algebra shared by every other module.

Pauli matrices, Kronecker products, a self-contained Hermitian eigensolver
and the two matrix functions built on it: ``exp(-iH)`` and the regularized
``-ln(rho)``.

The eigensolver is a cyclic complex Jacobi iteration.  A compiled kernel is
used when the ``_jacobi_c`` extension is importable; otherwise the numpy
fallback in ``_jacobi_py`` runs the identical rotation sequence.  Set
``REINFANNEAL_PURE=1`` to force the fallback.
"""

import os
from functools import reduce
from typing import NamedTuple

import numpy as np

from reinfanneal.errors import NumericalError

if os.environ.get("REINFANNEAL_PURE"):
    from reinfanneal._jacobi_py import jacobi_eigh as _jacobi_eigh

    BACKEND = "python"
else:
    try:
        from reinfanneal._jacobi_c import jacobi_eigh as _jacobi_eigh

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from reinfanneal._jacobi_py import jacobi_eigh as _jacobi_eigh

        BACKEND = "python"

MAX_SWEEPS = 100
REL_TOL = 1e-13
DEFAULT_LAMBDA_FLOOR = 1e-12

PAULI_LABELS = ("0", "x", "y", "z")

_PAULI = {
    "0": np.array([[1, 0], [0, 1]], dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
for _m in _PAULI.values():
    _m.setflags(write=False)


class HermitianEigenSystem(NamedTuple):
    """Ascending eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def pauli(label) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``label`` in ``{0, x, y, z}``.

    ``sigma_z = diag(1, -1)``, so basis index 0 is the ``|+>`` state.
    """
    key = str(label).lower()
    if key == "i":
        key = "0"
    try:
        return _PAULI[key].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli label {label!r}; expected one of {PAULI_LABELS}") from None


def kron(*factors) -> np.ndarray:
    """Kronecker product with the first factor as the most significant qubit."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=np.complex128) for f in factors))


def pauli_on(label, site: int, n_qubits: int) -> np.ndarray:
    """Weight-1 Pauli operator acting on qubit ``site`` (0 = leftmost) of ``n_qubits``."""
    if not 0 <= site < n_qubits:
        raise ValueError(f"site {site} out of range for {n_qubits} qubits")
    eye = _PAULI["0"]
    return kron(*(pauli(label) if k == site else eye for k in range(n_qubits)))


def hermiticity_residual(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def hermitian_eig(m, tol: float = 1e-10, max_sweeps: int = MAX_SWEEPS) -> HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Args:
        m: Square complex matrix, Hermitian to within ``tol``.
        tol: Largest accepted entry of ``|M - M^dagger|``.
        max_sweeps: Iteration cap; exceeding it raises :class:`NumericalError`.

    Returns:
        Eigenvalues in ascending order with matching eigenvector columns.
    """
    m = _as_square(m)
    asym = hermiticity_residual(m)
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian: max |M - M^dagger| = {asym:.3e} > tol = {tol:.1e}")
    m = 0.5 * (m + m.conj().T)
    w, v, _, off, converged = _jacobi_eigh(m, max_sweeps, REL_TOL)
    if not converged:
        raise NumericalError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps", residual=off)
    order = np.argsort(w, kind="stable")
    return HermitianEigenSystem(w[order], v[:, order])


def _eig_function(m, fn) -> np.ndarray:
    w, v = hermitian_eig(m)
    return (v * fn(w)) @ v.conj().T


def unitary_exp(h) -> np.ndarray:
    """``exp(-iH)`` for Hermitian ``H`` via its eigendecomposition."""
    return _eig_function(h, lambda w: np.exp(-1j * w))


def neg_log_density(rho, lambda_floor: float = DEFAULT_LAMBDA_FLOOR) -> np.ndarray:
    """Regularized ``-ln(rho)``.

    Eigenvalues of ``rho`` below ``lambda_floor`` are raised to it before the
    logarithm, so the result has spectrum in ``[0, -ln(lambda_floor)]``.
    """
    if not 0.0 < lambda_floor < 1.0:
        raise ValueError(f"lambda_floor must lie in (0, 1), got {lambda_floor}")
    return _eig_function(rho, lambda w: -np.log(np.maximum(w, lambda_floor)))
