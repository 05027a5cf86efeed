"""Quantum states, Kraus noise channels and the success-probability metric.

States are plain numpy arrays: a pure state is a 1-D amplitude vector, a
density matrix is a 2-D Hermitian array.  Channels are immutable
:class:`KrausChannel` objects applied with :func:`apply_channel`, which
realizes only the noise half of a noisy layer,

    rho -> (1 - eps) rho + eps * sum_a K_a rho K_a^dagger,

so the caller composes it after :func:`apply_unitary`.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from reinfanneal.mathcore import hermiticity_residual, kron, pauli, pauli_on

CHANNEL_KINDS = ("depolarizing", "bitflip1q", "bitflip2q", "pauli_random", "custom")


def pure_state(amplitudes, atol: float = 1e-12) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state is not normalized: <psi|psi> = {norm!r}")
    return psi


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return np.outer(psi, psi.conj())


def density_matrix_residuals(rho) -> dict:
    """Hermiticity, trace and positivity diagnostics of ``rho``."""
    rho = np.asarray(rho, dtype=np.complex128)
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return {
        "hermiticity": hermiticity_residual(rho),
        "trace": abs(np.trace(rho) - 1.0),
        "min_eigenvalue": float(w[0]),
    }


def check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-10, psd_tol=1e-9) -> np.ndarray:
    """Return ``rho`` as a complex array after validating the density-matrix invariants."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    res = density_matrix_residuals(rho)
    if res["hermiticity"] > herm_tol:
        raise ValueError(f"density matrix is not Hermitian (residual {res['hermiticity']:.2e})")
    if res["trace"] > trace_tol:
        raise ValueError(f"density matrix trace differs from 1 by {res['trace']:.2e}")
    if res["min_eigenvalue"] < -psd_tol:
        raise ValueError(f"density matrix has negative eigenvalue {res['min_eigenvalue']:.2e}")
    return rho


@dataclass(frozen=True)
class PauliNoiseSpec:
    """Per-layer weights of the x, y and z weight-1 Pauli errors."""

    probs: tuple
    n_qubits: int

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (3,) or np.any(p < 0) or np.any(p > 1) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"Pauli weights must be 3 probabilities summing to 1, got {self.probs}")


@dataclass(frozen=True)
class KrausChannel:
    """One layer's environment map: mixing weight plus ordered Kraus operators.

    ``affine`` marks the depolarizing channel, whose Kraus sum is evaluated
    through the equivalent closed form ``Tr(rho) I / d``.
    """

    dim: int
    mix_weight: float
    kraus_ops: tuple
    kind: str = "custom"
    affine: bool = False
    noise_spec: PauliNoiseSpec = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0.0 <= self.mix_weight <= 1.0:
            raise ValueError(f"mix weight must lie in [0, 1], got {self.mix_weight}")
        for k in self.kraus_ops:
            if k.shape != (self.dim, self.dim):
                raise ValueError(f"Kraus operator shape {k.shape} does not match dim {self.dim}")
            k.setflags(write=False)
        if self.kraus_ops and self.completeness_residual() > 1e-12:
            raise ValueError(f"Kraus operators are not complete (residual {self.completeness_residual():.2e})")

    def completeness_residual(self) -> float:
        """Max entry of both ``sum K K^dagger - I`` and ``sum K^dagger K - I``."""
        eye = np.eye(self.dim)
        left = sum(k @ k.conj().T for k in self.kraus_ops)
        right = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(max(np.max(np.abs(left - eye)), np.max(np.abs(right - eye))))


def _checked_weight(eps):
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"noise weight eps_l must lie in [0, 1], got {eps}")
    return eps


def _weyl_operators(d):
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) for a in range(d) for b in range(d)]


def depolarizing_channel(d: int, eps: float) -> KrausChannel:
    """Channel with action ``(1 - eps) rho + eps Tr(rho) I / d``.

    For ``d = 2**n`` the Kraus set is the n-qubit Pauli group scaled by
    ``1/d``; other dimensions use the clock-and-shift operators.
    """
    eps = _checked_weight(eps)
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    n = d.bit_length() - 1
    if d == 1 << n:
        ops = [kron(*(pauli(lab) for lab in labels)) if n else np.eye(1, dtype=complex)
               for labels in product("0xyz", repeat=n)]
    else:
        ops = _weyl_operators(d)
    ops = tuple(np.asarray(op, dtype=np.complex128) / d for op in ops)
    return KrausChannel(d, eps, ops, kind="depolarizing", affine=True)


def bitflip_channel(n_qubits: int, eps: float) -> KrausChannel:
    """Bit-flip noise on one qubit, or the symmetric three-term form on two."""
    eps = _checked_weight(eps)
    if n_qubits == 1:
        return KrausChannel(2, eps, (pauli("x"),), kind="bitflip1q")
    if n_qubits == 2:
        sx = pauli("x")
        eye = pauli("0")
        ops = tuple(m / np.sqrt(3.0) for m in (kron(sx, eye), kron(eye, sx), kron(sx, sx)))
        return KrausChannel(4, eps, ops, kind="bitflip2q")
    raise ValueError(f"bit-flip channel is defined for 1 or 2 qubits, got {n_qubits}")


def sample_simplex(rng, k: int = 3) -> np.ndarray:
    """Uniform draw from the (k-1)-simplex via sorted-uniform spacings."""
    cuts = np.sort(rng.random(k - 1))
    return np.diff(np.concatenate(([0.0], cuts, [1.0])))


def pauli_weight1_channel(n_qubits: int, eps: float, probs) -> KrausChannel:
    """Channel of the 3N operators ``sqrt(p_mu / N) sigma_mu^i``."""
    eps = _checked_weight(eps)
    spec = PauliNoiseSpec(tuple(float(p) for p in probs), n_qubits)
    ops = tuple(
        np.sqrt(p / n_qubits) * pauli_on(mu, i, n_qubits)
        for i in range(n_qubits)
        for mu, p in zip("xyz", spec.probs)
    )
    return KrausChannel(2**n_qubits, eps, ops, kind="pauli_random", noise_spec=spec)


def random_pauli_weight1_channel(n_qubits: int, eps: float, rng):
    """Draw Pauli weights uniformly on the simplex; return ``(channel, spec)``."""
    if n_qubits < 1:
        raise ValueError(f"need at least one qubit, got {n_qubits}")
    ch = pauli_weight1_channel(n_qubits, eps, sample_simplex(rng))
    return ch, ch.noise_spec


def apply_unitary(rho, u) -> np.ndarray:
    rho = np.asarray(rho)
    u = np.asarray(u)
    if rho.shape != u.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape} vs unitary {u.shape}")
    return u @ rho @ u.conj().T


def apply_channel(rho, ch: KrausChannel) -> np.ndarray:
    """Noise part of a layer: ``(1 - eps) rho + eps sum_a K_a rho K_a^dagger``."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (ch.dim, ch.dim):
        raise ValueError(f"dimension mismatch: state {rho.shape} vs channel dim {ch.dim}")
    eps = ch.mix_weight
    if eps == 0.0:
        return rho.copy()
    if ch.affine:
        noisy = (np.trace(rho) / ch.dim) * np.eye(ch.dim, dtype=np.complex128)
    else:
        noisy = sum(k @ rho @ k.conj().T for k in ch.kraus_ops)
    return (1.0 - eps) * rho + eps * noisy


def success_probability(rho, target, atol: float = 1e-10) -> float:
    """``Tr(rho |target><target|)`` clamped to ``[0, 1]`` after a tolerance check."""
    rho = np.asarray(rho)
    target = np.asarray(target).reshape(-1)
    if rho.shape != (target.size, target.size):
        raise ValueError(f"dimension mismatch: state {rho.shape} vs target of size {target.size}")
    p = float(np.real(np.vdot(target, rho @ target)))
    if p < -atol or p > 1.0 + atol:
        raise ValueError(f"success probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)
