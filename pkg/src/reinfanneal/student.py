"""Student model: a short chain of plain Hamiltonian layers trained to map the
teacher's input state onto its noise-free reinforced output.

Training is gradient descent on the local errors

    e_l = 1 - Re <phi_bwd_{l+1}| exp(-i H_l) |phi_fwd_l>,

where the forward states start at the teacher input and the backward states
start at the teacher output.  Each ``e_l`` equals the end-to-end error as a
function of layer ``l`` alone, so one synchronous update per iteration is a
true gradient step on ``e``.
"""

from dataclasses import dataclass, field, replace
from itertools import combinations, product
from typing import Optional

import numpy as np

from reinfanneal.mathcore import hermitian_eig, kron, pauli, pauli_on, unitary_exp
from reinfanneal.qstate import apply_channel, apply_unitary, projector, success_probability
from reinfanneal.teacher import (
    TeacherConfig,
    make_channel,
    noise_rng,
)

GRADIENT_MODES = ("closed_form_1q", "pauli_basis_2q", "finite_difference")
UPDATE_ORDERS = ("sequential", "synchronous")
# below this field norm the 1q gradient switches to its series expansion
SMALL_H = 1e-12


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    kind: str
    labels: tuple
    ops: np.ndarray

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.ops.shape[1]


def single_qubit_basis() -> OperatorBasis:
    return OperatorBasis("single_qubit_3term", ("x", "y", "z"), np.stack([pauli(m) for m in "xyz"]))


def two_qubit_basis() -> OperatorBasis:
    labels = tuple(a + b for a, b in product("0xyz", repeat=2))
    return OperatorBasis("two_qubit_16term", labels, np.stack([kron(pauli(a), pauli(b)) for a, b in labels]))


def nbody_basis(n_qubits: int) -> OperatorBasis:
    """All weight-1 and weight-2 Pauli terms on ``n_qubits`` qubits."""
    labels, ops = [], []
    for i in range(n_qubits):
        for mu in "xyz":
            labels.append(f"{mu}{i}")
            ops.append(pauli_on(mu, i, n_qubits))
    for i, j in combinations(range(n_qubits), 2):
        for mu, nu in product("xyz", repeat=2):
            labels.append(f"{mu}{i}{nu}{j}")
            ops.append(pauli_on(mu, i, n_qubits) @ pauli_on(nu, j, n_qubits))
    return OperatorBasis(f"nbody_one_two({n_qubits})", tuple(labels), np.stack(ops))


def basis_for_dim(d: int) -> OperatorBasis:
    if d == 2:
        return single_qubit_basis()
    if d == 4:
        return two_qubit_basis()
    raise ValueError(f"no student basis preset for dimension {d}")


@dataclass(frozen=True, eq=False)
class StudentParams:
    theta: np.ndarray
    theta_max: float = 1.0

    def __post_init__(self):
        if np.asarray(self.theta).ndim != 2:
            raise ValueError("theta must have shape (L_s, basis size)")
        if np.max(np.abs(self.theta), initial=0.0) > self.theta_max:
            raise ValueError(f"coefficients exceed the bound theta_max = {self.theta_max}")

    @property
    def n_layers(self) -> int:
        return self.theta.shape[0]


@dataclass(frozen=True)
class LearnConfig:
    eta: float = 1.0
    iterations: int = 100
    init_range: tuple = (-1.0, 1.0)
    gradient_mode: str = "closed_form_1q"
    fd_step: float = 1e-6
    seed: int = 0
    theta_max: float = 1.0
    normalize: bool = False
    update_order: str = "sequential"

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError(f"learning rate must be non-negative, got {self.eta}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        lo, hi = self.init_range
        if not lo < hi:
            raise ValueError(f"init range must satisfy lo < hi, got {self.init_range}")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValueError(f"unknown gradient mode {self.gradient_mode!r}; expected one of {GRADIENT_MODES}")
        if self.fd_step <= 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step}")
        if self.update_order not in UPDATE_ORDERS:
            raise ValueError(f"unknown update order {self.update_order!r}; expected one of {UPDATE_ORDERS}")


def default_learn_config(d: int, **overrides) -> LearnConfig:
    """Published hyperparameters: eta=1, init (-1, 1) for d=2; eta=0.02, init 1e-6 for d=4."""
    if d == 2:
        base = LearnConfig(eta=1.0, init_range=(-1.0, 1.0), gradient_mode="closed_form_1q")
    elif d == 4:
        base = LearnConfig(eta=0.02, init_range=(-1e-6, 1e-6), gradient_mode="pauli_basis_2q")
    else:
        raise ValueError(f"no learning preset for dimension {d}")
    return replace(base, **overrides)


@dataclass(frozen=True, eq=False)
class SweepStates:
    forward: np.ndarray
    backward: np.ndarray


@dataclass(frozen=True)
class GradScratch1Q:
    a: complex
    b: tuple
    h: float


@dataclass(eq=False)
class TrainResult:
    params: StudentParams
    errors: np.ndarray = field(repr=False)
    final_error: float = 0.0


def student_hamiltonian(theta_l, basis: OperatorBasis) -> np.ndarray:
    theta_l = np.asarray(theta_l, dtype=float)
    if theta_l.shape != (basis.size,):
        raise ValueError(f"expected {basis.size} coefficients for basis {basis.kind}, got shape {theta_l.shape}")
    return np.tensordot(theta_l, basis.ops, axes=1)


def unitary_1q(h) -> np.ndarray:
    """Closed form of ``exp(-i h.sigma)``, batched over leading axes of ``h``."""
    h = np.asarray(h, dtype=float)
    hx, hy, hz = h[..., 0], h[..., 1], h[..., 2]
    norm = np.sqrt(hx * hx + hy * hy + hz * hz)
    cos = np.cos(norm)
    sinc = np.sinc(norm / np.pi)  # sin(h)/h, finite at h = 0
    u = np.empty(h.shape[:-1] + (2, 2), dtype=np.complex128)
    u[..., 0, 0] = cos - 1j * hz * sinc
    u[..., 0, 1] = (-hy - 1j * hx) * sinc
    u[..., 1, 0] = (hy - 1j * hx) * sinc
    u[..., 1, 1] = cos + 1j * hz * sinc
    return u


def layer_unitaries(params, basis: OperatorBasis) -> np.ndarray:
    theta = params.theta if isinstance(params, StudentParams) else np.asarray(params, dtype=float)
    if basis.kind == "single_qubit_3term":
        return unitary_1q(theta)
    return np.stack([unitary_exp(student_hamiltonian(t, basis)) for t in theta])


def forward_sweep(unitaries, psi0) -> np.ndarray:
    """States ``phi_fwd_0 .. phi_fwd_Ls`` from ``phi_fwd_0 = psi0``."""
    out = np.empty((len(unitaries) + 1, len(psi0)), dtype=np.complex128)
    out[0] = psi0
    for l, u in enumerate(unitaries):
        out[l + 1] = u @ out[l]
    return out


def backward_sweep(unitaries, psi_out) -> np.ndarray:
    """States ``phi_bwd_0 .. phi_bwd_Ls`` from ``phi_bwd_Ls = psi_out``."""
    n = len(unitaries)
    out = np.empty((n + 1, len(psi_out)), dtype=np.complex128)
    out[n] = psi_out
    for l in range(n - 1, -1, -1):
        out[l] = unitaries[l].conj().T @ out[l + 1]
    return out


def sweeps(unitaries, psi_in, psi_out) -> SweepStates:
    return SweepStates(forward_sweep(unitaries, psi_in), backward_sweep(unitaries, psi_out))


def local_error(phi_fwd, phi_bwd_next, hamiltonian=None, *, unitary=None):
    """Return ``(e_l, f_l)`` with ``f_l = <phi_bwd_{l+1}|U|phi_fwd_l>``, ``e_l = 1 - Re f_l``."""
    if unitary is None:
        unitary = unitary_exp(hamiltonian)
    f = complex(np.vdot(phi_bwd_next, unitary @ phi_fwd))
    return 1.0 - f.real, f


def gradient_scratch_1q(phi_fwd, phi_bwd_next, theta_l) -> GradScratch1Q:
    ap, am = phi_fwd
    bp, bm = np.conj(phi_bwd_next)
    a = ap * bp + am * bm
    b = (ap * bm + am * bp, 1j * (ap * bm - am * bp), ap * bp - am * bm)
    return GradScratch1Q(complex(a), tuple(complex(x) for x in b), float(np.linalg.norm(theta_l)))


def grad_closed_form_1q(theta_l, phi_fwd, phi_bwd_next) -> np.ndarray:
    """Analytic ``d e_l / d h`` for a single-qubit layer ``H = h.sigma``."""
    h_vec = np.asarray(theta_l, dtype=float)
    sc = gradient_scratch_1q(phi_fwd, phi_bwd_next, h_vec)
    re_a = sc.a.real
    im_b = np.imag(np.asarray(sc.b))
    h = sc.h
    if h < SMALL_H:
        # leading terms of the expansion in h
        return h_vec * re_a - im_b
    proj = float(h_vec @ im_b) / h
    sin, cos = np.sin(h), np.cos(h)
    bracket = (re_a + proj / h) * sin - proj * cos
    return (h_vec / h) * bracket - im_b * sin / h


def grad_pauli_basis_2q(theta_l, phi_fwd, phi_bwd_next, basis: Optional[OperatorBasis] = None,
                        normalize: bool = False) -> np.ndarray:
    """Update direction ``delta theta / eta`` of the two-qubit Pauli-basis rule.

    Evaluates ``sum_n sum_mu Im(exp(-i E_n) <n|P_mu P_nu|n> <phi_bwd|P_mu|phi_fwd>)``
    from the eigenbasis of the layer Hamiltonian.  This is ``d`` times the
    descent direction under the commuting approximation
    ``dU/dtheta ~ -i P_nu U``; ``normalize=True`` divides out the ``d``.
    """
    basis = basis or two_qubit_basis()
    if basis.kind != "two_qubit_16term":
        raise ValueError("the Pauli-basis rule needs the complete two-qubit basis")
    energies, vecs = hermitian_eig(student_hamiltonian(theta_l, basis))
    ops = basis.ops
    # <n| P_mu P_nu |n> for every (mu, nu, n)
    prod_ops = np.einsum("aij,bjk->abik", ops, ops)
    diag = np.einsum("in,abij,jn->abn", vecs.conj(), prod_ops, vecs)
    trace_u = diag @ np.exp(-1j * energies)
    overlaps = np.einsum("i,aij,j->a", np.conj(phi_bwd_next), ops, phi_fwd)
    direction = np.imag(trace_u * overlaps[:, None]).sum(axis=0)
    if normalize:
        direction = direction / basis.dim
    return direction


def central_difference(func, x, step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for k in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp.flat[k] += step
        xm.flat[k] -= step
        grad.flat[k] = (func(xp) - func(xm)) / (2.0 * step)
    return grad


def grad_finite_difference(theta_l, phi_fwd, phi_bwd_next, basis: OperatorBasis, fd_step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of ``e_l`` using the eigensolver exponential."""
    if fd_step <= 0:
        raise ValueError(f"fd_step must be positive, got {fd_step}")

    def err(theta):
        return local_error(phi_fwd, phi_bwd_next, student_hamiltonian(theta, basis))[0]

    return central_difference(err, theta_l, fd_step)


def final_error(unitaries, psi_in, psi_out) -> float:
    """``e = 1/2 |phi_bwd_Ls - phi_fwd_Ls|^2``."""
    out = forward_sweep(unitaries, psi_in)[-1]
    diff = psi_out - out
    return 0.5 * float(np.real(np.vdot(diff, diff)))


def init_params(n_layers: int, basis: OperatorBasis, cfg: LearnConfig, rng=None) -> StudentParams:
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    lo, hi = cfg.init_range
    theta = rng.uniform(lo, hi, size=(n_layers, basis.size))
    return StudentParams(np.clip(theta, -cfg.theta_max, cfg.theta_max), cfg.theta_max)


def _layer_step(mode, theta_l, fwd, bwd, basis, cfg):
    if mode == "closed_form_1q":
        return -grad_closed_form_1q(theta_l, fwd, bwd)
    if mode == "pauli_basis_2q":
        return grad_pauli_basis_2q(theta_l, fwd, bwd, basis, cfg.normalize)
    return -grad_finite_difference(theta_l, fwd, bwd, basis, cfg.fd_step)


def gd_train(psi_in, psi_out, basis: OperatorBasis, cfg: LearnConfig, n_layers: int = 5,
             init: Optional[StudentParams] = None) -> TrainResult:
    """Gradient descent on the student parameters, every layer updated once per iteration.

    Each iteration starts from one backward sweep of the current parameters.
    ``sequential`` order then walks the layers forward, updating layer ``l``
    and propagating the forward state through the updated unitary, so every
    layer sees the current forward state at the same cost as one sweep.
    ``synchronous`` order updates all layers from frozen forward/backward
    states; since every local error is the global error in disguise, it
    overshoots at large ``eta``.  Coefficients are clipped to
    ``[-theta_max, theta_max]`` after each update.

    ``errors[k]`` is the final error before iteration ``k``; the last entry
    is the error of the returned parameters.
    """
    if cfg.gradient_mode == "closed_form_1q" and basis.kind != "single_qubit_3term":
        raise ValueError("closed_form_1q gradients need the single-qubit basis")
    params = init if init is not None else init_params(n_layers, basis, cfg)
    theta = params.theta.astype(float).copy()
    errors = np.empty(cfg.iterations + 1)
    for it in range(cfg.iterations):
        us = layer_unitaries(theta, basis)
        bwd = backward_sweep(us, psi_out)
        fwd = forward_sweep(us, psi_in)
        diff = psi_out - fwd[-1]
        errors[it] = 0.5 * float(np.real(np.vdot(diff, diff)))
        if cfg.update_order == "synchronous":
            step = np.stack([
                _layer_step(cfg.gradient_mode, theta[l], fwd[l], bwd[l + 1], basis, cfg)
                for l in range(theta.shape[0])
            ])
            theta = np.clip(theta + cfg.eta * step, -cfg.theta_max, cfg.theta_max)
            continue
        phi = fwd[0]
        for l in range(theta.shape[0]):
            step = _layer_step(cfg.gradient_mode, theta[l], phi, bwd[l + 1], basis, cfg)
            theta[l] = np.clip(theta[l] + cfg.eta * step, -cfg.theta_max, cfg.theta_max)
            phi = layer_unitaries(theta[l:l + 1], basis)[0] @ phi
    errors[-1] = final_error(layer_unitaries(theta, basis), psi_in, psi_out)
    return TrainResult(StudentParams(theta, cfg.theta_max), errors, float(errors[-1]))


def teacher_target(cfg: TeacherConfig, sched) -> np.ndarray:
    """Output of the noise-free reinforced teacher, evolved as a pure state.

    For a pure lookahead state ``phi`` the clamped ``-ln`` is
    ``-ln(lambda_floor) (I - |phi><phi|)``, used here in closed form.
    """
    if cfg.epsilon != 0.0:
        raise ValueError("training targets come from the noise-free teacher (epsilon must be 0)")
    inst = cfg.instance
    psi = inst.psi_i.copy()
    eye = np.eye(inst.dim, dtype=np.complex128)
    penalty = -np.log(cfg.lambda_floor)
    plain = None
    if cfg.r != 0.0 and cfg.delta_l > 0:
        plain = [unitary_exp(inst.annealing_hamiltonian(t)) for t in sched.values]
    for l in range(cfg.n_layers):
        h = inst.annealing_hamiltonian(sched[l])
        if cfg.r != 0.0:
            ahead = psi
            for k in range(l, l + cfg.delta_l):
                ahead = plain[min(k, cfg.n_layers - 1)] @ ahead
            h = h + cfg.r * penalty * (eye - projector(ahead))
        psi = unitary_exp(h) @ psi
    return psi / np.linalg.norm(psi)


def evaluate_student_noisy(params: StudentParams, basis: OperatorBasis, inst, noise: str = "none",
                           epsilon: float = 0.0, master_seed: int = 0, realization: int = 0, channels=None):
    """Noisy density-matrix run of the trained student from ``|psi_i><psi_i|``.

    The per-layer noise weight is ``epsilon / L_s``.  Returns the success
    probability after every layer and its final value.
    """
    n = params.n_layers
    eps_layer = epsilon / n
    if not 0.0 <= eps_layer <= 1.0:
        raise ValueError(f"per-layer noise eps/L_s = {eps_layer} outside [0, 1]")
    us = layer_unitaries(params, basis)
    rho = projector(inst.psi_i)
    p = np.empty(n)
    for l in range(n):
        rho = apply_unitary(rho, us[l])
        if channels is not None:
            ch = channels[l]
        else:
            rng = noise_rng(master_seed, realization, l) if noise == "pauli_random" else None
            ch = make_channel(noise, inst, eps_layer, rng)
        if ch is not None:
            rho = apply_channel(rho, ch)
        p[l] = success_probability(rho, inst.psi_f)
    return p, float(p[-1])

