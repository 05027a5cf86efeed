"""Reinforced quantum annealing teacher.

A layer maps ``rho_l`` to ``E_l(U rho_l U^dagger)`` with
``U = exp(-i H_l)`` and

    H_l = (1 - t_l) H_i + t_l H_f - r ln(rho_{l+dl}(0)),

where ``rho_{l+dl}(0)`` is ``rho_l`` pushed through ``dl`` plain annealing
layers (no noise, no reinforcement).  Layers are indexed ``l = 0 .. L_t-1``;
the trace records ``P_success(l) = Tr(rho_{l+1} |psi_f><psi_f|)`` so the
final entry is the success probability at the end of the run.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from reinfanneal.mathcore import DEFAULT_LAMBDA_FLOOR, neg_log_density, unitary_exp
from reinfanneal.qstate import (
    apply_channel,
    apply_unitary,
    bitflip_channel,
    depolarizing_channel,
    projector,
    random_pauli_weight1_channel,
    success_probability,
)

DEFAULT_P0 = 2.0**-10
NOISE_KINDS = ("none", "depolarizing", "bitflip", "pauli_random")
INSTANCE_KINDS = ("single_qubit", "two_qubit", "n_qubit")
# Full density matrices are kept in traces only up to this dimension.
STORE_STATES_MAX_DIM = 16


@dataclass(frozen=True, eq=False)
class SearchInstance:
    kind: str
    n_qubits: int
    p0: float
    psi_i: np.ndarray
    psi_f: np.ndarray
    h_i: np.ndarray
    h_f: np.ndarray

    @property
    def dim(self) -> int:
        return self.psi_i.size

    def annealing_hamiltonian(self, t: float) -> np.ndarray:
        return (1.0 - t) * self.h_i + t * self.h_f


def build_search_instance(kind: str, p0: float = DEFAULT_P0, n_qubits: Optional[int] = None) -> SearchInstance:
    """Search problem with target ``|+...+>`` (basis index 0).

    ``single_qubit`` and ``two_qubit`` put weight ``p0`` on the target and
    spread the rest evenly over the other basis states.  ``n_qubit`` is the
    uniform superposition, which forces ``p0 = 2**-N``.
    """
    if kind == "single_qubit":
        n = 1
    elif kind == "two_qubit":
        n = 2
    elif kind == "n_qubit":
        if n_qubits is None or n_qubits < 1:
            raise ValueError("n_qubit instances need n_qubits >= 1")
        n = int(n_qubits)
        p0 = 2.0**-n
    else:
        raise ValueError(f"unknown instance kind {kind!r}; expected one of {INSTANCE_KINDS}")
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"P0 must lie in (0, 1), got {p0}")
    d = 2**n
    psi_i = np.full(d, np.sqrt((1.0 - p0) / (d - 1)), dtype=np.complex128)
    psi_i[0] = np.sqrt(p0)
    if kind == "n_qubit":
        psi_i[:] = 1.0 / np.sqrt(d)
    psi_f = np.zeros(d, dtype=np.complex128)
    psi_f[0] = 1.0
    eye = np.eye(d, dtype=np.complex128)
    return SearchInstance(kind, n, float(p0), psi_i, psi_f, eye - projector(psi_i), eye - projector(psi_f))


@dataclass(frozen=True, eq=False)
class AnnealSchedule:
    kind: str
    p0: float
    alpha: float
    values: np.ndarray

    @property
    def n_layers(self) -> int:
        return self.values.size

    def __getitem__(self, l):
        return float(self.values[l])


def grover_schedule(n_layers: int, p0: float) -> AnnealSchedule:
    """Grover-optimal local-adiabatic schedule ``t_l`` for ``l = 0 .. L_t-1``."""
    if n_layers < 2:
        raise ValueError(f"schedule needs at least 2 layers, got {n_layers}")
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"P0 must lie in (0, 1), got {p0}")
    alpha = np.arctan(np.sqrt((1.0 - p0) / p0))
    l = np.arange(n_layers)
    x = (1.0 - 2.0 * l / (n_layers - 1)) * alpha
    t = 0.5 * (1.0 - np.sqrt(p0 / (1.0 - p0)) * np.tan(x))
    return AnnealSchedule("grover_optimal", float(p0), float(alpha), t)


def linear_schedule(n_layers: int, p0: float = DEFAULT_P0) -> AnnealSchedule:
    if n_layers < 2:
        raise ValueError(f"schedule needs at least 2 layers, got {n_layers}")
    return AnnealSchedule("linear", float(p0), float("nan"), np.linspace(0.0, 1.0, n_layers))


def make_schedule(kind: str, n_layers: int, p0: float) -> AnnealSchedule:
    if kind == "grover_optimal":
        return grover_schedule(n_layers, p0)
    if kind == "linear":
        return linear_schedule(n_layers, p0)
    raise ValueError(f"unknown schedule kind {kind!r}")


@dataclass(frozen=True, eq=False)
class TeacherConfig:
    instance: SearchInstance
    n_layers: int = 50
    r: float = 0.0
    delta_l: int = 0
    epsilon: float = 0.0
    noise: str = "none"
    lambda_floor: float = DEFAULT_LAMBDA_FLOOR
    seed: int = 0

    def __post_init__(self):
        if self.n_layers < 2:
            raise ValueError(f"L_t must be >= 2, got {self.n_layers}")
        if self.delta_l < 0:
            raise ValueError(f"delta_l must be >= 0, got {self.delta_l}")
        if self.noise not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.noise!r}; expected one of {NOISE_KINDS}")
        if not 0.0 <= self.eps_layer <= 1.0:
            raise ValueError(f"per-layer noise eps/L_t = {self.eps_layer} outside [0, 1]")
        if not 0.0 < self.lambda_floor < 1.0:
            raise ValueError(f"lambda_floor must lie in (0, 1), got {self.lambda_floor}")

    @property
    def eps_layer(self) -> float:
        return self.epsilon / self.n_layers


@dataclass(eq=False)
class TeacherTrace:
    t: np.ndarray
    p_success: np.ndarray
    final_state: np.ndarray
    states: Optional[list] = None
    noise_specs: list = field(default_factory=list)

    @property
    def layers(self) -> np.ndarray:
        return np.arange(self.p_success.size)

    @property
    def final_p_success(self) -> float:
        return float(self.p_success[-1])


def noise_rng(master_seed: int, realization: int, layer: int) -> np.random.Generator:
    """Generator for one layer's noise draw, independent of the sweep point."""
    return np.random.default_rng([int(master_seed), int(realization), int(layer)])


def make_channel(noise: str, inst: SearchInstance, eps_layer: float, rng=None):
    """Build one layer's channel; ``None`` when there is no noise to apply."""
    if noise == "none" or eps_layer == 0.0:
        return None
    if noise == "depolarizing":
        return depolarizing_channel(inst.dim, eps_layer)
    if noise == "bitflip":
        return bitflip_channel(inst.n_qubits, eps_layer)
    if noise == "pauli_random":
        if rng is None:
            raise ValueError("pauli_random noise needs a generator")
        return random_pauli_weight1_channel(inst.n_qubits, eps_layer, rng)[0]
    raise ValueError(f"unknown noise kind {noise!r}")


def annealing_unitaries(sched: AnnealSchedule, inst: SearchInstance) -> list:
    """Plain annealing unitaries ``exp(-i H_l(0))`` for every schedule index."""
    return [unitary_exp(inst.annealing_hamiltonian(t)) for t in sched.values]


def _rollout_indices(l, delta_l, n_layers):
    if not 0 <= l < n_layers:
        raise ValueError(f"layer index {l} outside [0, {n_layers})")
    if delta_l < 0:
        raise ValueError(f"delta_l must be >= 0, got {delta_l}")
    # overrunning the schedule repeats the last layer instead of extrapolating t > 1
    return [min(k, n_layers - 1) for k in range(l, l + delta_l)]


def lookahead_rollout(rho, l, delta_l, sched, inst, unitaries=None) -> np.ndarray:
    """``rho`` after ``delta_l`` noise-free, reinforcement-free layers starting at ``l``."""
    for k in _rollout_indices(l, delta_l, sched.n_layers):
        u = unitaries[k] if unitaries is not None else unitary_exp(inst.annealing_hamiltonian(sched[k]))
        rho = apply_unitary(rho, u)
    return rho


def reinforced_hamiltonian(l, rho, cfg: TeacherConfig, sched, unitaries=None) -> np.ndarray:
    h = cfg.instance.annealing_hamiltonian(sched[l])
    if cfg.r == 0.0:
        return h
    ahead = lookahead_rollout(rho, l, cfg.delta_l, sched, cfg.instance, unitaries)
    return h + cfg.r * neg_log_density(ahead, cfg.lambda_floor)


def teacher_step(rho, l, cfg, sched, channel=None, unitaries=None) -> np.ndarray:
    """One noisy reinforced layer: unitary first, then the channel."""
    u = unitary_exp(reinforced_hamiltonian(l, rho, cfg, sched, unitaries))
    out = apply_unitary(rho, u)
    if channel is not None:
        out = apply_channel(out, channel)
    return out


def run_teacher(cfg: TeacherConfig, sched: AnnealSchedule, realization: int = 0, channels=None) -> TeacherTrace:
    """Evolve ``|psi_i><psi_i|`` through all ``L_t`` layers.

    Noise channels come from ``channels`` when given (one per layer, ``None``
    for noiseless layers); otherwise they are built from ``cfg``, with
    ``pauli_random`` weights drawn from :func:`noise_rng` per layer.
    """
    inst = cfg.instance
    if sched.n_layers != cfg.n_layers:
        raise ValueError(f"schedule has {sched.n_layers} layers, config expects {cfg.n_layers}")
    unitaries = annealing_unitaries(sched, inst) if cfg.r != 0.0 and cfg.delta_l > 0 else None
    rho = projector(inst.psi_i)
    keep = inst.dim <= STORE_STATES_MAX_DIM
    states = [rho] if keep else None
    p = np.empty(cfg.n_layers)
    specs = []
    for l in range(cfg.n_layers):
        if channels is not None:
            ch = channels[l]
        else:
            rng = noise_rng(cfg.seed, realization, l) if cfg.noise == "pauli_random" else None
            ch = make_channel(cfg.noise, inst, cfg.eps_layer, rng)
        if ch is not None and ch.noise_spec is not None:
            specs.append(ch.noise_spec)
        rho = teacher_step(rho, l, cfg, sched, ch, unitaries)
        p[l] = success_probability(rho, inst.psi_f)
        if keep:
            states.append(rho)
    return TeacherTrace(sched.values.copy(), p, rho, states, specs)


class RuntimeScale(NamedTuple):
    l_star: Optional[int]
    layers: np.ndarray
    scale: np.ndarray


def running_time_scale(p_success) -> RuntimeScale:
    """``l / P_success(l)`` for ``l >= 1`` and its first minimizer ``l*``.

    ``l = 0`` is excluded since its scale is trivially zero.  Layers with
    zero success probability get ``inf``; if every layer does, ``l*`` is None.
    """
    p = np.asarray(p_success.p_success if isinstance(p_success, TeacherTrace) else p_success, dtype=float)
    if p.size == 0:
        raise ValueError("empty success-probability trace")
    layers = np.arange(1, p.size)
    with np.errstate(divide="ignore"):
        scale = np.where(p[1:] > 0.0, layers / np.where(p[1:] > 0.0, p[1:], 1.0), np.inf)
    if scale.size == 0 or not np.isfinite(scale).any():
        return RuntimeScale(None, layers, scale)
    return RuntimeScale(int(layers[np.argmin(scale)]), layers, scale)


def two_level_leakage(rho, inst: SearchInstance) -> float:
    """Probability weight outside ``span{|psi_f>, |psi_f_perp>}``."""
    perp = inst.psi_i - np.vdot(inst.psi_f, inst.psi_i) * inst.psi_f
    perp = perp / np.linalg.norm(perp)
    inside = np.real(np.vdot(inst.psi_f, rho @ inst.psi_f) + np.vdot(perp, rho @ perp))
    return float(np.real(np.trace(rho)) - inside)
