import numpy as np
import pytest

from conftest import random_state
from reinfanneal.mathcore import unitary_exp
from reinfanneal.student import (
    LearnConfig,
    StudentParams,
    backward_sweep,
    basis_for_dim,
    central_difference,
    default_learn_config,
    evaluate_student_noisy,
    forward_sweep,
    gd_train,
    grad_closed_form_1q,
    grad_finite_difference,
    grad_pauli_basis_2q,
    init_params,
    layer_unitaries,
    local_error,
    single_qubit_basis,
    student_hamiltonian,
    teacher_target,
    two_qubit_basis,
    unitary_1q,
)
from reinfanneal.qstate import depolarizing_channel
from reinfanneal.teacher import TeacherConfig, build_search_instance, grover_schedule, run_teacher


def test_bases():
    b1, b2 = single_qubit_basis(), two_qubit_basis()
    assert (b1.size, b1.dim, b2.size, b2.dim) == (3, 2, 16, 4)
    gram = np.einsum("aij,bji->ab", b2.ops, b2.ops)
    assert np.allclose(gram, 4 * np.eye(16))
    assert basis_for_dim(4).kind == b2.kind


def test_unitary_1q_closed_form(rng):
    h = rng.uniform(-1, 1, size=(6, 3))
    b = single_qubit_basis()
    for row, u in zip(h, unitary_1q(h)):
        assert np.allclose(u, unitary_exp(student_hamiltonian(row, b)), atol=1e-12)
    assert np.allclose(unitary_1q(np.zeros((1, 3)))[0], np.eye(2))


def test_identity_term_is_global_phase():
    b = two_qubit_basis()
    theta = np.zeros(16)
    theta[0] = 0.3
    assert np.allclose(unitary_exp(student_hamiltonian(theta, b)), np.exp(-0.3j) * np.eye(4))


def test_params_bound_enforced():
    with pytest.raises(ValueError):
        StudentParams(np.full((2, 3), 1.5), 1.0)


def test_sweeps_roundtrip_and_norms(rng):
    b = single_qubit_basis()
    us = layer_unitaries(rng.uniform(-1, 1, (5, 3)), b)
    psi = random_state(rng, 2)
    fwd = forward_sweep(us, psi)
    bwd = backward_sweep(us, fwd[-1])
    assert np.allclose(bwd, fwd, atol=1e-10)
    assert np.allclose(np.linalg.norm(fwd, axis=1), 1, atol=1e-12)
    assert np.allclose(forward_sweep(layer_unitaries(np.zeros((4, 3)), b), psi), psi)


def test_local_error_identity_and_extremes(rng):
    h = np.diag([0.2, -0.4]).astype(complex)
    u = unitary_exp(h)
    phi = random_state(rng, 2)
    assert local_error(phi, u @ phi, h)[0] == pytest.approx(0.0, abs=1e-12)
    assert local_error(phi, -(u @ phi), h)[0] == pytest.approx(2.0)
    orth = np.array([-np.conj((u @ phi)[1]), np.conj((u @ phi)[0])])
    assert local_error(phi, orth, h)[0] == pytest.approx(1.0)
    other = random_state(rng, 2)
    e, _ = local_error(phi, other, h)
    diff = other - u @ phi
    assert e == pytest.approx(0.5 * np.vdot(diff, diff).real, abs=1e-12)


def test_closed_form_special_cases(rng):
    phi = np.array([1, 0], dtype=complex)
    # B real: only the Re(A) term survives
    h = np.array([0.1, 0.0, 0.3])
    grad = grad_closed_form_1q(h, phi, phi)
    hn = np.linalg.norm(h)
    assert np.allclose(grad, h / hn * 1.0 * np.sin(hn))
    a, b = random_state(rng, 2), random_state(rng, 2)
    tiny = grad_closed_form_1q(np.zeros(3), a, b)
    fd = grad_finite_difference(np.zeros(3), a, b, single_qubit_basis())
    assert np.allclose(tiny, fd, atol=1e-9)


def test_finite_difference_stencil():
    assert np.allclose(central_difference(lambda x: float(x[0] ** 2), np.array([0.7])), [1.4], atol=1e-8)


def test_fd_richardson(rng):
    b = single_qubit_basis()
    theta, a, c = rng.uniform(-1, 1, 3), random_state(rng, 2), random_state(rng, 2)
    exact = grad_closed_form_1q(theta, a, c)
    e1 = np.max(np.abs(grad_finite_difference(theta, a, c, b, 1e-3) - exact))
    e2 = np.max(np.abs(grad_finite_difference(theta, a, c, b, 5e-4) - exact))
    assert e2 < 0.35 * e1


def test_pauli_rule_zero_when_aligned(rng):
    psi = random_state(rng, 4)
    assert np.allclose(grad_pauli_basis_2q(np.zeros(16), psi, psi), 0, atol=1e-14)


def test_pauli_rule_dense_route(rng):
    b = two_qubit_basis()
    for _ in range(10):
        theta = rng.uniform(-1, 1, 16)
        fwd, bwd = random_state(rng, 4), random_state(rng, 4)
        u = unitary_exp(student_hamiltonian(theta, b))
        dense = np.array([4 * np.imag(np.vdot(bwd, p @ u @ fwd)) for p in b.ops])
        assert np.allclose(grad_pauli_basis_2q(theta, fwd, bwd, b), dense, atol=1e-10)
        assert np.allclose(grad_pauli_basis_2q(theta, fwd, bwd, b, normalize=True), dense / 4, atol=1e-10)


def _target(r, delta_l, lt):
    inst = build_search_instance("single_qubit")
    return inst, teacher_target(TeacherConfig(inst, lt, r=r, delta_l=delta_l), grover_schedule(lt, inst.p0))


def test_teacher_target_matches_density_teacher():
    for r, dl in ((0.0, 0), (0.6, 0), (-0.4, 2)):
        inst, psi = _target(r, dl, 20)
        trace = run_teacher(TeacherConfig(inst, 20, r=r, delta_l=dl), grover_schedule(20, inst.p0))
        assert abs(psi[0]) ** 2 == pytest.approx(trace.final_p_success, abs=1e-10)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(_target(0.0, 0, 10)[1], _target(0.0, 3, 10)[1])


def test_teacher_target_rejects_noise():
    inst = build_search_instance("single_qubit")
    with pytest.raises(ValueError):
        teacher_target(TeacherConfig(inst, 10, epsilon=0.1, noise="depolarizing"), grover_schedule(10, inst.p0))


def test_training_converges_and_clips():
    inst, psi = _target(0.5, 1, 20)
    b = single_qubit_basis()
    res = gd_train(inst.psi_i, psi, b, default_learn_config(2, seed=3), 5)
    assert res.final_error < 1e-6
    assert np.max(np.abs(res.params.theta)) <= 1.0
    assert res.errors.shape == (101,)


def test_zero_rate_keeps_params():
    inst, psi = _target(0.2, 0, 10)
    b = single_qubit_basis()
    cfg = default_learn_config(2, eta=0.0, iterations=5, seed=1)
    init = init_params(5, b, cfg)
    res = gd_train(inst.psi_i, psi, b, cfg, 5, init)
    assert np.array_equal(res.params.theta, init.theta)
    assert np.all(res.errors == res.errors[0])


def test_training_deterministic():
    inst, psi = _target(-0.3, 1, 10)
    b = single_qubit_basis()
    cfg = default_learn_config(2, seed=11, iterations=20)
    r1 = gd_train(inst.psi_i, psi, b, cfg, 5)
    r2 = gd_train(inst.psi_i, psi, b, cfg, 5)
    assert np.array_equal(r1.params.theta, r2.params.theta) and np.array_equal(r1.errors, r2.errors)


def test_synchronous_small_step_descends():
    inst, psi = _target(0.4, 0, 20)
    b = single_qubit_basis()
    decreasing = 0
    starts = 100
    for seed in range(starts):
        cfg = LearnConfig(eta=0.01, iterations=1, update_order="synchronous", seed=seed)
        res = gd_train(inst.psi_i, psi, b, cfg, 5)
        decreasing += res.errors[1] <= res.errors[0] or res.errors[0] < 1e-10
    assert decreasing >= 99


def test_two_qubit_training_reference_rate():
    inst = build_search_instance("two_qubit")
    sched = grover_schedule(10, inst.p0)
    psi = teacher_target(TeacherConfig(inst, 10, r=0.5), sched)
    res = gd_train(inst.psi_i, psi, two_qubit_basis(), default_learn_config(4, seed=0), 5)
    assert res.final_error < 1e-12


def test_student_noisy_evaluation_consistency(rng):
    inst = build_search_instance("single_qubit")
    b = single_qubit_basis()
    params = StudentParams(rng.uniform(-1, 1, (5, 3)))
    p, final = evaluate_student_noisy(params, b, inst)
    out = forward_sweep(layer_unitaries(params, b), inst.psi_i)[-1]
    assert final == pytest.approx(abs(out[0]) ** 2, abs=1e-10)
    channels = [None] * 4 + [depolarizing_channel(2, 1.0)]
    assert evaluate_student_noisy(params, b, inst, channels=channels)[1] == pytest.approx(0.5)
