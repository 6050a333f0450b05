import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SX, kron_op, lab_hamiltonian_oracle, random_state
from drivenxy.errors import NumericError, ResourceError
from drivenxy.hilbert import DensityMatrix, PureState, basis_state, vacuum
from drivenxy.model import (DriveProtocol, NetworkSpec, hamiltonian_action, interaction_phases,
                            rotate_frame)
from drivenxy.propagate import (NoiseSpec, StepControl, evolve_lindblad, evolve_pure,
                                expm_oracle, lindblad_memory, sample_times)


def _static_instance(rng, n=3):
    gamma = rng.uniform(-2, 2)
    eps = rng.uniform(0.5, 1.5, n)
    spec = NetworkSpec.chain(n, gamma, eps)
    p = DriveProtocol(h0=1.0, J0=rng.uniform(-1, 1))
    return spec, p


@given(seed=st.integers(0, 2 ** 32 - 1))
@settings(max_examples=10)
def test_static_evolution_matches_eigendecomposition(seed):
    rng = np.random.default_rng(seed)
    spec, p = _static_instance(rng)
    model = hamiltonian_action(spec, p)
    psi0 = PureState(3, random_state(rng, 3))
    traj = evolve_pure(psi0, model, (0.0, 10.0), StepControl(100), samples=11)
    expect = expm_oracle(model.matrix(0.0), psi0, 10.0)
    assert traj.state(-1).fidelity(expect) >= 1 - 1e-8


def test_larmor_precession():
    h = 1.7
    spec = NetworkSpec(1, ())
    model = hamiltonian_action(spec, DriveProtocol(h0=h))
    plus = PureState(1, np.array([1, 1]) / np.sqrt(2))
    traj = evolve_pure(plus, model, (0.0, 6.0), samples=61)
    sx = np.array([np.real(np.vdot(s, SX @ s)) for s in traj.states])
    assert np.allclose(sx, np.cos(h * traj.times), atol=1e-7)


def test_driven_frames_agree(rng):
    spec = NetworkSpec.chain(3, gamma=0.7, epsilon=(1.0, 1.2, 0.8))
    p = DriveProtocol(h0=1, h1=0.3, J0=0.2, J1=0.15, omega_d=1.4, t_on=0.5)
    psi0 = PureState(3, random_state(rng, 3))
    sc = StepControl(200)
    lab = evolve_pure(psi0, hamiltonian_action(spec, p, "lab"), (0, 8), sc, samples=5)
    rot = evolve_pure(psi0, hamiltonian_action(spec, p, "interaction"), (0, 8), sc, samples=5)
    assert rot.frame == "interaction"
    for i, t in enumerate(lab.times):
        back = rotate_frame(rot.state(i), interaction_phases(p, spec, t), "to_lab")
        assert lab.state(i).fidelity(back) > 1 - 1e-9


def test_driven_evolution_against_fine_piecewise_exponential():
    spec = NetworkSpec.chain(2, gamma=1.0)
    p = DriveProtocol(h0=1, J1=0.4, omega_d=2.0)
    model = hamiltonian_action(spec, p)
    psi = vacuum(2).amplitudes.copy()
    steps = 20000
    dt = 5.0 / steps
    for i in range(steps):
        w, v = np.linalg.eigh(model.matrix((i + 0.5) * dt))
        psi = v @ (np.exp(-1j * w * dt) * (v.conj().T @ psi))
    traj = evolve_pure(vacuum(2), model, (0, 5), StepControl(100), samples=2)
    assert traj.state(-1).fidelity(psi) > 1 - 1e-7


def test_step_bound_and_bookkeeping():
    spec = NetworkSpec.chain(3, gamma=1.0)
    model = hamiltonian_action(spec, DriveProtocol(h0=1, J1=0.1, omega_d=2.0))
    traj = evolve_pure(vacuum(3), model, (0, 20), StepControl(60), samples=21)
    assert traj.dt <= 2 * math.pi / (60 * model.omega_max) + 1e-15
    assert traj.n_steps >= 20 / traj.dt - 1
    assert 0 < traj.max_step_drift <= traj.norm_drift <= traj.n_steps * traj.max_step_drift
    assert np.allclose(np.linalg.norm(traj.states, axis=1), 1, atol=1e-12)


def test_switch_on_is_a_step_boundary():
    spec = NetworkSpec.chain(2, gamma=0.5)
    p = DriveProtocol(h0=1, J0=0.3, t_on=0.37)
    model = hamiltonian_action(spec, p)
    traj = evolve_pure(basis_state("10"), model, (0, 3), samples=2)
    # couplings act only after t_on, so the exact answer is a delayed static evolution
    start = expm_oracle(model.matrix(0.0), basis_state("10"), 0.37)
    expect = expm_oracle(model.matrix(1.0), start, 3 - 0.37)
    assert traj.state(-1).fidelity(expect) > 1 - 1e-10


def test_runs_are_bitwise_reproducible():
    spec = NetworkSpec.chain(3, gamma=2.0)
    model = hamiltonian_action(spec, DriveProtocol(h0=1, J1=0.1, omega_d=2.0))
    a = evolve_pure(vacuum(3), model, (0, 15), samples=30)
    b = evolve_pure(vacuum(3), model, (0, 15), samples=30)
    assert np.array_equal(a.states, b.states)


def test_pure_argument_errors():
    model = hamiltonian_action(NetworkSpec.chain(2), DriveProtocol(h0=1))
    with pytest.raises(ValueError, match="normalized"):
        evolve_pure(PureState(2, np.ones(4)), model, (0, 1))
    with pytest.raises(ValueError):
        sample_times((1, 0), 10)
    with pytest.raises(ValueError):
        StepControl(10)
    with pytest.raises(NumericError):
        StepControl().max_step(math.inf)
    traj = evolve_pure(vacuum(2), model, (0, 1), samples=3, store=False,
                       observer=lambda t, psi: t)
    assert traj.observations == list(traj.times)
    with pytest.raises(ValueError):
        traj.state(0)


def test_expm_oracle_guards():
    with pytest.raises(ValueError, match="Hermitian"):
        expm_oracle(np.array([[0, 1], [0, 0]]), np.array([1, 0]), 1.0)
    with pytest.raises(ResourceError):
        expm_oracle(np.eye(2 ** 7), np.zeros(2 ** 7), 1.0)


def test_dephasing_decays_single_spin_coherence():
    lam, h = 0.3, 1.1
    model = hamiltonian_action(NetworkSpec(1, ()), DriveProtocol(h0=h))
    plus = PureState(1, np.array([1, 1]) / np.sqrt(2)).density_matrix()
    traj = evolve_lindblad(plus, model, NoiseSpec(lam), (0, 5), samples=26)
    coh = traj.states[:, 0, 1]
    assert np.allclose(np.abs(coh), 0.5 * np.exp(-lam * traj.times), atol=1e-8)
    assert np.allclose(coh, 0.5 * np.exp(-lam * traj.times - 1j * h * traj.times), atol=1e-8)
    assert np.allclose(traj.states[:, 0, 0], 0.5)


def test_lindblad_without_noise_matches_pure_projector(rng):
    spec = NetworkSpec.chain(3, gamma=1.5)
    p = DriveProtocol(h0=1, J1=0.2, omega_d=2.0)
    model = hamiltonian_action(spec, p)
    psi0 = PureState(3, random_state(rng, 3))
    sc = StepControl(200)
    pure = evolve_pure(psi0, model, (0, 10), sc, samples=11)
    mixed = evolve_lindblad(psi0.density_matrix(), model, NoiseSpec(0.0), (0, 10), sc, samples=11)
    for i in range(11):
        proj = np.outer(pure.states[i], pure.states[i].conj())
        assert np.max(np.abs(mixed.states[i] - proj)) < 1e-8


def test_lindblad_keeps_a_valid_state(rng):
    spec = NetworkSpec.chain(3, gamma=2.0)
    model = hamiltonian_action(spec, DriveProtocol(h0=1, h1=0.2, J0=0.3, omega_d=1.0))
    traj = evolve_lindblad(basis_state("100").density_matrix(), model, NoiseSpec(0.05),
                           (0, 10), samples=11)
    for i in range(len(traj)):
        DensityMatrix(3, traj.states[i]).check(atol=1e-9)
    assert traj.norm_drift < 1e-9


def test_lindblad_memory_cap():
    model = hamiltonian_action(NetworkSpec.chain(3), DriveProtocol(h0=1))
    with pytest.raises(ResourceError, match="MiB") as err:
        evolve_lindblad(vacuum(3).density_matrix(), model, NoiseSpec(0.1), (0, 1), cap=2)
    assert err.value.required_bytes == lindblad_memory(3, 400)
    with pytest.raises(ValueError):
        NoiseSpec(-1.0)


def test_lindblad_accuracy_guard():
    model = hamiltonian_action(NetworkSpec.chain(2, gamma=1.0), DriveProtocol(h0=1, J0=0.5))
    with pytest.raises(NumericError, match="increase nu"):
        evolve_lindblad(vacuum(2).density_matrix(), model, NoiseSpec(0.01), (0, 5), samples=3,
                        tol=0.0)


def test_static_kron_instance_matches_oracle(rng):
    n = 3
    edges = ((0, 1), (1, 2))
    H = lab_hamiltonian_oracle(n, edges, 0.5, [1.0, 1.0, 1.0], [0.3, 0.3])
    model = hamiltonian_action(NetworkSpec.chain(n, 0.5), DriveProtocol(h0=1, J0=0.3))
    assert np.allclose(model.matrix(0.0), H)
    assert np.allclose(kron_op({}, n), np.eye(8))


def test_convergence_order_is_four(rng):
    spec, p = _static_instance(rng)
    model = hamiltonian_action(spec, p)
    psi0 = PureState(3, random_state(rng, 3))
    exact = expm_oracle(model.matrix(0.0), psi0, 10.0).amplitudes
    errs = []
    for nu in (50, 100, 200):
        traj = evolve_pure(psi0, model, (0.0, 10.0), StepControl(nu), samples=2)
        errs.append(np.linalg.norm(traj.states[-1] - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 4) <= 0.5), orders


def test_pure_dephasing_never_raises_purity(rng):
    model = hamiltonian_action(NetworkSpec(2, ()), DriveProtocol(h0=0.0))
    rho0 = PureState(2, random_state(rng, 2)).density_matrix()
    traj = evolve_lindblad(rho0, model, NoiseSpec(0.4), (0, 6), samples=61)
    purity = np.einsum("tij,tji->t", traj.states, traj.states).real
    assert np.all(np.diff(purity) <= 1e-10)
    assert purity[-1] < purity[0]


def test_lindblad_snapshots_stay_positive(rng):
    spec = NetworkSpec.chain(4, gamma=5.0)
    model = hamiltonian_action(spec, DriveProtocol(h0=1, J1=0.1, omega_d=2.0), "interaction")
    traj = evolve_lindblad(vacuum(4).density_matrix(), model, NoiseSpec(0.01), (0, 40),
                           samples=21)
    assert min(np.linalg.eigvalsh(r).min() for r in traj.states) >= -1e-6
