import numpy as np
import pytest

from densimat import em
from densimat.dirac import dirac_basis
from densimat.errors import ContractViolation, NumericalDivergence
from densimat.grids import Grid3D, UniformGrid1D

E_CHARGE = 0.7


@pytest.fixture(scope="module")
def base():
    return UniformGrid1D.centered(48, 16.0)


def spinor(base, k=0.5):
    z = base.points
    psi = np.zeros((base.n, 4), complex)
    psi[:, 0] = np.exp(-0.5 * z**2 + 1j * k * z)
    psi[:, 2] = 0.3 * np.exp(-0.5 * (z - 0.5) ** 2)
    return psi / np.sqrt(np.sum(np.abs(psi) ** 2) * base.dx)


def potential(base):
    z = base.points
    A = np.zeros((4, base.n))
    A[0] = 0.5 * np.exp(-z**2 / 4)
    A[1] = 0.2 * np.exp(-(z + 1) ** 2 / 2)
    A[3] = 0.3 * np.exp(-(z - 1) ** 2 / 3)
    return A


def test_H1_vanishes_for_trivial_potentials(base):
    phi = em.reduced_lift(spinor(base), base)
    assert not em.apply_H1(phi, np.zeros((4, base.n))).any()
    A = np.zeros((4, base.n))
    A[0] = 1.3
    assert not em.apply_H1(phi, A).any()
    with pytest.raises(ContractViolation):
        em.apply_H1(phi, np.zeros((4, base.n + 2)))


def test_H1_of_lift_matches_spinor_formula(base):
    psi = spinor(base)
    A = potential(base)
    phi = em.reduced_lift(psi, base)
    px, py = em.values_at_xy(psi, base)
    ax, ay = em.values_at_xy(A.T, base)
    alpha = dirac_basis().alpha

    def h1(a, p):  # (A.alpha - A0) psi pointwise
        v = np.einsum("...k,kij->...ij", a[..., 1:].real, alpha) - a[..., 0].real[..., None, None] * np.eye(4)
        return np.einsum("...ij,...j->...i", v, p)

    outer = lambda u, w: np.einsum("...i,...j->...ij", u, w.conj())
    ref = outer(h1(ax, px), py) - outer(px, h1(ay, py))
    assert np.max(np.abs(em.apply_H1(phi, A) - ref)) < 1e-12


def test_free_reduced_rest_field_does_not_move(base):
    phi = em.reduced_rest_solution("A", 1.0, 1.0, base)
    out = em.evolve_interacting(phi, np.zeros((4, base.n)), 0.0, 0.1, 20)
    assert np.max(np.abs(out.diagonal() - phi.diagonal())) < 1e-6


def test_coupling_off_ignores_potential(base):
    phi = em.reduced_lift(spinor(base), base)
    a = em.evolve_interacting(phi, potential(base), 0.0, 0.1, 5)
    b = em.evolve_interacting(phi, np.zeros((4, base.n)), E_CHARGE, 0.1, 5)
    assert np.array_equal(a.samples, b.samples)


def test_interacting_evolution_lifts_spinor_oracle(base):
    psi = spinor(base)
    A = np.zeros((4, base.n))
    A[0] = potential(base)[0]
    out = em.evolve_interacting(em.reduced_lift(psi, base), A, 1.0, 0.05, 20)
    ref = em.reduced_lift(em.spinor_evolve(psi, base, A, 1.0, 1.0, 0.05, 20), base)
    assert np.max(np.abs(out.samples - ref.samples)) < 1e-6


def test_interacting_time_step_bound(base):
    phi = em.reduced_lift(spinor(base), base)
    with pytest.raises(ContractViolation):
        em.evolve_interacting(phi, potential(base), 1.0, 1.1 * base.dx, 1)
    with pytest.raises(ContractViolation):
        em.evolve_interacting(phi, potential(base), 1.0, 0.0, 1)


def test_interacting_residuals_are_small(base):
    phi = em.reduced_lift(spinor(base), base)
    rx, ry = em.interacting_residuals(phi, potential(base), E_CHARGE)
    assert rx < 1e-8 and ry < 1e-8


def test_rest_current(base):
    phi = em.reduced_rest_solution("A", 1.0, 1.0, base)
    J = em.current_density(phi, 1.0)
    assert abs(em.total_charge(phi) - 1.0) < 1e-6
    assert np.max(np.abs(J[1:])) < 1e-10
    assert not em.current_density(phi, 0.0).any()


def test_charge_conjugation_flips_current(base):
    phi = em.reduced_lift(spinor(base), base)
    J = em.current_density(phi, 1.0)
    Jc = em.current_density(em.charge_conjugate_reduced(phi), 1.0)
    assert np.max(np.abs(J + Jc)) < 1e-14


def test_gauge_transform_of_potential(base):
    A = em.FourPotential.static(base, potential(base), 0.1)
    same = em.gauge_transform_A(A, em.GaugeFunction(base, np.full(base.n, 2.0)), E_CHARGE)
    assert np.array_equal(same.cur, A.cur) and np.array_equal(same.prev, A.prev)
    zero = em.FourPotential.zeros(base, 0.1)
    c = 0.4
    lin = em.gauge_transform_A(zero, em.GaugeFunction(base, np.zeros(base.n), slope=(0, 0, c)), E_CHARGE)
    assert np.allclose(lin.cur[3], -c / E_CHARGE, rtol=0, atol=1e-15)
    assert not em.field_strength(lin).any()
    rng = np.random.default_rng(0)
    z = base.points
    th = lambda p: sum(rng.normal() * np.sin(j * 2 * np.pi * z / base.L + p) for j in (1, 2, 3))
    theta = em.GaugeFunction(base, th(0.3), th(1.1))
    moved = em.gauge_transform_A(A, theta, E_CHARGE)
    assert np.max(np.abs(em.field_strength(moved) - em.field_strength(A))) < 1e-10
    with pytest.raises(ContractViolation):
        em.gauge_transform_A(A, theta, 0.0)


def test_gauge_transform_in_three_dimensions():
    g = Grid3D.cube(16, 8.0)
    x = g.mesh()
    A = em.FourPotential.static(g, np.stack([np.exp(-np.sum(x**2, -1))] * 4), 0.1)
    th = np.sin(2 * np.pi * x[..., 0] / 8) * np.cos(2 * np.pi * x[..., 2] / 8)
    moved = em.gauge_transform_A(A, em.GaugeFunction(g, th, 0.5 * th), 1.0)
    assert np.max(np.abs(em.field_strength(moved) - em.field_strength(A))) < 1e-10


def test_maxwell_plane_wave():
    g = UniformGrid1D.centered(256, 20.0)
    dt = 0.5 * g.dx
    k = g.dk
    z = g.points
    A = em.FourPotential(g, np.stack([np.cos(k * z)] * 4), np.stack([np.cos(k * (z + dt))] * 4), dt)
    steps = int(round(5.0 / dt))
    J = np.zeros_like(A.cur)
    for _ in range(steps):
        A = em.maxwell_step(A, J)
    assert np.max(np.abs(A.cur - np.cos(k * (z - steps * dt)))) < 1e-4


def test_maxwell_cfl_and_shapes():
    g = UniformGrid1D.centered(32, 8.0)
    with pytest.raises(ContractViolation):
        em.maxwell_step(em.FourPotential.zeros(g, 1.01 * g.dx), np.zeros((4, 32)))
    g3 = Grid3D.cube(8, 8.0)
    with pytest.raises(ContractViolation):
        em.maxwell_step(em.FourPotential.zeros(g3, 0.6), np.zeros((4, 8, 8, 8)))
    with pytest.raises(ContractViolation):
        em.maxwell_step(em.FourPotential.zeros(g, 0.1), np.zeros((4, 16)))
    with pytest.raises(ContractViolation):
        em.FourPotential(g, np.zeros((3, 32)), np.zeros((3, 32)), 0.1)


def test_maxwell_detects_blow_up():
    g = UniformGrid1D.centered(32, 8.0)
    A = em.FourPotential.zeros(g, 0.1)
    with pytest.raises(NumericalDivergence):
        em.maxwell_step(A, np.full((4, 32), 1e12))


def test_lorenz_residual_with_conserved_source():
    g = UniformGrid1D.centered(128, 16.0)
    dt = 0.5 * g.dx
    z = g.points
    A = em.FourPotential.zeros(g, dt)
    # charge starts at zero and follows discrete continuity with the spectral divergence
    J3 = lambda t: 0.3 * np.sin(t) * np.exp(-(z - 0.2 * t) ** 2)
    j0_prev = j0 = np.zeros(g.n)
    worst = 0.0
    for n in range(200):
        t = n * dt
        J = np.zeros((4, g.n))
        J[0], J[3] = j0, J3(t)
        A = em.maxwell_step(A, J)
        worst = max(worst, A.lorenz)
        j0_prev, j0 = j0, j0_prev - 2 * dt * em.divergence(np.stack([0 * z, 0 * z, J3(t)]), g)
    assert worst < 1e-6


def test_poisson_solve_inverts_stencil():
    g = Grid3D.cube(16, 8.0)
    rho = np.exp(-np.sum(g.mesh() ** 2, -1))
    rho -= rho.mean()
    u = em.poisson_solve(rho, g)
    lap = np.fft.ifftn(em.discrete_laplacian_symbol(g) * np.fft.fftn(u)).real
    assert np.max(np.abs(-lap - rho)) < 1e-12


def test_coupled_step_without_charge_decouples(base):
    phi = em.reduced_lift(spinor(base), base)
    A0 = em.FourPotential(base, potential(base), potential(base) * np.cos(0.1), 0.1)
    state = em.CoupledState(phi, A0, 0.0)
    A, p = A0, phi
    for _ in range(5):
        state = em.coupled_step(state)
        A = em.maxwell_step(A, np.zeros((4, base.n)))
        p = em.evolve_interacting(p, np.zeros((4, base.n)), 0.0, 0.1, 1)
    assert np.array_equal(state.A.cur, A.cur) and np.array_equal(state.phi.samples, p.samples)


def test_coupled_charge_drift(base):
    state = em.CoupledState(em.reduced_lift(spinor(base), base), em.FourPotential.zeros(base, 0.05), 0.01)
    q0 = em.total_charge(state.phi)
    currents = []
    for _ in range(20):
        state = em.coupled_step(state)
        currents.append(em.current_density(state.phi, 1.0))
    assert abs(em.total_charge(state.phi) - q0) < 1e-4
    assert em.continuity_defect(currents, 0.05, state.phi.grids[0]) < 1e-3


def test_coupled_divergence_is_reported(base):
    state = em.CoupledState(em.reduced_lift(spinor(base), base), em.FourPotential.zeros(base, 0.05), 1e9)
    with pytest.raises(NumericalDivergence):
        for _ in range(4):
            state = em.coupled_step(state)


def test_reduced_field_conjugation_and_gauge_phase(base):
    psi = spinor(base)
    phi = em.reduced_lift(psi, base)
    assert phi.swap_defect() < 1e-13
    twice = em.charge_conjugate_reduced(em.charge_conjugate_reduced(phi))
    assert np.max(np.abs(twice.samples - phi.samples)) < 1e-14
    theta = np.sin(2 * np.pi * base.points / base.L)
    gauged = em.gauge_phase_reduced(phi, theta)
    assert np.max(np.abs(gauged.diagonal() - phi.diagonal())) < 1e-14
