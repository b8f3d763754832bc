import numpy as np
import pytest

from densimat.errors import ContractViolation
from densimat.grids import ComplexScalarField2D, UniformGrid1D, dft2, lift_grids
from densimat.schrodinger import (DensityField, PotentialSpec, WaveFunction1D, apply_P_gen,
                                  apply_Q_gen, eigensolve_1d, evolve_dm, evolve_pure,
                                  from_real_rep, hermiticity_defect, lift_pure,
                                  localized_solution, observable_E, observable_E_momentum,
                                  observable_P, observable_P_momentum, observable_Q, observables,
                                  phase_rate, stationary_pair, to_real_rep, translate)

HARMONIC = PotentialSpec.harmonic(1.0)


def packet(g, x0=0.3, k=0.7, s=1.0, seed=None):
    x = g.points
    a = np.exp(-0.5 * ((x - x0) / s) ** 2 + 1j * k * x)
    if seed is not None:
        rng = np.random.default_rng(seed)
        for _ in range(3):
            c, m, w = rng.normal(size=3)
            a = a + (c + 1j * m) * np.exp(-0.5 * (x - w) ** 2 / 0.8)
    return WaveFunction1D(g, a).normalized()


def pure_observables(psi):
    g, a = psi.grid, psi.samples
    k = g.wavenumbers
    da = np.fft.ifft(1j * k * np.fft.fft(a))
    d2a = np.fft.ifft(-(k**2) * np.fft.fft(a))
    q = np.sum(g.points * np.abs(a) ** 2) * g.dx
    p = np.sum(a.conj() * -1j * da).real * g.dx
    e = np.sum(a.conj() * -0.5 * d2a).real * g.dx
    return q, p, e


@pytest.fixture(scope="module")
def grid():
    return UniformGrid1D.centered(64, 16.0)


def test_lift_diagonal_is_density(grid):
    psi = packet(grid)
    phi = lift_pure(psi)
    line = phi.samples[::2, grid.n]
    assert np.max(np.abs(line - np.abs(psi.samples) ** 2)) < 1e-15
    assert hermiticity_defect(phi) < 1e-13


def test_lift_momentum_matches_direct_quadrature(grid):
    psi = packet(grid, seed=3)
    q, p, e = pure_observables(psi)
    obs = observables(lift_pure(psi))
    assert abs(obs.Q - q) < 1e-9 and abs(obs.P - p) < 1e-9 and abs(obs.E - e) < 1e-9


def test_real_even_state_has_no_momentum(grid):
    psi = WaveFunction1D(grid, np.exp(-grid.points**2)).normalized()
    assert abs(observable_P(lift_pure(psi))) < 1e-12


def test_real_representation_round_trip(grid):
    phi = lift_pure(packet(grid, seed=1))
    back = from_real_rep(to_real_rep(phi), phi)
    assert np.max(np.abs(back.samples - phi.samples)) < 1e-12


def test_real_symmetric_field_is_its_own_real_rep(grid):
    gs, gd = lift_grids(grid)
    xs, xd = np.meshgrid(gs.points, gd.points, indexing="ij")
    phi = DensityField(ComplexScalarField2D(gs, gd, np.exp(-xs**2 - 0.1 * xd**2) + 0j, "SD"))
    r = to_real_rep(phi)
    assert np.array_equal(r, phi.samples.real)
    assert np.array_equal(from_real_rep(r, phi).samples, phi.samples)


def test_imaginary_antisymmetric_field_recovered_as_imaginary_part(grid):
    gs, gd = lift_grids(grid)
    xs, xd = np.meshgrid(gs.points, gd.points, indexing="ij")
    a = 1j * np.sin(0.5 * xd) * np.exp(-xs**2 - 0.05 * xd**2)
    a[:, 0] = 0.0  # the -L column has no partner on the grid
    phi = DensityField(ComplexScalarField2D(gs, gd, a, "SD"))
    r = to_real_rep(phi)
    assert np.max(np.abs(r + r[:, (2 * grid.n - np.arange(2 * grid.n)) % (2 * grid.n)])) < 1e-15
    assert np.max(np.abs(from_real_rep(r, phi).samples - a)) < 1e-15


def test_real_rep_rejects_non_hermitian(grid):
    gs, gd = lift_grids(grid)
    a = np.random.default_rng(0).normal(size=(gs.n, gd.n)) + 0j
    with pytest.raises(ContractViolation):
        to_real_rep(DensityField(ComplexScalarField2D(gs, gd, a, "SD")))


@pytest.mark.parametrize("V", [PotentialSpec.zero(), HARMONIC])
def test_evolution_commutes_with_lift(grid, V):
    psi = packet(grid, seed=7)
    a = evolve_dm(lift_pure(psi), V, 0.01, 100)
    b = lift_pure(evolve_pure(psi, V, 0.01, 100))
    assert np.max(np.abs(a.samples - b.samples)) < 1e-8


def test_localized_solution_travels_without_spreading():
    gs, gd = lift_grids(UniformGrid1D.centered(160, 4 * np.pi))
    phi0 = localized_solution(gs, gd, 0.0, 2.0, 0.1)
    phi = evolve_dm(phi0, PotentialSpec.zero(), 1e-3, 500)
    ref = localized_solution(gs, gd, 0.0, 2.0, 0.1, t=0.5)
    assert np.max(np.abs(phi.samples - ref.samples)) < 1e-8


def test_hermiticity_kept_under_harmonic_evolution(grid):
    phi = lift_pure(packet(grid, seed=2))
    rng = np.random.default_rng(5)
    mix = phi.samples + 0.3 * lift_pure(packet(grid, x0=rng.normal(), k=-0.4)).samples
    phi = evolve_dm(phi.with_samples(mix), HARMONIC, 0.01, 1000)
    assert hermiticity_defect(phi) < 1e-10


def test_free_conservation(grid):
    phi = lift_pure(packet(grid, seed=4))
    o0 = observables(phi)
    o1 = observables(evolve_dm(phi, PotentialSpec.zero(), 1e-3, 1000))
    assert abs(o1.P - o0.P) < 1e-10 and abs(o1.E - o0.E) < 1e-10


def test_pure_plane_wave_phase(grid):
    k = 5 * grid.dk
    psi = WaveFunction1D(grid, np.exp(1j * k * grid.points))
    out = evolve_pure(psi, PotentialSpec.zero(), 0.1, 10)
    assert np.max(np.abs(out.samples - psi.samples * np.exp(-0.5j * k**2))) < 1e-13


def test_pure_evolution_keeps_ground_state_and_norm(grid):
    gs = eigensolve_1d(grid, HARMONIC, 1, stencil="spectral").states[0]
    out = evolve_pure(gs, HARMONIC, 1e-3, 1000, order=4)
    assert np.max(np.abs(np.abs(out.samples) - np.abs(gs.samples))) < 1e-8
    psi = packet(grid, seed=9)
    assert abs(evolve_pure(psi, HARMONIC, 0.01, 1000).norm() - psi.norm()) < 1e-12


def test_generators_commute(grid):
    rng = np.random.default_rng(11)
    gs, gd = lift_grids(grid)
    xs, xd = np.meshgrid(gs.points, gd.points, indexing="ij")
    a = sum((rng.normal() + 1j * rng.normal()) * np.exp(-0.5 * (xs - rng.normal()) ** 2
            - 0.3 * (xd - rng.normal()) ** 2) for _ in range(4))
    phi = DensityField(ComplexScalarField2D(gs, gd, a, "SD"))
    qp = apply_Q_gen(apply_P_gen(phi)).samples
    pq = apply_P_gen(apply_Q_gen(phi)).samples
    assert np.max(np.abs(qp - pq)) < 1e-12
    assert np.max(np.abs(apply_Q_gen(phi).samples[:, gd.zero_index()])) == 0.0


def test_momentum_generates_translations(grid):
    phi = lift_pure(packet(grid))
    moved = translate(phi, 0.37)
    x = grid.points + 0.37
    ref = lift_pure(WaveFunction1D(grid, np.exp(-0.5 * (x - 0.3) ** 2 + 0.7j * x)).normalized())
    assert np.max(np.abs(moved.samples - ref.samples)) < 1e-10


def test_localized_observables():
    gs, gd = lift_grids(UniformGrid1D.centered(160, 4 * np.pi))
    phi = localized_solution(gs, gd, 1.0, 2.0, 0.1)
    assert abs(observable_Q(phi).real - 1.0) < 1e-8
    assert abs(observable_P(phi).real - 2.0) < 1e-8
    assert abs(observable_E(phi).real - 2.0) < 1e-6
    Phi = dft2(phi.field)
    assert abs(observable_P_momentum(Phi).real - 2.0) < 1e-6
    later = localized_solution(gs, gd, 1.0, 2.0, 0.1, t=0.7)
    assert observable_Q(later).real - observable_Q(phi).real == pytest.approx(1.4, abs=1e-12)
    rest = localized_solution(gs, gd, 1.0, 0.0, 0.1)
    assert np.max(np.abs(rest.samples.imag)) == 0.0
    assert abs(observable_P(rest)) < 1e-12 and abs(observable_E(rest)) < 1e-12


def test_momentum_space_observables_agree(grid):
    phi = lift_pure(packet(grid, seed=6))
    Phi = dft2(phi.field)
    assert abs(observable_P_momentum(Phi) - observable_P(phi)) < 1e-8
    assert abs(observable_E_momentum(Phi) - observable_E(phi)) < 1e-8
    even = lift_pure(WaveFunction1D(grid, np.exp(-grid.points**2)))
    assert abs(observable_P_momentum(dft2(even.field))) < 1e-10
    with pytest.raises(ContractViolation):
        observable_E_momentum(Phi, V=HARMONIC)


def test_eigensolve_harmonic_and_free():
    g = UniformGrid1D.centered(512, 20.0)
    spec = eigensolve_1d(g, HARMONIC, 3)
    assert abs(spec.energies[0] - 0.5) < 1e-4 and abs(spec.energies[1] - 1.5) < 1e-4
    S = np.array([s.samples for s in spec.states]).real
    assert np.max(np.abs(S @ S.T * g.dx - np.eye(3))) < 1e-10
    gf = UniformGrid1D.centered(64, 16.0)
    free = eigensolve_1d(gf, PotentialSpec.zero(), 5, stencil="spectral").energies
    k = np.sort(np.abs(gf.wavenumbers))[:5]
    assert np.max(np.abs(free - np.sort(0.5 * k**2))) < 1e-6


def test_stationary_pairs():
    g = UniformGrid1D.centered(64, 16.0)
    spec = eigensolve_1d(g, HARMONIC, 2, stencil="spectral")
    p10, w10 = stationary_pair(spec.states[1], spec.states[0])
    p01, w01 = stationary_pair(spec.states[0], spec.states[1])
    rate, *_ = phase_rate(p10, HARMONIC, 0.02, 25, 20, order=4)
    assert abs(-rate - w10) < 1e-3 and abs(w10 - 1.0) < 1e-3
    rate01, *_ = phase_rate(p01, HARMONIC, 0.02, 25, 20, order=4)
    assert rate01 == pytest.approx(-rate, rel=1e-9) and w01 == -w10
    assert np.max(np.abs(p01.samples - p10.samples[:, (2 * g.n - np.arange(2 * g.n)) % (2 * g.n)].conj())) < 1e-14
    p11, _ = stationary_pair(spec.states[1], spec.states[1])
    out = evolve_dm(p11, HARMONIC, 0.02, 50, order=4)
    assert np.max(np.abs(out.samples - p11.samples)) < 1e-8


def test_input_validation(grid):
    phi = lift_pure(packet(grid))
    with pytest.raises(ContractViolation):
        evolve_dm(phi, HARMONIC, 0.0, 1)
    with pytest.raises(ContractViolation):
        PotentialSpec("cubic")
    with pytest.raises(ContractViolation):
        PotentialSpec.tabulated(grid, 1j * np.ones(grid.n))
    with pytest.raises(ContractViolation):
        WaveFunction1D(grid, np.ones(3))
    with pytest.raises(ContractViolation):
        stationary_pair(packet(grid), packet(grid))
