import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densimat.errors import ContractViolation, ResolutionError
from densimat.grids import (ComplexScalarField2D, UniformGrid1D, dft2, fd_derivative,
                            fourier_shift, gaussian_delta, gaussian_profile, idft2, lift_grids,
                            quadrature, sd_from_xy, sd_view, spectral_derivative, xy_from_sd,
                            xy_view)


def brute_dft2(field):
    """O(N^4) double sum with the same kernel as dft2."""
    gs, gd = field.grid_S, field.grid_D
    a, b = gs.points, gd.points
    if field.coords == "XY":
        kx, ky = gs.wavenumbers_sorted, gd.wavenumbers_sorted
        ex = np.exp(-1j * np.outer(kx, a))
        ey = np.exp(1j * np.outer(ky, b))
        return ex @ field.samples @ ey.T * gs.dx * gd.dx / (2 * np.pi)
    kD, kS = gs.wavenumbers_sorted, gd.wavenumbers_sorted
    eS = np.exp(1j * np.outer(kD, a))
    eD = np.exp(1j * np.outer(kS, b))
    return (eS @ field.samples @ eD.T).T * gs.dx * gd.dx / (2 * np.pi)


def smooth_field(g1, g2, coords, seed=0):
    rng = np.random.default_rng(seed)
    x, y = np.meshgrid(g1.points, g2.points, indexing="ij")
    out = np.zeros(x.shape, complex)
    for _ in range(3):
        c = rng.normal(size=4)
        out += (c[0] + 1j * c[1]) * np.exp(-0.5 * ((x - c[2]) ** 2 + (y - c[3]) ** 2))
    return ComplexScalarField2D(g1, g2, out, coords)


def test_coordinate_examples():
    assert sd_from_xy(1.0, 1.0) == (1.0, 0.0)
    assert sd_from_xy(0.0, 2.0) == (1.0, 2.0)


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=1, max_size=100))
def test_coordinate_round_trip(pairs):
    x, y = np.array(pairs).T
    xr, yr = xy_from_sd(*sd_from_xy(x, y))
    assert np.allclose(xr, x, rtol=0, atol=1e-12 * (1 + np.abs(x).max()))
    assert np.allclose(yr, y, rtol=0, atol=1e-12 * (1 + np.abs(y).max()))


@pytest.mark.parametrize("n", [3, 2, 7, 0])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ContractViolation):
        UniformGrid1D(n, 0.0, 0.1)


def test_grid_basics():
    g = UniformGrid1D.centered(16, 8.0)
    assert g.L == 8.0 and g.zero_index() == 8
    assert np.allclose(np.sort(g.wavenumbers), g.wavenumbers_sorted)
    assert g.wrap(4.5) == pytest.approx(-3.5)
    with pytest.raises(ContractViolation):
        UniformGrid1D(16, 0.05, 0.1).zero_index()


@pytest.mark.parametrize("coords", ["XY", "SD"])
def test_dft2_matches_double_sum(coords):
    g1 = UniformGrid1D(16, -4.1, 0.55)
    g2 = UniformGrid1D(12, -3.3, 0.6)
    f = smooth_field(g1, g2, coords)
    F = dft2(f)
    ref = brute_dft2(f)
    assert np.max(np.abs(F.samples - ref)) / np.max(np.abs(ref)) < 1e-10
    back = idft2(F, (g1, g2))
    assert np.max(np.abs(back.samples - f.samples)) < 1e-12


def test_dft2_of_grid_delta_is_flat():
    g = UniformGrid1D.centered(32, 8.0)
    a = np.zeros((32, 32))
    a[16, 16] = 1.0 / (g.dx * g.dx)
    F = dft2(ComplexScalarField2D(g, g, a, "XY"))
    assert np.allclose(F.samples, 1.0 / (2 * np.pi), atol=1e-14)


def test_gaussian_delta_moments():
    g = UniformGrid1D.centered(256, 20.0)
    c, s = 0.7, 0.5
    d = gaussian_delta(g, c, s)
    x = g.points
    assert quadrature(d, g) == pytest.approx(1.0, abs=1e-8)
    assert quadrature(x * d, g) == pytest.approx(c, abs=1e-8)
    assert quadrature((x - c) ** 2 * d, g) == pytest.approx(s**2, rel=1e-6)


def test_gaussian_delta_resolution_errors():
    g = UniformGrid1D.centered(64, 16.0)
    with pytest.raises(ResolutionError):
        gaussian_delta(g, 0.0, 0.2)
    with pytest.raises(ResolutionError):
        gaussian_delta(g, 7.0, 1.0)


def test_spectral_derivative_examples():
    g = UniformGrid1D.centered(64, 16.0)
    x = g.points
    k = 3 * g.dk
    mode = np.exp(1j * k * x)
    assert np.max(np.abs(spectral_derivative(mode, g) - 1j * k * mode)) < 1e-12
    gs = gaussian_profile(x, 0.3, 1.0)
    d1 = spectral_derivative(gs, g)
    assert np.max(np.abs(d1 - (-(x - 0.3) * gs))) < 1e-8
    d2 = spectral_derivative(gs, g, order=2)
    assert np.max(np.abs(d2 - spectral_derivative(d1, g))) < 1e-10


def test_fd_derivative_is_fourth_order():
    errs = []
    for n in (64, 128):
        g = UniformGrid1D.centered(n, 16.0)
        x = g.points
        f = np.exp(-x**2 / 2)
        errs.append(np.max(np.abs(fd_derivative(f, g) + x * f)))
    assert errs[0] / errs[1] > 14


def test_fourier_shift_translates():
    g = UniformGrid1D.centered(64, 16.0)
    f = gaussian_profile(g.points, 0.0, 1.0)
    assert np.max(np.abs(fourier_shift(f, g, 0.37) - gaussian_profile(g.points + 0.37, 0.0, 1.0))) < 1e-12


def test_lift_views_round_trip():
    g = UniformGrid1D.centered(16, 8.0)
    f = smooth_field(g, g, "XY", seed=2)
    sd = sd_view(f)
    gs, gd = lift_grids(g)
    assert sd.grid_S.same_as(gs) and sd.grid_D.same_as(gd)
    assert np.array_equal(xy_view(sd).samples, f.samples)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_lift_of_outer_product_is_exact_on_even_points(seed):
    rng = np.random.default_rng(seed)
    g = UniformGrid1D.centered(16, 10.0)
    x = g.points
    psi = np.exp(-0.5 * (x - rng.uniform(-1, 1)) ** 2) * np.exp(1j * rng.uniform(-1, 1) * x)
    f = ComplexScalarField2D(g, g, np.outer(psi, psi.conj()), "XY")
    sd = sd_view(f)
    # x_D = 0 column is the density |psi|^2 at every base point (even x_S index)
    col = sd.samples[::2, g.n]
    assert np.max(np.abs(col - np.abs(psi) ** 2)) < 1e-14
