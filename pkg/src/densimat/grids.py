"""Periodic grids, transforms, coordinate changes and derivative stencils.

Every axis is a :class:`UniformGrid1D` with periodic boundaries. Two-coordinate
fields are stored in the (x_S, x_D) frame, where x_S = (x + y)/2 is the
physical coordinate and x_D = y - x the auxiliary one.

Transforms use the symmetric 1/(2 pi) normalization of the two-coordinate
momentum representation::

    Phi(k_x, k_y) = 1/(2 pi) sum phi(x, y) exp(-i k_x x + i k_y y) dx dy

Note the opposite signs on the two axes. In the (S, D) frame the same kernel
reads exp(+i (k_D x_S + k_S x_D)), so k_S pairs with x_D and k_D with x_S.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, ResolutionError

COORDS = ("SD", "XY", "K_SD", "K_XY")


@dataclass(frozen=True)
class UniformGrid1D:
    """n points x0, x0 + dx, ..., x0 + (n-1) dx on a periodic line of length n*dx."""

    n: int
    x0: float
    dx: float
    periodic: bool = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise ContractViolation(f"grid size must be an even integer >= 4, got {self.n}")
        if not self.dx > 0:
            raise ContractViolation(f"grid spacing must be positive, got {self.dx}")
        if not self.periodic:
            raise ContractViolation("only periodic grids are supported")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))

    @classmethod
    def centered(cls, n, length):
        """Grid on [-L/2, L/2); with even n the point 0 is the sample n/2."""
        return cls(n, -0.5 * length, length / n)

    @property
    def L(self):
        return self.n * self.dx

    @property
    def points(self):
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def dk(self):
        return 2.0 * np.pi / self.L

    @property
    def wavenumbers(self):
        """Wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def wavenumbers_sorted(self):
        """The set {2 pi j / L : j = -n/2 ... n/2 - 1}, ascending."""
        return self.dk * (np.arange(self.n) - self.n // 2)

    def k_grid(self):
        """The ascending wavenumber set as a grid of its own."""
        return UniformGrid1D(self.n, -self.dk * (self.n // 2), self.dk)

    def zero_index(self):
        """Index of the sample at exactly 0; grids without one are rejected."""
        j = int(round(-self.x0 / self.dx))
        if not (0 <= j < self.n) or abs(self.x0 + j * self.dx) > 1e-12 * max(1.0, abs(self.x0)):
            raise ContractViolation(f"grid has no sample at 0 (x0={self.x0}, dx={self.dx})")
        return j

    def wrap(self, x):
        """Map coordinates into the base interval [x0, x0 + L)."""
        return self.x0 + np.mod(np.asarray(x, dtype=float) - self.x0, self.L)

    def same_as(self, other, rtol=1e-12):
        return (self.n == other.n and np.isclose(self.x0, other.x0, rtol=rtol, atol=rtol * self.dx)
                and np.isclose(self.dx, other.dx, rtol=rtol))


@dataclass(frozen=True)
class ComplexScalarField2D:
    """Complex samples on a product of two periodic grids.

    ``grid_S`` describes axis 0 and ``grid_D`` axis 1; ``coords`` says how to
    read them: (x_S, x_D) for "SD", (x, y) for "XY", (k_S, k_D) for "K_SD" and
    (k_x, k_y) for "K_XY".
    """

    grid_S: UniformGrid1D
    grid_D: UniformGrid1D
    samples: np.ndarray
    coords: str = "SD"

    def __post_init__(self):
        if self.coords not in COORDS:
            raise ContractViolation(f"unknown coords tag {self.coords!r}")
        a = np.array(self.samples, dtype=np.complex128)
        if a.shape != (self.grid_S.n, self.grid_D.n):
            raise ContractViolation(
                f"samples shape {a.shape} does not match grids ({self.grid_S.n}, {self.grid_D.n})")
        a.flags.writeable = False
        object.__setattr__(self, "samples", a)

    def replace(self, samples=None, coords=None, grid_S=None, grid_D=None):
        return ComplexScalarField2D(
            grid_S or self.grid_S, grid_D or self.grid_D,
            self.samples if samples is None else samples, coords or self.coords)

    def mesh(self):
        return np.meshgrid(self.grid_S.points, self.grid_D.points, indexing="ij")


def sd_from_xy(x, y):
    """(x, y) -> (x_S, x_D) = ((x + y)/2, y - x)."""
    return 0.5 * (np.asarray(x) + np.asarray(y)), np.asarray(y) - np.asarray(x)


def xy_from_sd(x_s, x_d):
    """Inverse of :func:`sd_from_xy`."""
    x_s, x_d = np.asarray(x_s), np.asarray(x_d)
    return x_s - 0.5 * x_d, x_s + 0.5 * x_d


def gaussian_profile(x, center=0.0, sigma=1.0):
    """Normalized Gaussian exp(-(x-c)^2 / 2 sigma^2) / (sigma sqrt(2 pi))."""
    return np.exp(-0.5 * ((np.asarray(x) - center) / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))


def check_resolution(grid, center, sigma, min_points_per_sigma=4.0, edge_sigmas=5.0):
    if sigma < min_points_per_sigma * grid.dx * (1 - 1e-12):
        raise ResolutionError(
            f"sigma={sigma} is under-resolved: need sigma >= {min_points_per_sigma} * dx "
            f"= {min_points_per_sigma * grid.dx}")
    lo, hi = grid.x0, grid.x0 + grid.L
    if center - edge_sigmas * sigma < lo or center + edge_sigmas * sigma > hi:
        raise ResolutionError(
            f"profile at {center} with sigma={sigma} comes within {edge_sigmas} sigma "
            f"of the domain edge [{lo}, {hi})")


def gaussian_delta(grid, center, sigma, min_points_per_sigma=4.0):
    """Samples of the unit-mass Gaussian that stands in for a delta function.

    Raises :class:`ResolutionError` when sigma < ``min_points_per_sigma`` * dx or
    the profile comes within 5 sigma of an edge.
    """
    check_resolution(grid, center, sigma, min_points_per_sigma)
    return gaussian_profile(grid.points, center, sigma)


def quadrature(samples, grid, axis=0):
    """Periodic trapezoid rule (plain sum times dx), fixed summation order."""
    return np.sum(samples, axis=axis) * grid.dx


def derivative_multiplier(grid, order):
    """(i k)^order in FFT order; the Nyquist entry is zeroed for odd orders."""
    k = grid.wavenumbers.astype(complex)
    if order % 2:
        k[grid.n // 2] = 0.0
    return (1j * k) ** order


def _along(vec, ndim, axis):
    shape = [1] * ndim
    shape[axis] = -1
    return vec.reshape(shape)


def spectral_derivative(field, grid=None, axis=0, order=1):
    """Derivative by multiplication with (i k)^order in transform space.

    Accepts a :class:`ComplexScalarField2D` (axis 0 -> ``grid_S``, axis 1 ->
    ``grid_D``) or a raw array together with the grid of ``axis``.
    """
    if isinstance(field, ComplexScalarField2D):
        g = field.grid_S if axis == 0 else field.grid_D
        return field.replace(samples=spectral_derivative(field.samples, g, axis, order))
    a = np.asarray(field)
    if order == 0:
        return a.astype(complex)
    mult = _along(derivative_multiplier(grid, order), a.ndim, axis)
    return np.fft.ifft(np.fft.fft(a, axis=axis) * mult, axis=axis)


_FD4 = {1: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)), 2: ((1, 4.0 / 3.0), (2, -1.0 / 12.0))}


def fd_derivative(samples, grid, axis=0, order=1):
    """Fourth-order central difference on a periodic axis (stencil +-2 points)."""
    a = np.asarray(samples)
    if order not in _FD4:
        raise ContractViolation("fd_derivative supports order 1 or 2")
    out = np.zeros(a.shape, dtype=np.result_type(a, float))
    if order == 2:
        out += -2.5 * a
    for shift, c in _FD4[order]:
        fwd = np.roll(a, -shift, axis=axis)
        bwd = np.roll(a, shift, axis=axis)
        out += c * (fwd - bwd) if order == 1 else c * (fwd + bwd)
    return out / grid.dx**order


def fourier_shift(samples, grid, shift, axis=0):
    """Band-limited translate: returns f(x + shift) sampled on the grid.

    ``shift`` may be an array broadcasting against the other axes, which gives a
    different translation per row (used for shears).
    """
    a = np.asarray(samples)
    k = _along(grid.wavenumbers, a.ndim, axis)
    s = np.asarray(shift, dtype=float)
    if s.ndim:
        s = np.expand_dims(s, axis) if s.ndim == a.ndim - 1 else s
    phase = np.exp(1j * k * s)
    nyq = [slice(None)] * a.ndim
    nyq[axis] = slice(grid.n // 2, grid.n // 2 + 1)
    phase = np.broadcast_to(phase, np.broadcast_shapes(phase.shape, k.shape)).copy()
    phase[tuple(nyq)] = np.cos(_along(np.array([np.pi / grid.dx]), a.ndim, axis) * s)
    out = np.fft.ifft(np.fft.fft(a, axis=axis) * phase, axis=axis)
    return out.real if np.isrealobj(a) else out


# -- transforms ---------------------------------------------------------------

def _ft_axis(a, grid, axis, sign):
    """sum_i a_i exp(sign * i k x_i) for the ascending k set of ``grid``."""
    if sign < 0:
        t = np.fft.fft(a, axis=axis)
    else:
        t = np.fft.ifft(a, axis=axis) * grid.n
    t = np.fft.fftshift(t, axes=axis)
    return t * _along(np.exp(sign * 1j * grid.wavenumbers_sorted * grid.x0), a.ndim, axis)


def _ift_axis(t, grid, axis, sign):
    """Inverse of :func:`_ft_axis` without the dx/dk weights (returns n * a)."""
    t = t * _along(np.exp(-sign * 1j * grid.wavenumbers_sorted * grid.x0), t.ndim, axis)
    t = np.fft.ifftshift(t, axes=axis)
    if sign < 0:
        return np.fft.ifft(t, axis=axis) * grid.n
    return np.fft.fft(t, axis=axis)


def dft2(field):
    """Position -> momentum space with the 1/(2 pi) kernel.

    XY input gives K_XY output indexed (k_x, k_y). SD input gives K_SD output
    indexed (k_S, k_D), where k_S pairs with x_D and k_D with x_S.
    """
    gs, gd = field.grid_S, field.grid_D
    w = gs.dx * gd.dx / (2.0 * np.pi)
    if field.coords == "XY":
        t = _ft_axis(field.samples, gs, 0, -1)
        t = _ft_axis(t, gd, 1, +1)
        return ComplexScalarField2D(gs.k_grid(), gd.k_grid(), w * t, "K_XY")
    if field.coords == "SD":
        t = _ft_axis(field.samples, gs, 0, +1)
        t = _ft_axis(t, gd, 1, +1)
        return ComplexScalarField2D(gd.k_grid(), gs.k_grid(), w * t.T, "K_SD")
    raise ContractViolation(f"dft2 needs XY or SD coordinates, got {field.coords}")


def idft2(field, position_grids):
    """Inverse of :func:`dft2`; ``position_grids`` is the (axis0, axis1) pair of
    the position-space field to reconstruct."""
    gs, gd = position_grids
    kg0, kg1 = field.grid_S, field.grid_D
    w = kg0.dx * kg1.dx / (2.0 * np.pi)
    if field.coords == "K_XY":
        t = _ift_axis(field.samples, gs, 0, -1)
        t = _ift_axis(t, gd, 1, +1)
        return ComplexScalarField2D(gs, gd, w * t, "XY")
    if field.coords == "K_SD":
        t = field.samples.T
        t = _ift_axis(t, gs, 0, +1)
        t = _ift_axis(t, gd, 1, +1)
        return ComplexScalarField2D(gs, gd, w * t, "SD")
    raise ContractViolation(f"idft2 needs K_XY or K_SD coordinates, got {field.coords}")


# -- (x, y) <-> (x_S, x_D) resampling ------------------------------------------

def lift_grids(grid):
    """(x_S, x_D) grids that sample the two-coordinate torus of ``grid`` exactly.

    x_S takes every half step of the base grid (2n points, spacing dx/2) and
    x_D runs over [-L, L) with spacing dx, so the point x_D = 0 is on the grid
    and the products psi(x) psi*(y) are represented without aliasing.
    """
    return (UniformGrid1D(2 * grid.n, grid.x0, 0.5 * grid.dx),
            UniformGrid1D(2 * grid.n, -grid.L, grid.dx))


def base_grid_of(grid_S, grid_D):
    """Recover the base grid of a lift-compatible (S, D) pair, or raise."""
    base = UniformGrid1D(grid_S.n // 2, grid_S.x0, grid_D.dx)
    gs, gd = lift_grids(base)
    if not (gs.same_as(grid_S) and gd.same_as(grid_D)):
        raise ContractViolation("(S, D) grids are not the lift grids of a base grid")
    return base


def _sd_index_maps(n):
    s = np.arange(2 * n)[:, None]
    d = np.arange(2 * n)[None, :]
    par = (s - d + n) % 2
    i = ((s - d + n - par) // 2) % n
    j = ((s + d - n - par) // 2) % n
    return par.astype(bool), i, j


def sd_view(field):
    """Resample an XY field on a square base grid onto its lift (S, D) grids."""
    if field.coords != "XY" or not field.grid_S.same_as(field.grid_D):
        raise ContractViolation("sd_view needs an XY field on a square grid")
    g = field.grid_S
    half = fourier_shift(fourier_shift(field.samples, g, 0.5 * g.dx, 0), g, 0.5 * g.dx, 1)
    odd, i, j = _sd_index_maps(g.n)
    out = np.where(odd, half[i, j], field.samples[i, j])
    gs, gd = lift_grids(g)
    return ComplexScalarField2D(gs, gd, out, "SD")


def xy_view(field):
    """Pick the (x, y) lattice points out of a field on lift (S, D) grids."""
    if field.coords != "SD":
        raise ContractViolation("xy_view needs an SD field")
    g = base_grid_of(field.grid_S, field.grid_D)
    i = np.arange(g.n)[:, None]
    j = np.arange(g.n)[None, :]
    out = field.samples[(i + j) % (2 * g.n), (j - i + g.n) % (2 * g.n)]
    return ComplexScalarField2D(g, g, out, "XY")


@dataclass(frozen=True)
class Grid3D:
    """Product of three periodic axes, indexed (i_1, i_2, i_3)."""

    axes: tuple

    @classmethod
    def cube(cls, n, length):
        g = UniformGrid1D.centered(n, length)
        return cls((g, g, g))

    @property
    def shape(self):
        return tuple(a.n for a in self.axes)

    @property
    def dV(self):
        return self.axes[0].dx * self.axes[1].dx * self.axes[2].dx

    def mesh(self):
        """Coordinates as an array of shape (*shape, 3)."""
        return np.stack(np.meshgrid(*(a.points for a in self.axes), indexing="ij"), axis=-1)

    def wavevectors(self, first_order=True):
        """Wavevectors (*shape, 3) in FFT order; Nyquist entries zeroed if ``first_order``."""
        ks = []
        for a in self.axes:
            k = a.wavenumbers.copy()
            if first_order:
                k[a.n // 2] = 0.0
            ks.append(k)
        return np.stack(np.meshgrid(*ks, indexing="ij"), axis=-1)
