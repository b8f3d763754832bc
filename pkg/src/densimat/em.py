"""Electromagnetic coupling on the z-reduced domain and a Lorenz-gauge Maxwell stepper.

Fields that depend on the third coordinate only are stored on the lift grids
of a base z grid: 2n points in x_S (spacing h/2) and 2n points in x_D over
[-L, L) (spacing h). The points x = x_S - x_D/2 and y = x_S + x_D/2 then fall
on base grid points or exactly half way between them, so potentials sampled
on the base grid are evaluated at x and y by band-limited half-step shifts.
"""
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .dirac.basis import I4, dirac_basis
from .dirac.fields import KINDS, conjugate_matrices
from .errors import ContractViolation, NumericalDivergence
from .grids import (Grid3D, UniformGrid1D, _sd_index_maps, check_resolution, fourier_shift,
                    gaussian_profile, lift_grids, spectral_derivative)
from .kernels import sandwich, wave_step
from .schrodinger import _substeps

DIVERGENCE_LIMIT = 1e6


# -- reduced matrix fields ------------------------------------------------------------

@dataclass(frozen=True)
class ReducedMatrixField:
    """phi(x_S, x_D) for fields depending on the third coordinate only.

    ``samples`` has shape (2n, 2n, 4, 4) on the lift grids of ``base``.
    """

    base: UniformGrid1D
    samples: np.ndarray
    mass: float = 1.0

    def __post_init__(self):
        a = np.array(self.samples, dtype=np.complex128)
        n2 = 2 * self.base.n
        if a.shape != (n2, n2, 4, 4):
            raise ContractViolation(f"reduced field must have shape ({n2}, {n2}, 4, 4), got {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "samples", a)

    @property
    def grids(self):
        return lift_grids(self.base)

    @property
    def zero_D(self):
        return self.base.n

    def with_samples(self, samples):
        return ReducedMatrixField(self.base, samples, self.mass)

    def xy_view(self):
        """(n, n, 4, 4) samples phi(z_i, z_j)."""
        n = self.base.n
        i = np.arange(n)[:, None]
        j = np.arange(n)[None, :]
        return self.samples[(i + j) % (2 * n), (j - i + n) % (2 * n)]

    def diagonal(self):
        """phi(x_S, 0) on the 2n x_S points."""
        return self.samples[:, self.zero_D]

    def swap_defect(self):
        """max |phi(y, x) - phi(x, y)^dagger|."""
        n2 = 2 * self.base.n
        refl = self.samples[:, (2 * self.zero_D - np.arange(n2)) % n2]
        return float(np.max(np.abs(refl - np.swapaxes(self.samples, -1, -2).conj())))

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2)))


def values_at_xy(samples, base: UniformGrid1D):
    """Base-grid samples (n, ...) evaluated at x and y of every (x_S, x_D) point.

    Returns two arrays of shape (2n, 2n, ...).
    """
    a = np.asarray(samples)
    half = fourier_shift(a, base, 0.5 * base.dx, axis=0)
    odd, i, j = _sd_index_maps(base.n)
    sel = odd.reshape(odd.shape + (1,) * (a.ndim - 1))
    return np.where(sel, half[i], a[i]), np.where(sel, half[j], a[j])


def reduced_lift(psi, base: UniformGrid1D, mass=1.0) -> ReducedMatrixField:
    """phi(x, y) = psi(x) psi^dagger(y) for a spinor psi of shape (n, 4)."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (base.n, 4):
        raise ContractViolation("spinor must have shape (n, 4)")
    px, py = values_at_xy(psi, base)
    return ReducedMatrixField(base, np.einsum("...i,...j->...ij", px, py.conj()), mass)


def reduced_rest_solution(kind, sigma, mass, base: UniformGrid1D, center=0.0,
                          min_points_per_sigma=2.0) -> ReducedMatrixField:
    """Rest field of the given kind with a profile g_sigma(x_S) in the third
    coordinate only, constant in x_D."""
    if kind not in KINDS:
        raise ContractViolation(f"kind must be one of {KINDS}")
    gS, gD = lift_grids(base)
    check_resolution(gS, center, sigma, min_points_per_sigma)
    x = gS.points
    d = gaussian_profile(x, center, sigma)
    d3 = -(x - center) / sigma**2 * d
    phi = np.zeros((gS.n, 4, 4), dtype=np.complex128)
    m4 = 4 * mass * d
    if kind == "A":
        phi[:, 0, 0], phi[:, 0, 2], phi[:, 2, 0] = m4, 1j * d3, -1j * d3
    elif kind == "B":
        phi[:, 1, 1], phi[:, 1, 3], phi[:, 3, 1] = m4, -1j * d3, 1j * d3
    elif kind == "C":
        phi[:, 2, 2], phi[:, 0, 2], phi[:, 2, 0] = -m4, -1j * d3, 1j * d3
    else:
        phi[:, 3, 3], phi[:, 1, 3], phi[:, 3, 1] = -m4, 1j * d3, -1j * d3
    samples = np.broadcast_to((phi / (4 * mass))[:, None], (gS.n, gD.n, 4, 4))
    return ReducedMatrixField(base, samples, mass)


def charge_conjugate_reduced(phi: ReducedMatrixField) -> ReducedMatrixField:
    """gamma^2 phi^T(y, x) gamma^2."""
    n2 = 2 * phi.base.n
    swapped = phi.samples[:, (2 * phi.zero_D - np.arange(n2)) % n2]
    return phi.with_samples(conjugate_matrices(swapped))


def gauge_phase_reduced(phi: ReducedMatrixField, theta) -> ReducedMatrixField:
    """exp(i [theta(x) - theta(y)]) phi for theta sampled on the base grid."""
    tx, ty = values_at_xy(np.asarray(theta, dtype=float), phi.base)
    return phi.with_samples(np.exp(1j * (tx - ty))[..., None, None] * phi.samples)


# -- potentials ------------------------------------------------------------------------

GridLike = Union[UniformGrid1D, Grid3D]


def _axes(grid):
    return (grid,) if isinstance(grid, UniformGrid1D) else tuple(grid.axes)


def _shape(grid):
    return tuple(a.n for a in _axes(grid))


@dataclass(frozen=True)
class FourPotential:
    """A^mu (upper index) at two leapfrog levels: ``cur`` at time t, ``prev`` at t - dt.

    Arrays have shape (4, *spatial). ``lorenz`` holds the gauge residual of
    the last step (centred at the previous level).
    """

    grid: GridLike
    cur: np.ndarray
    prev: np.ndarray
    dt: float
    t: float = 0.0
    lorenz: float = 0.0

    def __post_init__(self):
        for name in ("cur", "prev"):
            a = np.array(getattr(self, name), dtype=float)
            if a.shape != (4,) + _shape(self.grid):
                raise ContractViolation(f"{name} must have shape (4, *grid), got {a.shape}")
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @classmethod
    def static(cls, grid, A, dt, t=0.0):
        return cls(grid, A, A, dt, t)

    @classmethod
    def zeros(cls, grid, dt, t=0.0):
        z = np.zeros((4,) + _shape(grid))
        return cls(grid, z, z, dt, t)

    @property
    def spacing(self):
        return tuple(a.dx for a in _axes(self.grid))

    @property
    def midpoint(self):
        return 0.5 * (self.cur + self.prev)

    def energy_proxy(self):
        """sum over components of int |d_t A|^2 + |grad A|^2."""
        dV = float(np.prod(self.spacing))
        dt = (self.cur - self.prev) / self.dt
        tot = np.sum(dt**2)
        for k, ax in enumerate(_axes(self.grid)):
            tot += np.sum(spectral_derivative(self.cur, ax, axis=k + 1).real ** 2)
        return float(tot * dV)


def divergence(A_spatial, grid):
    """sum_k d_k A^k (spectral) for A_spatial of shape (3, *s); 1-D grids use A^3 only."""
    axes = _axes(grid)
    if len(axes) == 1:
        return spectral_derivative(A_spatial[2], axes[0], axis=0).real
    return sum(spectral_derivative(A_spatial[k], axes[k], axis=k).real for k in range(3))


def check_cfl(dt, grid):
    h = min(a.dx for a in _axes(grid))
    d = len(_axes(grid))
    if dt > h / np.sqrt(d) * (1 + 1e-12):
        raise ContractViolation(f"dt={dt} violates the CFL bound dt <= dx/sqrt(d) = {h / np.sqrt(d)}")


def maxwell_step(A: FourPotential, J, use_compiled=None) -> FourPotential:
    """One leapfrog step of the Lorenz-gauge wave equations d_tt A^mu - lap A^mu = J^mu.

    The Laplacian is the second-order periodic stencil. The returned potential
    carries the Lorenz residual (A0^{n+1} - A0^{n-1})/(2 dt) + div A^n.
    """
    check_cfl(A.dt, A.grid)
    J = np.asarray(J, dtype=float)
    if J.shape != A.cur.shape:
        raise ContractViolation(f"current shape {J.shape} does not match potential {A.cur.shape}")
    new = wave_step(A.prev, A.cur, J, A.dt, A.spacing, use_compiled=use_compiled)
    g = (new[0] - A.prev[0]) / (2 * A.dt) + divergence(A.cur[1:], A.grid)
    out = FourPotential(A.grid, new, A.cur, A.dt, A.t + A.dt, float(np.max(np.abs(g))))
    if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > DIVERGENCE_LIMIT:
        raise NumericalDivergence(f"potential diverged at t={out.t:.6g}")
    return out


def discrete_laplacian_symbol(grid):
    """Eigenvalues of the periodic second-order Laplacian stencil, FFT order."""
    lam = 0.0
    for k, ax in enumerate(_axes(grid)):
        kk = ax.wavenumbers
        sym = -(2 - 2 * np.cos(kk * ax.dx)) / ax.dx**2
        shape = [1] * len(_axes(grid))
        shape[k] = -1
        lam = lam + sym.reshape(shape)
    return lam


def poisson_solve(rho, grid):
    """Zero-mean solution of -lap_h u = rho with the same stencil as the stepper."""
    lam = discrete_laplacian_symbol(grid)
    hat = np.fft.fftn(rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(lam != 0, -hat / np.where(lam != 0, lam, 1.0), 0.0)
    return np.fft.ifftn(u).real


@dataclass(frozen=True)
class GaugeFunction:
    """theta sampled on a grid at the two leapfrog levels (equal for static theta).

    ``slope`` adds a linear part c . x that is not periodic and so is kept
    out of the samples; it only enters through the gradient.
    """

    grid: GridLike
    cur: np.ndarray
    prev: Optional[np.ndarray] = None
    slope: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "cur", np.asarray(self.cur, dtype=float))
        if self.prev is None:
            object.__setattr__(self, "prev", self.cur)
        object.__setattr__(self, "prev", np.asarray(self.prev, dtype=float))
        object.__setattr__(self, "slope", tuple(float(c) for c in np.broadcast_to(self.slope, (3,))))


def _grad(theta, grid):
    """(3, *s) spatial gradient; 1-D grids are the third axis."""
    axes = _axes(grid)
    if len(axes) == 1:
        z = np.zeros_like(theta)
        return np.stack([z, z, spectral_derivative(theta, axes[0], axis=0).real])
    return np.stack([spectral_derivative(theta, axes[k], axis=k).real for k in range(3)])


def gauge_transform_A(A: FourPotential, theta: GaugeFunction, e: float) -> FourPotential:
    """A'_mu = A_mu + (1/e) d_mu theta, i.e. A'^0 = A^0 + theta_t / e, A'^k = A^k - d_k theta / e.

    The time derivative is the leapfrog difference (theta_cur - theta_prev)/dt,
    applied to both levels.
    """
    if e == 0:
        raise ContractViolation("gauge transformation of A needs e != 0")
    dth = (theta.cur - theta.prev) / A.dt

    def shift(level, th):
        out = np.array(level)
        out[0] += dth / e
        grad = _grad(th, A.grid) + np.reshape(theta.slope, (3,) + (1,) * th.ndim)
        out[1:] -= grad / e
        return out

    return replace(A, cur=shift(A.cur, theta.cur), prev=shift(A.prev, theta.prev))


def field_strength(A: FourPotential):
    """F_{mu nu} = d_mu A_nu - d_nu A_mu at the half level, shape (4, 4, *s).

    Time derivatives are leapfrog differences, space derivatives spectral.
    """
    lower = np.array([1.0, -1.0, -1.0, -1.0])[:, None]
    cur = (A.cur.reshape(4, -1) * lower).reshape(A.cur.shape)
    prev = (A.prev.reshape(4, -1) * lower).reshape(A.prev.shape)
    mid = 0.5 * (cur + prev)
    d = np.zeros((4,) + A.cur.shape)
    d[0] = (cur - prev) / A.dt
    axes = _axes(A.grid)
    if len(axes) == 1:
        d[3] = spectral_derivative(mid, axes[0], axis=1).real
    else:
        for k in range(3):
            d[k + 1] = spectral_derivative(mid, axes[k], axis=k + 1).real
    return d - np.swapaxes(d, 0, 1)


# -- H1 and interacting evolution ---------------------------------------------------------

def _potential_xy(A, base):
    """A^mu (4, n) -> values at x and y, each (2n, 2n, 4)."""
    ax, ay = values_at_xy(np.moveaxis(np.asarray(A, dtype=float), 0, -1), base)
    return ax.real, ay.real


def apply_H1(phi: ReducedMatrixField, A):
    """A0(y) phi - A0(x) phi + A^k(x) alpha_k phi - A^k(y) phi alpha_k."""
    A = np.asarray(A, dtype=float)
    if A.shape != (4, phi.base.n):
        raise ContractViolation(f"potential must have shape (4, {phi.base.n}), got {A.shape}")
    alpha = dirac_basis().alpha
    ax, ay = _potential_xy(A, phi.base)
    a = phi.samples
    out = (ay[..., 0] - ax[..., 0])[..., None, None] * a
    vx = np.einsum("...k,kij->...ij", ax[..., 1:], alpha)
    vy = np.einsum("...k,kij->...ij", ay[..., 1:], alpha)
    return out + vx @ a - a @ vy


def _vector_exp(avec, scal, tau, sign):
    """exp(i scal tau) [cos(|a| tau) + sign * i sin(|a| tau) a.alpha/|a|], stacked."""
    alpha = dirac_basis().alpha
    mag = np.linalg.norm(avec, axis=-1)
    c = np.cos(mag * tau)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(mag > 0, np.sin(mag * tau) / np.where(mag > 0, mag, 1.0), 0.0)
    va = np.einsum("...k,kij->...ij", avec, alpha)
    return np.exp(1j * scal * tau)[..., None, None] * (c[..., None, None] * I4
                                                        + sign * 1j * s[..., None, None] * va)


def interaction_factors(phi: ReducedMatrixField, A, e, tau):
    """Left and right factors of exp(-i e H1 tau) (H1 splits into commuting sides)."""
    ax, ay = _potential_xy(A, phi.base)
    left = _vector_exp(e * ax[..., 1:], e * ax[..., 0], tau, -1.0)
    right = _vector_exp(e * ay[..., 1:], -e * ay[..., 0], tau, +1.0)
    return left, right


def free_factors(phi: ReducedMatrixField, tau):
    """Per (q_S, q_D) mode: exp(-i L tau), exp(-i R tau) with
    L = k_x alpha_3 + m beta and R = k_y alpha_3 - m beta."""
    b = dirac_basis()
    gS, gD = phi.grids
    qS = gS.wavenumbers.copy()
    qD = gD.wavenumbers.copy()
    qS[gS.n // 2] = 0.0
    qD[gD.n // 2] = 0.0
    kx = 0.5 * qS[:, None] - qD[None, :]
    ky = 0.5 * qS[:, None] + qD[None, :]
    m = phi.mass

    def ex(k, sgn):
        w = np.sqrt(k**2 + m**2)
        M = k[..., None, None] * b.alpha[2] + sgn * m * b.beta
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(w > 0, np.sin(w * tau) / np.where(w > 0, w, 1.0), tau)
        return np.cos(w * tau)[..., None, None] * I4 - 1j * s[..., None, None] * M

    return ex(kx, +1.0), ex(ky, -1.0)


def _fft2(a):
    return np.fft.fft2(a, axes=(0, 1))


def _ifft2(a):
    return np.fft.ifft2(a, axes=(0, 1))


def _strang_factors(phi, A, e, dt, sides):
    FL, FR = free_factors(phi, dt)
    HL = HR = None
    if e != 0 and np.any(np.asarray(A) != 0):
        HL, HR = interaction_factors(phi, A, e, 0.5 * dt)
    if sides == "left":
        FR, HR = I4, (None if HL is None else I4)
    elif sides == "right":
        FL, HL = I4, (None if HR is None else I4)
    return FL, FR, HL, HR


def _strang(phi: ReducedMatrixField, A, e, dt, steps, sides, order=2):
    a = np.array(phi.samples)
    subs = [_strang_factors(phi, A, e, w * dt, sides) for w in _substeps(order)]
    for _ in range(int(steps)):
        for FL, FR, HL, HR in subs:
            if HL is not None:
                a = sandwich(HL, a, HR)
            a = _ifft2(sandwich(FL, _fft2(a), FR))
            if HL is not None:
                a = sandwich(HL, a, HR)
    return phi.with_samples(a)


def evolve_interacting(phi: ReducedMatrixField, A, e: float, dt: float, steps: int,
                       sides="both", order: int = 2) -> ReducedMatrixField:
    """Strang split of i d_t phi = H0 phi + e H1 phi with a fixed potential A (4, n).

    The free part is exact per mode; the interaction is exact per point. Left
    and right factors commute, so ``sides`` = "left" or "right" gives the
    separate t_x and t_y flows. ``order=4`` composes three Strang steps.
    """
    if dt == 0 or abs(dt) > phi.base.dx * (1 + 1e-12):
        raise ContractViolation(f"time step must satisfy 0 < |dt| <= dx = {phi.base.dx}")
    if sides not in ("both", "left", "right"):
        raise ContractViolation(f"unknown sides {sides!r}")
    return _strang(phi, np.asarray(A, dtype=float), e, dt, steps, sides, order)


def spinor_evolve(psi, base: UniformGrid1D, A, e, mass, dt, steps):
    """Oracle: Strang split of i psi_t = (-i alpha_3 d_z + m beta) psi + e (A.alpha - A0) psi."""
    b = dirac_basis()
    k = base.wavenumbers.copy()
    k[base.n // 2] = 0.0
    w = np.sqrt(k**2 + mass**2)
    M = k[:, None, None] * b.alpha[2] + mass * b.beta
    F = np.cos(w * dt)[:, None, None] * I4 - 1j * (np.sin(w * dt) / w)[:, None, None] * M
    A = np.asarray(A, dtype=float)
    H = _vector_exp(e * A[1:].T, e * A[0], 0.5 * dt, -1.0)
    a = np.array(psi, dtype=np.complex128)
    for _ in range(int(steps)):
        a = np.einsum("zij,zj->zi", H, a)
        a = np.fft.ifft(np.einsum("kij,kj->ki", F, np.fft.fft(a, axis=0)), axis=0)
        a = np.einsum("zij,zj->zi", H, a)
    return a


# -- currents and residuals --------------------------------------------------------------

def current_density(phi: ReducedMatrixField, e: float):
    """J^mu = e Tr(phi gamma^0 gamma^mu) on the x_D = 0 line, shape (4, 2n)."""
    cm = dirac_basis().current_matrices
    diag = phi.diagonal()
    return e * np.stack([np.einsum("ij,sji->s", cm[mu], diag) for mu in range(4)]).real


def current_on_base(phi: ReducedMatrixField, e: float):
    """The current at the base grid points (every other x_S sample)."""
    return current_density(phi, e)[:, ::2]


def total_charge(phi: ReducedMatrixField, e: float = 1.0):
    gS, _ = phi.grids
    return float(np.sum(current_density(phi, e)[0]) * gS.dx)


def _x_derivatives(phi_samples, base):
    gS, gD = lift_grids(base)
    dS = spectral_derivative(phi_samples, gS, axis=0)
    dD = spectral_derivative(phi_samples, gD, axis=1)
    return 0.5 * dS - dD, 0.5 * dS + dD


def _lower_dot(Axy, mats):
    """A_mu M^mu = A^0 M^0 - A^k M^k, stacked over points."""
    return (Axy[..., 0, None, None] * mats[0]
            - np.einsum("...k,kij->...ij", Axy[..., 1:], mats[1:]))


def residual_x(phi: ReducedMatrixField, d_tx, A, e):
    """i gamma^mu (d_mu - i e A_mu(x)) phi - m phi for the reduced field."""
    g = dirac_basis().gamma
    dx, _ = _x_derivatives(phi.samples, phi.base)
    r = 1j * (g[0] @ d_tx) + 1j * (g[3] @ dx) - phi.mass * phi.samples
    if e != 0:
        ax, _ = _potential_xy(A, phi.base)
        r = r + e * (_lower_dot(ax, g) @ phi.samples)
    return r


def residual_y(phi: ReducedMatrixField, d_ty, A, e):
    """i (d_{y^mu} + i e A_mu(y)) phi gamma^0 gamma^mu + m phi gamma^0."""
    b = dirac_basis()
    cm = b.current_matrices
    _, dy = _x_derivatives(phi.samples, phi.base)
    r = 1j * d_ty + 1j * (dy @ cm[3]) + phi.mass * (phi.samples @ b.gamma[0])
    if e != 0:
        _, ay = _potential_xy(A, phi.base)
        r = r - e * (phi.samples @ _lower_dot(ay, cm))
    return r


def side_time_derivative(phi: ReducedMatrixField, A, e, side, h=1e-3):
    """d phi / d t_x (side='left') or d t_y ('right') by fourth-order differences
    of the one-sided flows."""
    acc = 0.0
    for off, c in ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)):
        acc = acc + c * _strang(phi, A, e, off * h, 1, side).samples
    return acc / h


def interacting_residuals(phi: ReducedMatrixField, A, e, h=1e-3):
    """(max |R_x|, max |R_y|) with t_x and t_y derivatives from the one-sided flows."""
    A = np.asarray(A, dtype=float)
    r_x = residual_x(phi, side_time_derivative(phi, A, e, "left", h), A, e)
    r_y = residual_y(phi, side_time_derivative(phi, A, e, "right", h), A, e)
    return float(np.max(np.abs(r_x))), float(np.max(np.abs(r_y)))


# -- coupled evolution ---------------------------------------------------------------------

@dataclass(frozen=True)
class CoupledState:
    phi: ReducedMatrixField
    A: FourPotential
    e: float
    t: float = 0.0


def coupled_step(state: CoupledState, use_compiled=None) -> CoupledState:
    """J from phi, leapfrog A, then evolve phi with A at the step midpoint."""
    if not state.A.grid.same_as(state.phi.base):
        raise ContractViolation("potential and matter field must share the base grid")
    J = current_on_base(state.phi, state.e)
    A_new = maxwell_step(state.A, J, use_compiled=use_compiled)
    phi = evolve_interacting(state.phi, A_new.midpoint, state.e, state.A.dt, 1)
    nrm = phi.norm()
    if not np.isfinite(nrm) or nrm > DIVERGENCE_LIMIT:
        raise NumericalDivergence(f"matter field diverged at t={state.t + state.A.dt:.6g} (norm {nrm:.3e})")
    return CoupledState(phi, A_new, state.e, state.t + state.A.dt)


def continuity_defect(currents, dt, grid_S: UniformGrid1D):
    """max |d_t J^0 + d_z J^3| / max |J^0| over a series of currents (T, 4, 2n).

    Time derivatives are fourth-order central differences, so the first and
    last two entries only serve as stencil points.
    """
    J = np.asarray(currents, dtype=float)
    if J.shape[0] < 5:
        raise ContractViolation("continuity needs at least five current samples")
    dt0 = (J[:-4, 0] - 8 * J[1:-3, 0] + 8 * J[3:-1, 0] - J[4:, 0]) / (12 * dt)
    dz = spectral_derivative(J[2:-2, 3], grid_S, axis=1).real
    return float(np.max(np.abs(dt0 + dz)) / np.max(np.abs(J[:, 0])))
