"""Non-relativistic density-matrix fields phi(x_S, x_D).

A pure state psi lifts to phi(x, y) = psi(x) psi*(y). The lifted field, and any
other field on the same grids, evolves under

    i hbar d phi/dt = (hbar^2/m) d_S d_D phi + [V(x) - V(y)] phi,

with x = x_S - x_D/2 and y = x_S + x_D/2. Observables are quadratures over the
x_D = 0 line.
"""
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import ContractViolation
from .grids import (ComplexScalarField2D, UniformGrid1D, check_resolution, fd_derivative,
                    fourier_shift, gaussian_profile, lift_grids, sd_view, spectral_derivative)


@dataclass(frozen=True)
class WaveFunction1D:
    grid: UniformGrid1D
    samples: np.ndarray
    hbar: float = 1.0
    mass: float = 1.0
    energy: Optional[float] = None

    def __post_init__(self):
        a = np.array(self.samples, dtype=np.complex128)
        if a.shape != (self.grid.n,):
            raise ContractViolation(f"wave function has shape {a.shape}, grid has {self.grid.n} points")
        a.flags.writeable = False
        object.__setattr__(self, "samples", a)

    def norm(self):
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dx)

    def normalized(self):
        return WaveFunction1D(self.grid, self.samples / np.sqrt(self.norm()), self.hbar,
                              self.mass, self.energy)


@dataclass(frozen=True)
class DensityField:
    """A two-coordinate field in (x_S, x_D) coordinates with its constants."""

    field: ComplexScalarField2D
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.field.coords != "SD":
            raise ContractViolation("DensityField stores (x_S, x_D) samples")
        self.field.grid_D.zero_index()

    @property
    def samples(self):
        return self.field.samples

    @property
    def grid_S(self):
        return self.field.grid_S

    @property
    def grid_D(self):
        return self.field.grid_D

    def with_samples(self, samples):
        return DensityField(self.field.replace(samples=samples), self.hbar, self.mass)


@dataclass(frozen=True)
class PotentialSpec:
    """Real potential: ``zero``, ``harmonic`` (1/2 m w^2 x^2) or ``tabulated``."""

    kind: str = "zero"
    omega: float = 0.0
    mass: float = 1.0
    table_grid: Optional[UniformGrid1D] = None
    table: Optional[np.ndarray] = dc_field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("zero", "harmonic", "tabulated"):
            raise ContractViolation(f"unknown potential kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.table_grid is None or self.table is None:
                raise ContractViolation("tabulated potential needs table_grid and table")
            t = np.asarray(self.table)
            if np.iscomplexobj(t) and np.any(t.imag != 0):
                raise ContractViolation("potential must be real")
            object.__setattr__(self, "table", np.asarray(t.real, dtype=float))

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def harmonic(cls, omega, mass=1.0):
        return cls("harmonic", omega=float(omega), mass=float(mass))

    @classmethod
    def tabulated(cls, grid, values):
        return cls("tabulated", table_grid=grid, table=values)

    @property
    def is_zero(self):
        return self.kind == "zero" or (self.kind == "harmonic" and self.omega == 0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return 0.5 * self.mass * self.omega**2 * x**2
        g = self.table_grid
        return np.interp(x, g.points, self.table, period=g.L)


@dataclass(frozen=True)
class SchrodingerObservables:
    Q: float
    P: float
    E: float
    imag_residual: float = 0.0


# -- lift, real representation, hermiticity ----------------------------------

def lift_pure(psi: WaveFunction1D) -> DensityField:
    """phi(x, y) = psi(x) psi*(y) on the lift grids of ``psi.grid``."""
    s = psi.samples
    xy = ComplexScalarField2D(psi.grid, psi.grid, np.outer(s, s.conj()), "XY")
    return DensityField(sd_view(xy), psi.hbar, psi.mass)


def _reflect_D(samples, grid_D):
    """samples at -x_D on the same grid."""
    z = grid_D.zero_index()
    idx = (2 * z - np.arange(grid_D.n)) % grid_D.n
    return samples[:, idx]


def hermiticity_defect(phi: DensityField) -> float:
    """max |phi(y, x) - phi*(x, y)|, i.e. max |phi(x_S, -x_D) - phi*(x_S, x_D)|."""
    a = phi.samples
    return float(np.max(np.abs(_reflect_D(a, phi.grid_D) - a.conj())))


def to_real_rep(phi: DensityField, tol=1e-8) -> np.ndarray:
    """phi_R = Re phi + Im phi for a hermitian field."""
    d = hermiticity_defect(phi)
    if d > tol:
        raise ContractViolation(f"field is not hermitian (defect {d:.3e} > {tol:g})")
    return phi.samples.real + phi.samples.imag


def from_real_rep(phi_r, template: DensityField) -> DensityField:
    """Split phi_R into its part even in x_D (real part) and odd in x_D (imaginary part)."""
    r = np.asarray(phi_r, dtype=float)
    refl = _reflect_D(r, template.grid_D)
    return template.with_samples(0.5 * (r + refl) + 0.5j * (r - refl))


# -- evolution ----------------------------------------------------------------

def _potential_difference(phi: DensityField, V: PotentialSpec):
    xs, xd = phi.field.mesh()
    g = phi.grid_S
    return V(g.wrap(xs - 0.5 * xd)) - V(g.wrap(xs + 0.5 * xd))


_CBRT2 = 2.0 ** (1.0 / 3.0)
# triple-jump weights turning a symmetric second-order step into a fourth-order one
TRIPLE_JUMP = (1.0 / (2.0 - _CBRT2), -_CBRT2 / (2.0 - _CBRT2), 1.0 / (2.0 - _CBRT2))


def _substeps(order):
    if order == 2:
        return (1.0,)
    if order == 4:
        return TRIPLE_JUMP
    raise ContractViolation(f"splitting order must be 2 or 4, got {order}")


def evolve_dm(phi: DensityField, V: PotentialSpec, dt: float, steps: int,
              order: int = 2) -> DensityField:
    """Strang split-step (potential half, kinetic, potential half).

    The kinetic factor exp(+i hbar q_S q_D dt / m) is exact, so V = 0 has no
    splitting error. ``order=4`` composes three Strang steps (triple jump).
    """
    if not dt > 0:
        raise ContractViolation("dt must be positive")
    hbar, m = phi.hbar, phi.mass
    q_s = phi.grid_S.wavenumbers[:, None]
    q_d = phi.grid_D.wavenumbers[None, :]
    a = np.array(phi.samples)
    if V.is_zero:
        kin = np.exp(1j * hbar * q_s * q_d * dt / m)
        for _ in range(int(steps)):
            a = np.fft.ifft2(np.fft.fft2(a) * kin)
        return phi.with_samples(a)
    dv = _potential_difference(phi, V)
    parts = [(np.exp(-0.5j * w * dt / hbar * dv), np.exp(1j * hbar * q_s * q_d * w * dt / m))
             for w in _substeps(order)]
    for _ in range(int(steps)):
        for half, kin in parts:
            a = np.fft.ifft2(np.fft.fft2(a * half) * kin) * half
    return phi.with_samples(a)


def evolve_pure(psi: WaveFunction1D, V: PotentialSpec, dt: float, steps: int,
                order: int = 2) -> WaveFunction1D:
    """Strang split-step for i hbar psi_t = -hbar^2/(2m) psi'' + V psi."""
    g = psi.grid
    k = g.wavenumbers
    vx = V(g.points)
    parts = [(np.exp(-0.5j * w * dt / psi.hbar * vx), np.exp(-0.5j * psi.hbar * k**2 * w * dt / psi.mass))
             for w in _substeps(order)]
    a = np.array(psi.samples)
    for _ in range(int(steps)):
        for half, kin in parts:
            a = np.fft.ifft(np.fft.fft(a * half) * kin) * half
    return WaveFunction1D(g, a, psi.hbar, psi.mass, psi.energy)


# -- generators ---------------------------------------------------------------

def apply_Q_gen(phi: DensityField) -> DensityField:
    """Q phi = (x - y) phi = -x_D phi."""
    xd = phi.grid_D.points[None, :]
    return phi.with_samples(-xd * phi.samples)


def apply_P_gen(phi: DensityField) -> DensityField:
    """P phi = -i hbar (d_x + d_y) phi = -i hbar d_S phi."""
    return phi.with_samples(-1j * phi.hbar * spectral_derivative(phi.samples, phi.grid_S, 0))


def translate(phi: DensityField, delta: float) -> DensityField:
    """exp(i delta P / hbar) phi, i.e. phi(x_S + delta, x_D)."""
    return phi.with_samples(fourier_shift(phi.samples, phi.grid_S, delta, axis=0))


def pure_commutator_residual(psi: WaveFunction1D) -> float:
    """max |[Q, P] psi - i hbar psi| with Q = x and P = -i hbar d/dx."""
    g, a, hbar = psi.grid, psi.samples, psi.hbar
    x = g.points

    def p(f):
        return -1j * hbar * spectral_derivative(f, g, 0)

    comm = x * p(a) - p(x * a)
    return float(np.max(np.abs(comm - 1j * hbar * a)))


# -- observables --------------------------------------------------------------

def _d_dxD(phi: DensityField, order: int, mode: str):
    if mode == "spectral":
        return spectral_derivative(phi.samples, phi.grid_D, 1, order)
    if mode == "fd":
        return fd_derivative(phi.samples, phi.grid_D, 1, order)
    raise ContractViolation(f"unknown derivative mode {mode!r}")


def _slice(a, phi: DensityField):
    return a[:, phi.grid_D.zero_index()]


def observable_Q(phi: DensityField) -> complex:
    """Q = int x_S phi(x_S, 0) dx_S."""
    return np.sum(phi.grid_S.points * _slice(phi.samples, phi)) * phi.grid_S.dx


def observable_P(phi: DensityField, mode="spectral") -> complex:
    """P = i hbar int d_D phi(x_S, 0) dx_S."""
    d1 = _slice(_d_dxD(phi, 1, mode), phi)
    return 1j * phi.hbar * np.sum(d1) * phi.grid_S.dx


def observable_E(phi: DensityField, V: PotentialSpec = PotentialSpec(), mode="spectral") -> complex:
    """E = int [-hbar^2/(2m) d_D^2 phi + V(x_S) phi] at x_D = 0."""
    d2 = _slice(_d_dxD(phi, 2, mode), phi)
    on = _slice(phi.samples, phi)
    vs = V(phi.grid_S.wrap(phi.grid_S.points))
    integrand = -phi.hbar**2 / (2 * phi.mass) * d2 + vs * on
    return np.sum(integrand) * phi.grid_S.dx


def observables(phi: DensityField, V: PotentialSpec = PotentialSpec(), mode="spectral"):
    q, p, e = observable_Q(phi), observable_P(phi, mode), observable_E(phi, V, mode)
    vals = np.array([q, p, e])
    scale = max(1.0, float(np.max(np.abs(vals.real))))
    return SchrodingerObservables(float(q.real), float(p.real), float(e.real),
                                  float(np.max(np.abs(vals.imag))) / scale)


def _k_slice(Phi: ComplexScalarField2D):
    if Phi.coords != "K_SD":
        raise ContractViolation("momentum-space observables need a K_SD field")
    return Phi.grid_S.points, Phi.samples[:, Phi.grid_D.zero_index()], Phi.grid_S.dx


def observable_P_momentum(Phi: ComplexScalarField2D, hbar=1.0) -> complex:
    """P = int hbar k_S Phi(k_S, 0) dk_S."""
    k, line, dk = _k_slice(Phi)
    return np.sum(hbar * k * line) * dk


def observable_E_momentum(Phi: ComplexScalarField2D, hbar=1.0, mass=1.0,
                          V: PotentialSpec = PotentialSpec()) -> complex:
    """E = int (hbar k_S)^2 / (2m) Phi(k_S, 0) dk_S; valid for free fields only."""
    if not V.is_zero:
        raise ContractViolation("the momentum-space energy formula holds only for V = 0")
    k, line, dk = _k_slice(Phi)
    return np.sum((hbar * k) ** 2 / (2 * mass) * line) * dk


# -- special solutions --------------------------------------------------------

def localized_solution(grid_S, grid_D, x0, k0, sigma, t=0.0, hbar=1.0, mass=1.0,
                       min_points_per_sigma=2.5) -> DensityField:
    """g_sigma(x_S - x0 - hbar k0 t / m) exp(-i k0 x_D).

    ``k0`` must be a wavenumber of ``grid_D`` so the field is periodic in x_D.
    The width only needs to be resolved spectrally: at 2.5 points per sigma the
    Gaussian's spectrum is below 1e-13 at the Nyquist wavenumber.
    """
    center = x0 + hbar * k0 * t / mass
    check_resolution(grid_S, grid_S.wrap(center), sigma, min_points_per_sigma, edge_sigmas=0.0)
    j = k0 / grid_D.dk
    if abs(j - round(j)) > 1e-9:
        raise ContractViolation(f"k0={k0} is not a wavenumber of the x_D grid (dk={grid_D.dk})")
    xs = grid_S.points
    # nearest periodic image of the centre
    dist = np.mod(xs - center + 0.5 * grid_S.L, grid_S.L) - 0.5 * grid_S.L
    prof = gaussian_profile(dist, 0.0, sigma)
    samples = np.outer(prof, np.exp(-1j * k0 * grid_D.points))
    return DensityField(ComplexScalarField2D(grid_S, grid_D, samples, "SD"), hbar, mass)


def localized_momentum_oracle(grid_S, grid_D, x0, k0, sigma) -> np.ndarray:
    """Discrete transform of the t = 0 localized field, in closed form.

    The x_S profile turns into exp(i k_D x0 - sigma^2 k_D^2 / 2) and the plane
    wave in x_D into a Kronecker delta at k_S = k0 of height 1/dk_S.
    """
    kS = grid_D.k_grid()
    kD = grid_S.k_grid().points
    out = np.zeros((grid_D.n, grid_S.n), dtype=complex)
    j = int(round((k0 - kS.x0) / kS.dx))
    out[j, :] = np.exp(1j * kD * x0 - 0.5 * sigma**2 * kD**2) / kS.dx
    return out


@dataclass(frozen=True)
class EnergySpectrum:
    energies: np.ndarray
    states: tuple


def hamiltonian_matrix(grid: UniformGrid1D, V: PotentialSpec, hbar=1.0, mass=1.0,
                       stencil="fd4") -> np.ndarray:
    """Dense periodic Hamiltonian -hbar^2/(2m) D2 + diag(V)."""
    n, h = grid.n, grid.dx
    if stencil == "spectral":
        k2 = grid.wavenumbers**2
        lap = -np.fft.ifft(k2[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0).real
    else:
        coeffs = {"fd2": {0: -2.0, 1: 1.0},
                  "fd4": {0: -2.5, 1: 4.0 / 3.0, 2: -1.0 / 12.0}}.get(stencil)
        if coeffs is None:
            raise ContractViolation(f"unknown stencil {stencil!r}")
        lap = np.zeros((n, n))
        idx = np.arange(n)
        for off, c in coeffs.items():
            lap[idx, (idx + off) % n] += c
            if off:
                lap[idx, (idx - off) % n] += c
        lap /= h * h
    return -hbar**2 / (2 * mass) * lap + np.diag(V(grid.points))


def eigensolve_1d(grid: UniformGrid1D, V: PotentialSpec, n_levels: int, hbar=1.0, mass=1.0,
                  stencil="fd4") -> EnergySpectrum:
    """Lowest ``n_levels`` eigenpairs of the discretized Hamiltonian.

    Eigenvectors are normalized to int |psi|^2 dx = 1 with a fixed sign
    (largest-magnitude sample positive).
    """
    H = hamiltonian_matrix(grid, V, hbar, mass, stencil)
    w, v = linalg.eigh(H, subset_by_index=[0, n_levels - 1])
    states = []
    for j in range(n_levels):
        vec = v[:, j] / np.sqrt(grid.dx)
        if vec[np.argmax(np.abs(vec))] < 0:
            vec = -vec
        states.append(WaveFunction1D(grid, vec, hbar, mass, float(w[j])))
    return EnergySpectrum(np.asarray(w), tuple(states))


def stationary_pair(psi_a: WaveFunction1D, psi_b: WaveFunction1D):
    """phi_ab(x, y) = psi_a(x) psi_b*(y) and its beat frequency (E_a - E_b)/hbar."""
    if psi_a.energy is None or psi_b.energy is None or not psi_a.grid.same_as(psi_b.grid):
        raise ContractViolation("stationary_pair needs eigenstates on a common grid")
    xy = ComplexScalarField2D(psi_a.grid, psi_a.grid,
                              np.outer(psi_a.samples, psi_b.samples.conj()), "XY")
    phi = DensityField(sd_view(xy), psi_a.hbar, psi_a.mass)
    return phi, (psi_a.energy - psi_b.energy) / psi_a.hbar


def phase_rate(phi0: DensityField, V: PotentialSpec, dt: float, steps_per_sample: int,
               samples: int, order: int = 2):
    """Evolve and fit the rate of the global phase of <phi0, phi(t)>.

    Returns (rate, times, overlaps, max deviation from a pure phase).
    """
    ref = phi0.samples
    nrm = np.vdot(ref, ref)
    times, ov = [0.0], [1.0 + 0j]
    dev = 0.0
    phi = phi0
    for j in range(1, samples + 1):
        phi = evolve_dm(phi, V, dt, steps_per_sample, order)
        c = np.vdot(ref, phi.samples) / nrm
        dev = max(dev, float(np.max(np.abs(phi.samples - c * ref))))
        times.append(j * steps_per_sample * dt)
        ov.append(c)
    times = np.array(times)
    ph = np.unwrap(np.angle(np.array(ov)))
    rate = np.polyfit(times, ph, 1)[0]
    return float(rate), times, np.array(ov), dev


def lift_grid_pair(n, length):
    """The (x_S, x_D) lift grids for a centred base grid of n points on length L."""
    return lift_grids(UniformGrid1D.centered(n, length))
