"""Matrix fields phi(x_S) that do not depend on x_D, and operations on them."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.transform import Rotation

from ..errors import ContractViolation
from ..grids import Grid3D, check_resolution, fourier_shift
from ..kernels import sandwich
from .basis import I4, dirac_basis, dot_n

KINDS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class MatrixField:
    """4x4 complex matrices sampled on a 3-D x_S grid; constant in x_D.

    ``samples`` has shape (n1, n2, n3, 4, 4).
    """

    grid: Grid3D
    samples: np.ndarray
    mass: float = 1.0
    kind: str = ""

    def __post_init__(self):
        a = np.array(self.samples, dtype=np.complex128)
        if a.shape != self.grid.shape + (4, 4):
            raise ContractViolation(f"samples shape {a.shape} does not match grid {self.grid.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "samples", a)

    def with_samples(self, samples, kind=None):
        return MatrixField(self.grid, samples, self.mass, self.kind if kind is None else kind)

    def __add__(self, other):
        return self.with_samples(self.samples + other.samples, kind="")

    def scaled(self, c):
        return self.with_samples(c * self.samples, kind="")


@dataclass(frozen=True)
class BoostSpec:
    xi: float
    n: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", _unit(self.n))

    @classmethod
    def from_velocity(cls, v, n):
        if not abs(v) < 1:
            raise ContractViolation(f"boost speed must satisfy |v| < 1, got {v}")
        return cls(float(np.arctanh(v)), n)

    @property
    def v(self):
        return float(np.tanh(self.xi))

    @property
    def gamma(self):
        return float(np.cosh(self.xi))


@dataclass(frozen=True)
class RotationSpec:
    theta: float
    n: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", _unit(self.n))


def _unit(n):
    n = np.asarray(n, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ContractViolation(f"direction must be a unit vector, |n| = {np.linalg.norm(n)!r}")
    return tuple(float(c) for c in n)


# -- special fields ------------------------------------------------------------

def gaussian3d(grid: Grid3D, sigma, center=(0.0, 0.0, 0.0)):
    """Unit-mass 3-D Gaussian and its gradient (analytic), shapes (*s) and (3, *s)."""
    x = grid.mesh() - np.asarray(center, dtype=float)
    g = np.exp(-0.5 * np.sum(x**2, axis=-1) / sigma**2) / (sigma * np.sqrt(2 * np.pi)) ** 3
    grad = np.moveaxis(-x / sigma**2, -1, 0) * g
    return g, grad


def rest_solution(kind: str, sigma: float, mass: float, grid: Grid3D,
                  center=(0.0, 0.0, 0.0), min_points_per_sigma=2.0) -> MatrixField:
    """One of the four static particle-at-rest fields with delta -> g_sigma.

    A and B carry charge +1 with spin +1/2 and -1/2; C and D carry charge -1
    with spin -1/2 and +1/2.
    """
    if kind not in KINDS:
        raise ContractViolation(f"kind must be one of {KINDS}, got {kind!r}")
    if not mass > 0:
        raise ContractViolation("mass must be positive")
    for ax, c in zip(grid.axes, center):
        check_resolution(ax, c, sigma, min_points_per_sigma)
    d, (d1, d2, d3) = gaussian3d(grid, sigma, center)
    m4 = 4 * mass * d
    i = 1j
    phi = np.zeros(grid.shape + (4, 4), dtype=np.complex128)
    if kind == "A":
        phi[..., 0, 0] = m4
        phi[..., 0, 2] = i * d3
        phi[..., 0, 3] = i * d1 + d2
        phi[..., 2, 0] = -i * d3
        phi[..., 3, 0] = d2 - i * d1
    elif kind == "B":
        phi[..., 1, 1] = m4
        phi[..., 1, 2] = i * d1 - d2
        phi[..., 1, 3] = -i * d3
        phi[..., 2, 1] = -i * d1 - d2
        phi[..., 3, 1] = i * d3
    elif kind == "C":
        phi[..., 0, 2] = -i * d3
        phi[..., 1, 2] = d2 - i * d1
        phi[..., 2, 0] = i * d3
        phi[..., 2, 1] = i * d1 + d2
        phi[..., 2, 2] = -m4
    else:
        phi[..., 0, 3] = -i * d1 - d2
        phi[..., 1, 3] = i * d3
        phi[..., 3, 0] = i * d1 - d2
        phi[..., 3, 1] = -i * d3
        phi[..., 3, 3] = -m4
    return MatrixField(grid, phi / (4 * mass), mass, kind)


def lift_spinor_slice(psi, grid: Grid3D, mass=1.0) -> MatrixField:
    """Pointwise psi psi^dagger, i.e. the lifted field on the x_D = 0 slice.

    ``psi`` has shape (*grid.shape, 4). The full x_D dependence is available
    from :class:`densimat.dirac.families.LiftFamily`.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    return MatrixField(grid, np.einsum("...i,...j->...ij", psi, psi.conj()), mass, "lift")


def pointwise_hermiticity_defect(field: MatrixField) -> float:
    a = field.samples
    return float(np.max(np.abs(a - np.swapaxes(a, -1, -2).conj())))


# -- free residual ----------------------------------------------------------------

def spectral_gradient(samples, grid: Grid3D):
    """d/dx_k of an array shaped (*grid.shape, ...), returned as (3, *shape)."""
    a = np.asarray(samples)
    spec = np.fft.fftn(a, axes=(0, 1, 2))
    kv = grid.wavevectors(first_order=True)
    extra = (None,) * (a.ndim - 3)
    out = [np.fft.ifftn(1j * kv[(...,) + (j,)][(...,) + extra] * spec, axes=(0, 1, 2))
           for j in range(3)]
    return np.stack(out)


def free_hamiltonian_slice(field: MatrixField, grad=None):
    """H0 phi for a field constant in x_D:
    -(i/2)(alpha_k d_k phi + d_k phi alpha_k) + m (beta phi - phi beta)."""
    b = dirac_basis()
    phi = field.samples
    if grad is None:
        grad = spectral_gradient(phi, field.grid)
    h = field.mass * (b.beta @ phi - phi @ b.beta)
    for k in range(3):
        h = h - 0.5j * (b.alpha[k] @ grad[k] + grad[k] @ b.alpha[k])
    return h


def residual_free(field: MatrixField, d_t=None) -> float:
    """max |i d_t phi - H0 phi| with d_t phi = 0 for static candidates."""
    r = free_hamiltonian_slice(field)
    if d_t is not None:
        r = 1j * d_t - r
    return float(np.max(np.abs(r)))


# -- rotations ---------------------------------------------------------------------

def rotation_unitary(theta, n):
    """U = cos(theta/2) I - i sin(theta/2) n . Sigma."""
    b = dirac_basis()
    return np.cos(0.5 * theta) * I4 - 1j * np.sin(0.5 * theta) * dot_n(b.Sigma, n)


def rotation_generator(field_samples, n):
    """n . R phi with R_k phi = -Sigma_k phi / 2 + phi Sigma_k / 2 (spin part)."""
    s = dot_n(dirac_basis().Sigma, n)
    return -0.5 * (s @ field_samples) + 0.5 * (field_samples @ s)


_PLANES = {0: (1, 2), 1: (2, 0), 2: (0, 1)}  # rotation about axis k turns a -> b


def _rotate_plane(a, grid: Grid3D, axis, theta):
    """f(R^-1 x) for a rotation by theta about coordinate ``axis``.

    Angles are reduced to |theta| <= pi/2 with exact index-reversal flips, then
    applied as three band-limited shears.
    """
    theta = float(np.mod(theta + np.pi, 2 * np.pi) - np.pi)
    p, q = _PLANES[axis]
    if abs(theta) > 0.5 * np.pi:
        for ax in (p, q):
            g = grid.axes[ax]
            if abs(g.x0 + 0.5 * g.L) > 1e-12 * g.L:
                raise ContractViolation("rotations need grids centred on the origin")
            idx = (-np.arange(g.n)) % g.n
            a = np.take(a, idx, axis=ax)
        theta -= np.copysign(np.pi, theta)
    if theta == 0.0:
        return a
    t, s = np.tan(0.5 * theta), -np.sin(theta)

    def shear(arr, along, by, c):
        shape = [1] * arr.ndim
        shape[by] = -1
        shift = c * grid.axes[by].points.reshape(shape)
        return fourier_shift(arr, grid.axes[along], shift, axis=along)

    a = shear(a, p, q, t)
    a = shear(a, q, p, s)
    return shear(a, p, q, t)


def rotate_samples(a, grid: Grid3D, theta, n):
    """Resample an array (*grid.shape, ...) at R^-1 x for the rotation (theta, n)."""
    n = np.asarray(n, dtype=float)
    theta = float(np.mod(theta, 4 * np.pi))
    if np.isclose(np.mod(theta, 2 * np.pi), 0.0, atol=1e-15):
        return np.asarray(a)
    axis = [k for k in range(3) if abs(abs(n[k]) - 1.0) < 1e-14]
    if axis:
        k = axis[0]
        return _rotate_plane(np.asarray(a), grid, k, theta * np.sign(n[k]))
    al, be, ga = Rotation.from_rotvec(theta * n).as_euler("ZYZ")
    out = _rotate_plane(np.asarray(a), grid, 2, ga)
    out = _rotate_plane(out, grid, 1, be)
    return _rotate_plane(out, grid, 2, al)


def apply_rotation(field: MatrixField, spec: RotationSpec) -> MatrixField:
    """phi'(x) = U phi(R^-1 x) U^dagger."""
    if np.isclose(np.mod(spec.theta, 2 * np.pi), 0.0, atol=1e-15):
        # U = +-I: the bilinear is unchanged
        return field.with_samples(field.samples, kind="")
    U = rotation_unitary(spec.theta, spec.n)
    moved = rotate_samples(field.samples, field.grid, spec.theta, spec.n)
    return field.with_samples(sandwich(U, moved, U.conj().T), kind="")


# -- charge conjugation ------------------------------------------------------------

def conjugate_matrices(a):
    """gamma^2 a^T gamma^2 over trailing (4, 4) blocks."""
    g2 = dirac_basis().gamma2
    return sandwich(g2, np.swapaxes(a, -1, -2), g2)


def charge_conjugate(field: MatrixField) -> MatrixField:
    """phi'(x, y) = gamma^2 phi^T(y, x) gamma^2; the swap is trivial for x_D-independent fields."""
    return field.with_samples(conjugate_matrices(field.samples), kind="")
