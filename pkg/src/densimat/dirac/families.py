"""Lazy evaluators for matrix fields phi(t_S, x_S, t_D, x_D).

A family is evaluated one (t_S, t_D, x_D) combination at a time and returns a
:class:`Jet`: the field and its first derivatives at the family's sample
points. Boosted fields reuse the rest-frame grid; the points are mapped to the
moving frame and the quadrature weight shrinks by the Lorentz factor.
"""
from collections import OrderedDict
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.fft as sfft

from ..errors import ContractViolation
from ..grids import Grid3D
from ..kernels import sandwich
from .basis import I4, dirac_basis, dot_n
from .fields import MatrixField, BoostSpec, conjugate_matrices


@dataclass(frozen=True)
class Jet:
    """Field values and first derivatives at a set of points.

    ``phi``, ``d_tS`` and ``d_tD`` have shape (*s, 4, 4); ``d_xS`` and ``d_xD``
    have shape (3, *s, 4, 4). ``points`` has shape (*s, 3) and gives the x_S
    coordinates; ``weight`` is the quadrature weight per point.
    """

    points: np.ndarray
    weight: float
    phi: np.ndarray
    d_tS: np.ndarray
    d_tD: np.ndarray
    d_xS: np.ndarray
    d_xD: np.ndarray

    def map(self, f, flip_D=False):
        """Apply a linear map to every block; D derivatives optionally negated."""
        sD = -1.0 if flip_D else 1.0
        return replace(self, phi=f(self.phi), d_tS=f(self.d_tS), d_tD=sD * f(self.d_tD),
                       d_xS=f(self.d_xS), d_xD=sD * f(self.d_xD))

    @property
    def d_tx(self):
        return 0.5 * self.d_tS - self.d_tD

    @property
    def d_ty(self):
        return 0.5 * self.d_tS + self.d_tD

    @property
    def d_x(self):
        return 0.5 * self.d_xS - self.d_xD

    @property
    def d_y(self):
        return 0.5 * self.d_xS + self.d_xD


class Family:
    mass: float = 1.0

    def jet(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)) -> Jet:
        raise NotImplementedError

    def field(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)):
        return self.jet(t_S, t_D, x_D).phi


def _ifft3(a):
    return sfft.ifftn(a, axes=(0, 1, 2))


class _Cache:
    """Small LRU map for repeated evaluations at the same times."""

    def __init__(self, size=8):
        self.size = size
        self.data = OrderedDict()

    def get(self, key, make):
        if key in self.data:
            self.data.move_to_end(key)
            return self.data[key]
        val = make()
        self.data[key] = val
        if len(self.data) > self.size:
            self.data.popitem(last=False)
        return val


def _closed_exp(Mq, omega, t):
    """exp(-i M t) for M with M^2 = omega^2 I, stacked over modes."""
    c = np.cos(omega * t)[..., None, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(omega > 0, np.sin(omega * t) / np.where(omega > 0, omega, 1.0), t)
    return c * I4 - 1j * s[..., None, None] * Mq


class XDIndependentFamily(Family):
    """Free evolution of a field that does not depend on x_D.

    Per x_S mode q the two time flows act from the left and from the right:
    phi_q(t_S, t_D) = exp(-i L t_x) phi_q exp(-i R t_y) with
    L = alpha.q/2 + m beta, R = alpha.q/2 - m beta, t_x = t_S - t_D/2 and
    t_y = t_S + t_D/2. Both L^2 and R^2 equal (|q|^2/4 + m^2) I, so the
    exponentials are evaluated in closed form.
    """

    def __init__(self, field0: MatrixField, static: bool = False):
        self.field0 = field0
        self.grid = field0.grid
        self.mass = field0.mass
        self.static = static
        b = dirac_basis()
        q = self.grid.wavevectors(first_order=True)
        aq = 0.5 * np.einsum("...k,kij->...ij", q, b.alpha)
        self._L = aq + self.mass * b.beta
        self._R = aq - self.mass * b.beta
        self._q = q
        self._omega = np.sqrt(0.25 * np.sum(q**2, axis=-1) + self.mass**2)
        self._hat0 = sfft.fftn(field0.samples, axes=(0, 1, 2))
        self._points = self.grid.mesh()
        self._jets = _Cache()
        self._fields = _Cache()

    def spectrum(self, t_S, t_D):
        t_x, t_y = t_S - 0.5 * t_D, t_S + 0.5 * t_D
        EL = _closed_exp(self._L, self._omega, t_x)
        ER = _closed_exp(self._R, self._omega, t_y)
        return sandwich(EL, self._hat0, ER)

    def field(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)):
        key = (float(t_S), float(t_D))
        return self._fields.get(key, lambda: _ifft3(self.spectrum(*key)))

    def jet(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)) -> Jet:
        key = (float(t_S), float(t_D))
        return self._jets.get(key, lambda: self._jet(*key))

    def _jet(self, t_S, t_D):
        hat = self.spectrum(t_S, t_D)
        d_tx = -1j * (self._L @ hat)
        d_ty = -1j * (hat @ self._R)
        d_xS = np.stack([_ifft3(1j * self._q[..., k, None, None] * hat) for k in range(3)])
        return Jet(self._points, self.grid.dV, _ifft3(hat), _ifft3(d_tx + d_ty),
                   _ifft3(0.5 * (d_ty - d_tx)), d_xS, np.zeros_like(d_xS))


def propagate_tD(field0: MatrixField, t_D: float) -> MatrixField:
    """The field on the t_S = 0 slice after moving to time difference ``t_D``."""
    if t_D == 0.0:
        return field0.with_samples(field0.samples, kind="")
    return field0.with_samples(XDIndependentFamily(field0).field(0.0, t_D), kind="")


class BoostedFamily(Family):
    """M phi0(Lambda^-1 X') M with M = cosh(xi/2) I + sinh(xi/2) n.alpha.

    The base must be static and independent of x_D, so only the rest-frame
    x_S and t_D of each primed point matter. Samples sit at the images of the
    rest grid points on the requested t'_S slice.
    """

    def __init__(self, base: XDIndependentFamily, spec: BoostSpec):
        if not isinstance(base, XDIndependentFamily) or not base.static:
            raise ContractViolation("boosts need a static field that does not depend on x_D")
        self.base = base
        self.spec = spec
        self.mass = base.mass
        b = dirac_basis()
        n = np.asarray(spec.n)
        self.n = n
        self.M = np.cosh(0.5 * spec.xi) * I4 + np.sinh(0.5 * spec.xi) * dot_n(b.alpha, n)

    @property
    def v(self):
        return self.spec.v

    def _primed_points(self, t_S):
        x = self.base._points
        ch = np.cosh(self.spec.xi)
        par = x @ self.n
        return x + np.multiply.outer(par * (1.0 / ch - 1.0) + self.v * t_S, self.n)

    def _chain(self, d_t, d_x):
        ch, sh = np.cosh(self.spec.xi), np.sinh(self.spec.xi)
        n = self.n
        nd = np.einsum("k,k...->...", n, d_x)
        dt = ch * d_t - sh * nd
        dx = np.stack([-n[j] * sh * d_t + d_x[j] + n[j] * (ch - 1.0) * nd for j in range(3)])
        return dt, dx

    def _rest_tD(self, t_D, x_D):
        return t_D * np.cosh(self.spec.xi) - float(np.dot(x_D, self.n)) * np.sinh(self.spec.xi)

    def field(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)):
        return sandwich(self.M, self.base.field(0.0, self._rest_tD(t_D, x_D)), self.M)

    def jet(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)) -> Jet:
        ch = np.cosh(self.spec.xi)
        j0 = self.base.jet(0.0, self._rest_tD(t_D, x_D))
        dtS, dxS = self._chain(j0.d_tS, j0.d_xS)
        dtD, dxD = self._chain(j0.d_tD, j0.d_xD)
        M = self.M
        sw = lambda a: sandwich(M, a, M)
        return Jet(self._primed_points(t_S), self.base.grid.dV / ch, sw(j0.phi), sw(dtS), sw(dtD),
                   sw(dxS), sw(dxD))


def apply_boost(field0: MatrixField, spec: BoostSpec) -> BoostedFamily:
    return BoostedFamily(XDIndependentFamily(field0, static=True), spec)


class ConjugatedFamily(Family):
    """phi'(x, y) = gamma^2 phi^T(y, x) gamma^2: x_D and t_D change sign."""

    def __init__(self, base: Family):
        self.base = base
        self.mass = base.mass

    def jet(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)) -> Jet:
        j = self.base.jet(t_S, -t_D, tuple(-np.asarray(x_D, dtype=float)))
        return j.map(conjugate_matrices, flip_D=True)

    def field(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)):
        return conjugate_matrices(self.base.field(t_S, -t_D, tuple(-np.asarray(x_D, dtype=float))))


class GaugedFamily(Family):
    """exp(i [theta(x) - theta(y)]) phi(x, y) for a time-independent theta.

    ``theta`` and ``grad_theta`` take points of shape (..., 3) and return
    shapes (...) and (..., 3).
    """

    def __init__(self, base: Family, theta: Callable, grad_theta: Callable):
        self.base = base
        self.mass = base.mass
        self.theta = theta
        self.grad_theta = grad_theta

    def _phase(self, points, x_D):
        xd = np.asarray(x_D, dtype=float)
        return np.exp(1j * (self.theta(points - 0.5 * xd) - self.theta(points + 0.5 * xd)))

    def field(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)):
        j = self.base.jet(t_S, t_D, x_D)
        return self._phase(j.points, x_D)[..., None, None] * self.base.field(t_S, t_D, x_D)

    def jet(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)) -> Jet:
        j = self.base.jet(t_S, t_D, x_D)
        xd = np.asarray(x_D, dtype=float)
        px, py = j.points - 0.5 * xd, j.points + 0.5 * xd
        ph = np.exp(1j * (self.theta(px) - self.theta(py)))[..., None, None]
        gx, gy = np.moveaxis(self.grad_theta(px), -1, 0), np.moveaxis(self.grad_theta(py), -1, 0)
        dS = (gx - gy)[..., None, None]
        dD = (-0.5 * (gx + gy))[..., None, None]
        return replace(j, phi=ph * j.phi, d_tS=ph * j.d_tS, d_tD=ph * j.d_tD,
                       d_xS=ph * (j.d_xS + 1j * dS * j.phi), d_xD=ph * (j.d_xD + 1j * dD * j.phi))


def gauge_phase(base: Family, theta, grad_theta) -> GaugedFamily:
    return GaugedFamily(base, theta, grad_theta)


class LiftFamily(Family):
    """phi(x, y) = psi(x) psi^dagger(y) for a spinor field on a 3-D grid at t = 0.

    Off-diagonal values use band-limited translates of psi; time derivatives
    come from the free Dirac Hamiltonian acting on psi.
    """

    def __init__(self, psi, grid: Grid3D, mass=1.0):
        psi = np.asarray(psi, dtype=np.complex128)
        if psi.shape != grid.shape + (4,):
            raise ContractViolation("spinor must have shape (*grid.shape, 4)")
        self.grid, self.mass = grid, mass
        self._hat = sfft.fftn(psi, axes=(0, 1, 2))
        self._k = grid.wavevectors(first_order=True)
        self._points = grid.mesh()

    def _at(self, shift):
        """psi, grad psi and H0 psi at x + shift."""
        b = dirac_basis()
        ph = np.exp(1j * (self._k @ np.asarray(shift, dtype=float)))[..., None] * self._hat
        psi = _ifft3(ph)
        grad = np.stack([_ifft3(1j * self._k[..., j, None] * ph) for j in range(3)])
        h = self.mass * np.einsum("ij,...j->...i", b.beta, psi)
        for j in range(3):
            h = h - 1j * np.einsum("ij,...j->...i", b.alpha[j], grad[j])
        return psi, grad, h

    def jet(self, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)) -> Jet:
        if t_S != 0.0 or t_D != 0.0:
            raise ContractViolation("the lifted spinor is only available at t_x = t_y = 0")
        xd = np.asarray(x_D, dtype=float)
        px, gx, hx = self._at(-0.5 * xd)
        py, gy, hy = self._at(0.5 * xd)
        outer = lambda a, c: np.einsum("...i,...j->...ij", a, c.conj())
        phi = outer(px, py)
        d_tx = -1j * outer(hx, py)
        d_ty = 1j * outer(px, hy)
        d_xS = np.stack([outer(gx[j], py) + outer(px, gy[j]) for j in range(3)])
        d_xD = np.stack([-0.5 * outer(gx[j], py) + 0.5 * outer(px, gy[j]) for j in range(3)])
        return Jet(self._points, self.grid.dV, phi, d_tx + d_ty, 0.5 * (d_ty - d_tx), d_xS, d_xD)
