"""Charge, energy, momentum, spin and currents from the x_D = 0, t_D = 0 slice."""
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation
from .basis import dirac_basis, trace_with
from .families import Family, Jet, XDIndependentFamily
from .fields import MatrixField

FD4_OFFSETS = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))


@dataclass(frozen=True)
class DiracObservables:
    Q: float
    E: float
    P: tuple
    S: tuple
    imag_residual: float = 0.0

    def as_row(self):
        return [self.Q, self.E, *self.P, *self.S]


def as_family(obj) -> Family:
    if isinstance(obj, Family):
        return obj
    if isinstance(obj, MatrixField):
        return XDIndependentFamily(obj)
    raise ContractViolation(f"cannot evaluate observables of {type(obj).__name__}")


def xD_derivatives(family: Family, t_S=0.0, mode="fd", h=0.05, jet0: Jet = None):
    """d phi / d x_D,k at x_D = 0, shape (3, *s, 4, 4).

    ``fd``: fourth-order central differences over the family with step h.
    ``exact``: the derivative carried by the jet.
    """
    if mode == "exact":
        return (jet0 or family.jet(t_S)).d_xD
    if mode != "fd":
        raise ContractViolation(f"unknown derivative mode {mode!r}")
    out = []
    for k in range(3):
        acc = 0.0
        for off, c in FD4_OFFSETS:
            xd = np.zeros(3)
            xd[k] = off * h
            acc = acc + c * family.field(t_S, 0.0, tuple(xd))
        out.append(acc / h)
    return np.stack(out)


def current_J(jet_or_phi, e=1.0):
    """J^mu = e Tr(phi gamma^0 gamma^mu), shape (4, *s)."""
    phi = jet_or_phi.phi if isinstance(jet_or_phi, Jet) else np.asarray(jet_or_phi)
    cm = dirac_basis().current_matrices
    return e * np.stack([trace_with(cm[mu], phi) for mu in range(4)])


def energy_density(phi, d_xD, mass):
    b = dirac_basis()
    dens = mass * trace_with(b.beta, phi)
    for k in range(3):
        dens = dens + 1j * trace_with(b.alpha[k], d_xD[k])
    return dens


def momentum_density(d_xD):
    """P_i density = i Tr(d phi / d x_D,i), shape (3, *s)."""
    return 1j * np.trace(d_xD, axis1=-2, axis2=-1)


def spin_density(phi):
    b = dirac_basis()
    return np.stack([0.5 * trace_with(b.Sigma[i], phi) for i in range(3)])


def angular_density(points, phi, d_xD):
    """Orbital density x cross P and spin density, both shape (3, *s)."""
    p = momentum_density(d_xD)
    x = np.moveaxis(points, -1, 0)
    return np.cross(x, p, axis=0), spin_density(phi)


def observables(obj, t_S=0.0, mode="fd", h=None, sigma=None) -> DiracObservables:
    """Quadratures of charge, energy, momentum and spin densities.

    The fd step defaults to sigma/20 when ``sigma`` is given, otherwise 0.05.
    """
    fam = as_family(obj)
    if h is None:
        h = sigma / 20.0 if sigma is not None else 0.05
    j0 = fam.jet(t_S)
    dxd = xD_derivatives(fam, t_S, mode, h, j0)
    w = j0.weight
    axes = tuple(range(j0.phi.ndim - 2))
    tot = lambda a: np.sum(a, axis=axes) * w
    Q = tot(np.trace(j0.phi, axis1=-2, axis2=-1))
    E = tot(energy_density(j0.phi, dxd, fam.mass))
    P = np.array([tot(p) for p in momentum_density(dxd)])
    S = np.array([tot(s) for s in spin_density(j0.phi)])
    vals = np.concatenate([[Q, E], P, S])
    return DiracObservables(float(Q.real), float(E.real), tuple(float(p.real) for p in P),
                            tuple(float(s.real) for s in S), float(np.max(np.abs(vals.imag))))


def charge_Q(obj, t_S=0.0):
    j = as_family(obj).jet(t_S)
    return float(np.sum(np.trace(j.phi, axis1=-2, axis2=-1)).real * j.weight)


def continuity_defect(family: Family, t_S=0.0, h=1e-2):
    """max |d_t J^0 + div J| on the slice, with a fourth-order difference in t_S."""
    dt = 0.0
    for off, c in FD4_OFFSETS:
        dt = dt + c * current_J(family.jet(t_S + off * h))[0]
    dt = dt / h
    j = family.jet(t_S)
    alpha = dirac_basis().alpha
    div = sum(trace_with(alpha[k], j.d_xS[k]) for k in range(3))
    scale = float(np.max(np.abs(current_J(j)[0])))
    return float(np.max(np.abs(dt + div))) / scale
