"""Residuals of the two-time equations on family jets."""
import numpy as np

from .basis import dirac_basis
from .families import Family, Jet
from .observables import FD4_OFFSETS


def residual_left(j: Jet, mass, eA=None):
    """i gamma^mu (d/dx^mu - i e A_mu(x)) phi - m phi, pointwise.

    ``eA`` optionally holds e A^mu(x) as shape (4, *s); A_0 = A^0, A_k = -A^k.
    """
    g = dirac_basis().gamma
    r = 1j * (g[0] @ j.d_tx) - mass * j.phi
    dx = j.d_x
    for k in range(3):
        r = r + 1j * (g[k + 1] @ dx[k])
    if eA is not None:
        lower = [eA[0], -eA[1], -eA[2], -eA[3]]
        for mu in range(4):
            r = r + lower[mu][..., None, None] * (g[mu] @ j.phi)
    return r


def residual_right(j: Jet, mass, eA=None):
    """i (d/dy^mu + i e A_mu(y)) phi gamma^0 gamma^mu + m phi gamma^0, pointwise."""
    b = dirac_basis()
    cm = b.current_matrices
    r = 1j * (j.d_ty @ cm[0]) + mass * (j.phi @ b.gamma[0])
    dy = j.d_y
    for k in range(3):
        r = r + 1j * (dy[k] @ cm[k + 1])
    if eA is not None:
        lower = [eA[0], -eA[1], -eA[2], -eA[3]]
        for mu in range(4):
            r = r - lower[mu][..., None, None] * (j.phi @ cm[mu])
    return r


def adjoint_swap(r_left_swapped):
    """-R_left(y, x)^dagger gamma^0: the right residual implied by the left one."""
    g0 = dirac_basis().gamma[0]
    return -(np.swapaxes(r_left_swapped, -1, -2).conj() @ g0)


def residual_covariant(family: Family, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)):
    """(max |R_left|, max |R_right|) at one evaluation slice."""
    j = family.jet(t_S, t_D, x_D)
    m = family.mass
    return float(np.max(np.abs(residual_left(j, m)))), float(np.max(np.abs(residual_right(j, m))))


def residual_time_fd(family: Family, t_S=0.0, t_D=0.0, h=1e-3, static=False):
    """Residuals of the t_x and t_y equations with time derivatives from
    fourth-order differences of the family in t_D (and t_S unless ``static``)."""
    b = dirac_basis()
    j = family.jet(t_S, t_D)
    d_tD = sum(c * family.field(t_S, t_D + o * h) for o, c in FD4_OFFSETS) / h
    if static:
        d_tS = np.zeros_like(d_tD)
    else:
        d_tS = sum(c * family.field(t_S + o * h, t_D) for o, c in FD4_OFFSETS) / h
    d_tx = 0.5 * d_tS - d_tD
    d_ty = 0.5 * d_tS + d_tD
    m = family.mass
    r_tx = 1j * d_tx - m * (b.beta @ j.phi)
    r_ty = 1j * d_ty + m * (j.phi @ b.beta)
    dx, dy = j.d_x, j.d_y
    for k in range(3):
        r_tx = r_tx + 1j * (b.alpha[k] @ dx[k])
        r_ty = r_ty + 1j * (dy[k] @ b.alpha[k])
    return float(np.max(np.abs(r_tx))), float(np.max(np.abs(r_ty)))


def swap_defect(family: Family, t_S=0.0, t_D=0.0, x_D=(0.0, 0.0, 0.0)):
    """max |phi(x_S, -x_D, -t_D) - phi(x_S, x_D, t_D)^dagger|."""
    a = family.field(t_S, t_D, x_D)
    b = family.field(t_S, -t_D, tuple(-np.asarray(x_D, dtype=float)))
    return float(np.max(np.abs(b - np.swapaxes(a, -1, -2).conj())))
