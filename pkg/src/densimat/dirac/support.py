"""Where a boosted field is nonzero, sampled finely along the boost direction."""
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ..errors import ContractViolation
from ..kernels import sandwich
from .families import BoostedFamily


@dataclass(frozen=True)
class SupportProfile:
    """max over transverse points and matrix entries of |phi'|, versus
    s = x'_S . n - v t'_S."""

    s: np.ndarray
    magnitude: np.ndarray

    @property
    def peak(self):
        return float(self.magnitude.max())

    def extent(self, threshold):
        """Largest |s| with magnitude >= threshold (absolute)."""
        mask = self.magnitude >= threshold
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(self.s[mask])))

    def centroid(self):
        w = self.magnitude
        return float(np.sum(w * self.s) / np.sum(w))


def boost_axis(fam: BoostedFamily):
    n = fam.n
    hits = [k for k in range(3) if abs(abs(n[k]) - 1.0) < 1e-14]
    if not hits:
        raise ContractViolation("support profiles need a boost along a grid axis")
    return hits[0]


def support_profile(fam: BoostedFamily, t_D=0.0, x_D_par=0.0, refine=8, chunk=64):
    """Profile of the boosted field on the slice (t'_D, x'_D = x_D_par n).

    The rest-frame field is band-limited, so it is resampled along the boost
    axis at ``refine`` times the grid density by direct Fourier summation.
    """
    ax = boost_axis(fam)
    sign = np.sign(fam.n[ax])
    grid = fam.base.grid
    g = grid.axes[ax]
    rest_tD = fam._rest_tD(t_D, tuple(x_D_par * fam.n))
    hat = fam.base.spectrum(0.0, rest_tD)
    others = tuple(k for k in range(3) if k != ax)
    part = np.moveaxis(sfft.ifftn(hat, axes=others), ax, 0)  # (k_ax, t1, t2, 4, 4)
    k = g.wavenumbers
    z = g.x0 + np.arange(g.n * refine) * (g.dx / refine)
    mags = np.empty(z.size)
    nyq = g.n // 2
    for lo in range(0, z.size, chunk):
        zz = z[lo:lo + chunk]
        basis = np.exp(1j * np.outer(zz - g.x0, k))
        basis[:, nyq] = np.cos(k[nyq] * (zz - g.x0))
        vals = np.einsum("zk,k...->z...", basis, part) / g.n
        vals = sandwich(fam.M, vals, fam.M)
        mags[lo:lo + chunk] = np.max(np.abs(vals).reshape(len(zz), -1), axis=1)
    s = sign * z / np.cosh(fam.spec.xi)
    order = np.argsort(s)
    return SupportProfile(s[order], mags[order])
