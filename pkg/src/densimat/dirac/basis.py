"""Dirac matrices in the standard (Dirac) representation."""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128)

I2 = np.eye(2, dtype=np.complex128)
I4 = np.eye(4, dtype=np.complex128)


def _blocks(a, b, c, d):
    return np.block([[a, b], [c, d]])


@dataclass(frozen=True)
class DiracBasis:
    beta: np.ndarray
    alpha: np.ndarray  # (3, 4, 4)
    gamma: np.ndarray  # (4, 4, 4), gamma[0] = beta, gamma[k] = beta alpha_k
    Sigma: np.ndarray  # (3, 4, 4), diag(sigma_k, sigma_k)

    @property
    def gamma2(self):
        return self.gamma[2]

    @property
    def current_matrices(self):
        """gamma^0 gamma^mu for mu = 0..3, i.e. (I, alpha_1, alpha_2, alpha_3)."""
        return np.einsum("ij,mjk->mik", self.gamma[0], self.gamma)


@lru_cache(maxsize=None)
def dirac_basis() -> DiracBasis:
    z = np.zeros((2, 2), dtype=np.complex128)
    beta = _blocks(I2, z, z, -I2)
    alpha = np.stack([_blocks(z, s, s, z) for s in PAULI])
    gamma = np.stack([beta] + [beta @ a for a in alpha])
    Sigma = np.stack([_blocks(s, z, z, s) for s in PAULI])
    for arr in (beta, alpha, gamma, Sigma):
        arr.flags.writeable = False
    return DiracBasis(beta, alpha, gamma, Sigma)


def trace_with(mat, field):
    """Tr(mat @ field) over trailing (4, 4) blocks."""
    return np.einsum("ij,...ji->...", mat, field)


def dot_n(mats, n):
    """n . mats for a (3, 4, 4) stack."""
    return np.einsum("k,kij->ij", np.asarray(n, dtype=float), mats)
