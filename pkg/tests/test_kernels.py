import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densimat import kernels
from densimat.kernels import _fallback

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")


def _cplx(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_fallback_sandwich_is_matmul():
    rng = np.random.default_rng(0)
    a, x, b = (_cplx(rng, (5, 4, 4)) for _ in range(3))
    out = kernels.sandwich(a, x, b, use_compiled=False)
    assert np.allclose(out, a @ x @ b, atol=1e-13)


@compiled
@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40), st.integers(1, 6), st.booleans(), st.integers(0, 2**31))
def test_sandwich_backends_agree(n1, n2, broadcast, seed):
    rng = np.random.default_rng(seed)
    x = _cplx(rng, (n1, n2, 4, 4))
    left = _cplx(rng, (4, 4)) if broadcast else _cplx(rng, (n1, n2, 4, 4))
    right = _cplx(rng, (n1, 1, 4, 4))
    a = kernels.sandwich(left, x, right, use_compiled=True)
    b = kernels.sandwich(left, x, right, use_compiled=False)
    assert np.max(np.abs(a - b)) < 1e-12


@compiled
@pytest.mark.parametrize("shape,spacing", [((4, 64), (0.1,)), ((4, 8, 10, 12), (0.3, 0.4, 0.5))])
def test_wave_step_backends_agree(shape, spacing):
    rng = np.random.default_rng(3)
    prev, cur, src = (rng.normal(size=shape) for _ in range(3))
    a = kernels.wave_step(prev, cur, src, 0.05, spacing, use_compiled=True)
    b = kernels.wave_step(prev, cur, src, 0.05, spacing, use_compiled=False)
    assert np.max(np.abs(a - b)) < 1e-13


def test_wave_step_preserves_a_static_solution():
    n = 64
    x = np.arange(n) * 0.1
    u = np.stack([np.sin(2 * np.pi * x / 6.4)] * 2)
    lam = (2 - 2 * np.cos(2 * np.pi * 0.1 / 6.4)) / 0.01
    out = kernels.wave_step(u, u, lam * u, 0.05, (0.1,))
    assert np.max(np.abs(out - u)) < 1e-12


def test_wave_step_rejects_2d():
    with pytest.raises(ValueError):
        kernels.wave_step(np.zeros((1, 4, 4)), np.zeros((1, 4, 4)), np.zeros((1, 4, 4)), 0.1, (1, 1))


def test_fallback_matches_reference_formula():
    rng = np.random.default_rng(4)
    prev, cur, src = (rng.normal(size=(2, 16)) for _ in range(3))
    out = _fallback.wave_step_1d(prev, cur, src, 0.1, 0.2)
    lap = (np.roll(cur, -1, 1) - 2 * cur + np.roll(cur, 1, 1)) / 0.04
    assert np.allclose(out, 2 * cur - prev + 0.01 * (lap + src))
