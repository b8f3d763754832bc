"""Pure numpy versions of the compiled kernels (same signatures, same results)."""
import numpy as np


def sandwich(left, x, right):
    return np.matmul(left, np.matmul(x, right))


def wave_step_1d(prev, cur, src, dt, dx):
    lap = (np.roll(cur, -1, axis=1) - 2.0 * cur + np.roll(cur, 1, axis=1)) / dx**2
    return 2.0 * cur - prev + dt * dt * (lap + src)


def wave_step_3d(prev, cur, src, dt, dx, dy, dz):
    lap = np.zeros_like(cur)
    for axis, h in ((1, dx), (2, dy), (3, dz)):
        lap += (np.roll(cur, -1, axis=axis) - 2.0 * cur + np.roll(cur, 1, axis=axis)) / h**2
    return 2.0 * cur - prev + dt * dt * (lap + src)
