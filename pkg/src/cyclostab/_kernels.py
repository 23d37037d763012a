"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The backend is chosen once at import time from the CYCLOSTAB_BACKEND
environment variable ("numba" or "numpy"). Default is numba when the
package is importable, falling back to numpy otherwise. Both variants of
every kernel stay importable (``*_np`` / ``*_nb``) so tests and the
benchmark script can compare them directly.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


def _pick_backend():
    choice = os.environ.get("CYCLOSTAB_BACKEND", "").strip().lower()
    if choice in ("numpy", "np"):
        return False
    if choice in ("numba", "jit"):
        return HAVE_NUMBA
    return HAVE_NUMBA


USE_NUMBA = _pick_backend()


# ---------------------------------------------------------------------------
# rational frequency response over a grid
# ---------------------------------------------------------------------------

def eval_rational_grid_np(num, den, tau, omegas):
    """num(i*w)/den(i*w) * exp(-i*tau*w) for every w, ascending coefficients."""
    s = 1j * omegas
    nv = np.polynomial.polynomial.polyval(s, num)
    dv = np.polynomial.polynomial.polyval(s, den)
    out = nv / dv
    if tau != 0.0:
        out = out * np.exp(-1j * tau * omegas)
    return np.asarray(out, dtype=np.complex128)


@njit(cache=True)
def eval_rational_grid_nb(num, den, tau, omegas):
    m = omegas.shape[0]
    out = np.empty(m, dtype=np.complex128)
    for j in range(m):
        s = 1j * omegas[j]
        nv = 0.0 + 0.0j
        for k in range(num.shape[0] - 1, -1, -1):
            nv = nv * s + num[k]
        dv = 0.0 + 0.0j
        for k in range(den.shape[0] - 1, -1, -1):
            dv = dv * s + den[k]
        val = nv / dv
        if tau != 0.0:
            val = val * np.exp(-1j * tau * omegas[j])
        out[j] = val
    return out


# ---------------------------------------------------------------------------
# winding angle accumulation along a polyline
# ---------------------------------------------------------------------------

def winding_angle_sum_np(re, im, px, py):
    """Total signed angle swept about (px, py) along consecutive path points."""
    dx = re - px
    dy = im - py
    ang = np.arctan2(dy, dx)
    inc = np.diff(ang)
    inc = (inc + np.pi) % (2.0 * np.pi) - np.pi
    return float(np.sum(inc))


@njit(cache=True)
def winding_angle_sum_nb(re, im, px, py):
    total = 0.0
    prev = np.arctan2(im[0] - py, re[0] - px)
    for j in range(1, re.shape[0]):
        cur = np.arctan2(im[j] - py, re[j] - px)
        inc = cur - prev
        if inc > np.pi:
            inc -= 2.0 * np.pi
        elif inc < -np.pi:
            inc += 2.0 * np.pi
        total += inc
        prev = cur
    return total


# ---------------------------------------------------------------------------
# batched |det| of the cyclic interconnection matrix [[X, Y], [I, S]]
# ---------------------------------------------------------------------------

def _interconnection_batch(xs, ys):
    m, n = xs.shape
    mats = np.zeros((m, 2 * n, 2 * n), dtype=np.complex128)
    idx = np.arange(n)
    mats[:, idx, idx] = xs
    mats[:, idx, n + idx] = ys
    mats[:, n + idx, idx] = 1.0
    mats[:, n + 1 + idx[:-1], n + idx[:-1]] = 1.0
    mats[:, n, 2 * n - 1] = -1.0
    return mats


def batch_absdet_np(xs, ys):
    """|det [[diag(x), diag(y)], [I, S]]| for every sample row of xs, ys."""
    return np.abs(np.linalg.det(_interconnection_batch(xs, ys)))


@njit(cache=True)
def batch_absdet_nb(xs, ys):
    m, n = xs.shape
    out = np.empty(m, dtype=np.float64)
    base = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for k in range(n):
        base[n + k, k] = 1.0
    for k in range(n - 1):
        base[n + 1 + k, n + k] = 1.0
    base[n, 2 * n - 1] = -1.0
    for j in range(m):
        mat = base.copy()
        for k in range(n):
            mat[k, k] = xs[j, k]
            mat[k, n + k] = ys[j, k]
        out[j] = np.abs(np.linalg.det(mat))
    return out


if USE_NUMBA:
    eval_rational_grid = eval_rational_grid_nb
    winding_angle_sum = winding_angle_sum_nb
    batch_absdet = batch_absdet_nb
else:
    eval_rational_grid = eval_rational_grid_np
    winding_angle_sum = winding_angle_sum_np
    batch_absdet = batch_absdet_np


def backend_name():
    return "numba" if USE_NUMBA else "numpy"


def warmup():
    """Trigger JIT compilation of the active kernels on tiny inputs."""
    w = np.array([0.0, 1.0])
    eval_rational_grid(np.array([1.0]), np.array([1.0, 1.0]), 0.5, w)
    winding_angle_sum(np.array([1.0, 0.0, -1.0]), np.array([0.0, 1.0, 0.0]), 0.0, 0.0)
    z = np.ones((2, 2), dtype=np.complex128)
    batch_absdet(z, z)
