import numpy as np
import pytest

from cyclostab import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA,
                                reason="numba not installed")


@pytest.fixture()
def rng():
    return np.random.default_rng(7)


def test_eval_rational_grid_parity(rng):
    for _ in range(20):
        num = rng.normal(size=int(rng.integers(1, 6)))
        den = rng.normal(size=int(rng.integers(1, 6)))
        if abs(den[-1]) < 0.1:
            den[-1] = 1.0
        tau = float(rng.uniform(0, 2))
        omegas = rng.uniform(-50, 50, size=200)
        a = _kernels.eval_rational_grid_np(num, den, tau, omegas)
        b = _kernels.eval_rational_grid_nb(num, den, tau, omegas)
        assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, np.max(np.abs(a)))


def test_winding_angle_parity(rng):
    for _ in range(20):
        theta = np.sort(rng.uniform(0, 2 * np.pi, size=300))
        path = np.exp(1j * theta)
        path = np.append(path, path[0])
        px, py = rng.uniform(-0.5, 0.5, size=2)
        a = _kernels.winding_angle_sum_np(path.real, path.imag, px, py)
        b = _kernels.winding_angle_sum_nb(path.real, path.imag, px, py)
        assert a == pytest.approx(b, abs=1e-10)
        assert a == pytest.approx(2 * np.pi, abs=1e-9)


def test_batch_absdet_parity(rng):
    for n in (2, 3, 4):
        xs = rng.normal(size=(50, n)) + 1j * rng.normal(size=(50, n))
        ys = rng.normal(size=(50, n)) + 1j * rng.normal(size=(50, n))
        a = _kernels.batch_absdet_np(xs, ys)
        b = _kernels.batch_absdet_nb(np.ascontiguousarray(xs),
                                     np.ascontiguousarray(ys))
        assert np.max(np.abs(a - b)) < 1e-10 * max(1.0, np.max(a))


def test_batch_absdet_matches_closed_form(rng):
    # |det [[X, Y], [I, S]]| equals |prod(y) + prod(x)| for the cyclic S
    for n in (2, 3, 5):
        xs = rng.normal(size=(20, n)) + 1j * rng.normal(size=(20, n))
        ys = rng.normal(size=(20, n)) + 1j * rng.normal(size=(20, n))
        got = _kernels.batch_absdet_np(xs, ys)
        expected = np.abs(np.prod(ys, axis=1) + np.prod(xs, axis=1))
        assert np.max(np.abs(got - expected)) < 1e-10 * max(1.0, expected.max())


def test_backend_dispatch_consistency():
    assert _kernels.backend_name() in ("numba", "numpy")
    if _kernels.USE_NUMBA:
        assert _kernels.eval_rational_grid is _kernels.eval_rational_grid_nb
    else:
        assert _kernels.eval_rational_grid is _kernels.eval_rational_grid_np
