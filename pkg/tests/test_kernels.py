"""Backend kernels: correctness against NumPy oracles and backend parity."""

import numpy as np
import pytest

from epkit._core import pure

try:
    from epkit._core import _speedups
except ImportError:
    _speedups = None

BACKENDS = [pure] + ([_speedups] if _speedups is not None else [])


def _rng():
    return np.random.default_rng(42)


@pytest.mark.parametrize("kern", BACKENDS)
def test_determinant_matches_numpy(kern):
    rng = _rng()
    for n in (1, 2, 3, 5, 8):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert kern.determinant(a) == pytest.approx(np.linalg.det(a), rel=1e-10)


@pytest.mark.parametrize("kern", BACKENDS)
def test_determinant_singular(kern):
    a = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    assert kern.determinant(a) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("kern", BACKENDS)
def test_solve_roundtrip(kern):
    rng = _rng()
    for n in (2, 4, 7):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        x = kern.solve(a, b)
        assert np.linalg.norm(a @ x - b) < 1e-10 * np.linalg.norm(a)


@pytest.mark.parametrize("kern", BACKENDS)
def test_solve_singular_raises(kern):
    with pytest.raises(ZeroDivisionError):
        kern.solve(np.zeros((2, 2), dtype=complex), np.ones(2, dtype=complex))


@pytest.mark.parametrize("kern", BACKENDS)
def test_char_poly_known(kern):
    c = kern.char_poly(np.diag([1.0, 2.0]).astype(complex))
    assert np.allclose(c, [2.0, -3.0, 1.0])
    c = kern.char_poly(np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex))
    assert np.allclose(c, [1.0, 0.0, 1.0])


@pytest.mark.parametrize("kern", BACKENDS)
def test_char_poly_matches_eigenvalues(kern):
    rng = _rng()
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    coeffs = kern.char_poly(a)
    for lam in np.linalg.eigvals(a):
        assert abs(kern.polyval(coeffs, lam)) < 1e-8 * np.sum(np.abs(coeffs))


@pytest.mark.parametrize("kern", BACKENDS)
def test_poly_roots_simple(kern):
    roots = kern.poly_roots(np.array([1.0, 0.0, 1.0], dtype=complex))
    assert min(abs(roots - 1j)) < 1e-12
    assert min(abs(roots + 1j)) < 1e-12


@pytest.mark.parametrize("kern", BACKENDS)
def test_poly_roots_multiplicity(kern):
    # (x - 1)^2 (x + 2) expanded, ascending
    coeffs = np.array([2.0, -3.0, 0.0, 1.0], dtype=complex)
    roots = np.sort_complex(kern.poly_roots(coeffs))
    assert abs(roots[0] + 2.0) < 1e-10
    assert abs(roots[1] - 1.0) < 1e-6
    assert abs(roots[2] - 1.0) < 1e-6


@pytest.mark.parametrize("kern", BACKENDS)
def test_poly_roots_reconstruct(kern):
    rng = _rng()
    for deg in (2, 4, 7):
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        coeffs[-1] = 1.0
        roots = kern.poly_roots(coeffs)
        rebuilt = np.array([1.0], dtype=complex)
        for r in roots:
            rebuilt = np.convolve(rebuilt, [-r, 1.0])
        assert np.allclose(rebuilt, coeffs, rtol=1e-8, atol=1e-8 * np.max(np.abs(coeffs)))


@pytest.mark.parametrize("kern", BACKENDS)
def test_poly_roots_deterministic_order(kern):
    coeffs = np.array([-6.0, 11.0, -6.0, 1.0], dtype=complex)  # roots 1, 2, 3
    a = kern.poly_roots(coeffs)
    b = kern.poly_roots(coeffs)
    assert np.array_equal(a, b)
    assert np.all(np.diff(a.real) >= -1e-12)


@pytest.mark.parametrize("kern", BACKENDS)
def test_rank_and_null_space(kern):
    assert kern.rank(np.zeros((3, 3), dtype=complex)) == 0
    assert kern.rank(np.eye(3, dtype=complex)) == 3
    a = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]], dtype=complex)
    assert kern.rank(a) == 2
    ns = kern.null_space(a)
    assert ns.shape[1] >= 1
    for k in range(ns.shape[1]):
        assert np.linalg.norm(a @ ns[:, k]) < 1e-8


@pytest.mark.parametrize("kern", BACKENDS)
def test_null_vector_near_singular(kern):
    rng = _rng()
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    w, v = np.linalg.eig(a)
    shifted = a - w[0] * np.eye(4)
    x = kern.null_vector(shifted)
    assert np.linalg.norm(shifted @ x) < 1e-10 * np.linalg.norm(a)


@pytest.mark.skipif(_speedups is None, reason="compiled kernels not built")
def test_backend_parity():
    rng = _rng()
    for n in (2, 4, 6, 8):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert _speedups.determinant(a) == pytest.approx(pure.determinant(a), rel=1e-12)
        assert np.allclose(_speedups.char_poly(a), pure.char_poly(a), rtol=1e-12)
        assert np.allclose(_speedups.solve(a, b), pure.solve(a, b), rtol=1e-10)
        assert np.allclose(
            _speedups.poly_roots(pure.char_poly(a)),
            pure.poly_roots(pure.char_poly(a)),
            rtol=1e-8,
            atol=1e-8,
        )
        assert np.allclose(
            _speedups.null_vector(a - np.linalg.eigvals(a)[0] * np.eye(n)),
            pure.null_vector(a - np.linalg.eigvals(a)[0] * np.eye(n)),
            rtol=1e-8,
            atol=1e-8,
        )
