"""Pure NumPy implementation of the hot numerical kernels.

This is the reference backend.  ``epkit._core._speedups`` (Cython) mirrors
every function here and is preferred at import time when available; see
``epkit._core.__init__`` for the selection logic and
``benchmarks/bench_kernels.py`` for a timing comparison.

All kernels operate on small dense complex matrices (n <= 8) and use
partial-pivoted Gaussian elimination.  There is no balancing pass: entries
are assumed O(1..100), which holds for every model this package ships.
"""

import numpy as np

#: pivots below RANK_RTOL times the largest pivot count as zero
RANK_RTOL = 1e-8

ABERTH_MAX_ITER = 400


def determinant(a):
    """Determinant via partial-pivoted elimination. Singular input gives 0."""
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    det = 1.0 + 0.0j
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < 1e-300:
            return 0.0 + 0.0j
        if p != k:
            a[[k, p], k:] = a[[p, k], k:]
            det = -det
        det *= a[k, k]
        if k + 1 < n:
            a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k] / a[k, k], a[k, k + 1:])
    return complex(det)


def solve(a, b):
    """Solve a x = b (square, partial pivoting). Raises ZeroDivisionError if singular."""
    a = np.array(a, dtype=np.complex128)
    x = np.array(b, dtype=np.complex128)
    n = a.shape[0]
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < 1e-300:
            raise ZeroDivisionError("singular matrix")
        if p != k:
            a[[k, p], k:] = a[[p, k], k:]
            x[[k, p]] = x[[p, k]]
        m = a[k + 1:, k] / a[k, k]
        a[k + 1:, k + 1:] -= np.outer(m, a[k, k + 1:])
        x[k + 1:] -= m * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def char_poly(a):
    """Coefficients of det(x I - a), ascending in x, via Faddeev-LeVerrier."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[n] = 1.0
    m = a.copy()
    for k in range(1, n + 1):
        c = -np.trace(m) / k
        coeffs[n - k] = c
        if k < n:
            m = a @ (m + c * np.eye(n))
    return coeffs


def polyval(coeffs, x):
    """Evaluate an ascending-coefficient polynomial by Horner's rule."""
    acc = 0.0 + 0.0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return complex(acc)


def poly_roots(coeffs):
    """All roots of an ascending-coefficient polynomial, multiplicities kept.

    Aberth-Ehrlich simultaneous iteration on the monic polynomial, started
    on a perturbed circle (deterministic).  Roots are returned sorted by
    (real, imag).  The caller must pass a trimmed polynomial of degree >= 1.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    c = c / c[-1]
    n = len(c) - 1
    if n == 1:
        return np.array([-c[0]])

    dc = c[1:] * np.arange(1, n + 1)

    # Cauchy-style inclusion radius; rotated start breaks symmetry lock-step
    radius = 1.0 + float(np.max(np.abs(c[:-1])))
    k = np.arange(n)
    z = radius * np.exp(1j * (2.0 * np.pi * k / n + 0.39)) * (1.0 + 1e-3 * k / n)

    absc = np.abs(c)
    active = np.ones(n, dtype=bool)
    for _ in range(ABERTH_MAX_ITER):
        p = np.polyval(c[::-1], z)
        # adaptive stop: |p(z)| below the rounding floor of its own evaluation
        err_scale = np.polyval(absc[::-1], np.abs(z))
        active = np.abs(p) > 1e-15 * np.maximum(err_scale, 1e-300)
        if not active.any():
            break
        pd = np.polyval(dc[::-1], z)
        pd = np.where(pd == 0, 1e-300, pd)
        w = p / pd
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        denom = 1.0 - w * inv.sum(axis=1)
        denom = np.where(denom == 0, 1e-300, denom)
        z = np.where(active, z - w / denom, z)
    order = np.lexsort((z.imag, z.real))
    return z[order]


def _pivot_ranks(a, rtol, scale=None):
    """Pivot magnitudes from one elimination sweep with column tracking."""
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    pivots = []
    free_cols = []
    row = 0
    if scale is None:
        scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        return [], list(range(n)), a
    for col in range(n):
        if row >= n:
            free_cols.append(col)
            continue
        p = row + int(np.argmax(np.abs(a[row:, col])))
        if np.abs(a[p, col]) <= rtol * scale:
            free_cols.append(col)
            continue
        if p != row:
            a[[row, p], :] = a[[p, row], :]
        pivots.append(abs(a[row, col]))
        a[row + 1:, :] -= np.outer(a[row + 1:, col] / a[row, col], a[row, :])
        row += 1
    return pivots, free_cols, a


def rank(a, rtol=RANK_RTOL, scale=None):
    """Numerical rank; pivots below rtol * (largest pivot) count as zero.

    ``scale`` overrides the reference magnitude for the free-column test;
    pass the square of the unsquared matrix scale when ranking (M - e I)^2
    so that a numerically nilpotent square registers as zero.
    """
    pivots, _, _ = _pivot_ranks(a, rtol, scale)
    if not pivots:
        return 0
    largest = max(pivots)
    return sum(1 for p in pivots if p > rtol * largest)


def null_space(a, rtol=RANK_RTOL, scale=None):
    """Basis of the numerical null space, as columns of an (n, k) array.

    If the matrix is numerically rank deficient the basis comes from the
    free columns of the echelon form.  A full-rank (but possibly nearly
    singular) matrix yields the single most-null direction by inverse
    iteration, so k >= 1 always.  ``scale`` supplies the reference
    magnitude when the matrix is a residual of something larger (a shifted
    matrix at an eigenvalue, say), whose own entries understate it.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    _, free_cols, ech = _pivot_ranks(a, rtol, scale)
    if len(free_cols) >= 2:
        vecs = []
        pivot_cols = [c for c in range(n) if c not in free_cols]
        for fc in free_cols:
            v = np.zeros(n, dtype=np.complex128)
            v[fc] = 1.0
            # back-substitute the pivot variables
            for i in range(len(pivot_cols) - 1, -1, -1):
                pc = pivot_cols[i]
                if ech[i, pc] != 0:
                    v[pc] = -(ech[i, :] @ v) / ech[i, pc]
            vecs.append(_canonical(v))
        return np.stack(vecs, axis=1)
    # one-dimensional (or borderline) null space: inverse iteration is sharper
    return _inverse_iteration(a)[:, None]


def null_vector(a, rtol=RANK_RTOL, scale=None):
    """Single most-null right vector (unit norm, canonical phase)."""
    return null_space(a, rtol, scale)[:, 0]


def _inverse_iteration(a):
    n = a.shape[0]
    scale = max(float(np.max(np.abs(a))), 1e-300)
    shifted = np.array(a, dtype=np.complex128)
    # a graded (non-scalar) jitter regularises exactly singular pivots even
    # for traceless matrices, where a multiple of the identity cancels back
    # out of the elimination at first order
    jitter = np.diag(np.arange(1.0, n + 1.0)).astype(np.complex128)
    eps = 1e-14 * scale
    v = np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128)
    for _ in range(3):
        for _ in range(4):
            try:
                w = solve(shifted, v)
            except ZeroDivisionError:
                shifted = shifted + eps * jitter
                eps *= 1e4
                continue
            if np.isfinite(w).all() and np.linalg.norm(w) > 0:
                v = w / np.linalg.norm(w)
            break
    return _canonical(v)


def _canonical(v):
    """Unit norm with the largest-modulus component made real positive."""
    v = v / np.linalg.norm(v)
    i = int(np.argmax(np.abs(v)))
    ph = v[i] / abs(v[i])
    return v / ph
