# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Mirrors epkit._core.pure function by function."""

import numpy as np

cimport cython

DEF MAXN = 9

ABERTH_MAX_ITER = 400
RANK_RTOL = 1e-8


def determinant(a):
    cdef double complex[:, :] m = np.array(a, dtype=np.complex128)
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t k, i, j, p
    cdef double complex det = 1.0, piv, factor, tmp
    cdef double best
    for k in range(n):
        p = k
        best = abs(m[k, k])
        for i in range(k + 1, n):
            if abs(m[i, k]) > best:
                best = abs(m[i, k])
                p = i
        if abs(m[p, k]) < 1e-300:
            return 0j
        if p != k:
            for j in range(k, n):
                tmp = m[k, j]
                m[k, j] = m[p, j]
                m[p, j] = tmp
            det = -det
        piv = m[k, k]
        det = det * piv
        for i in range(k + 1, n):
            factor = m[i, k] / piv
            for j in range(k + 1, n):
                m[i, j] = m[i, j] - factor * m[k, j]
    return complex(det)


def solve(a, b):
    cdef double complex[:, :] m = np.array(a, dtype=np.complex128)
    x_arr = np.array(b, dtype=np.complex128)
    cdef double complex[:] x = x_arr
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t k, i, j, p
    cdef double complex piv, factor, tmp, acc
    cdef double best
    for k in range(n):
        p = k
        best = abs(m[k, k])
        for i in range(k + 1, n):
            if abs(m[i, k]) > best:
                best = abs(m[i, k])
                p = i
        if abs(m[p, k]) < 1e-300:
            raise ZeroDivisionError("singular matrix")
        if p != k:
            for j in range(k, n):
                tmp = m[k, j]
                m[k, j] = m[p, j]
                m[p, j] = tmp
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
        piv = m[k, k]
        for i in range(k + 1, n):
            factor = m[i, k] / piv
            for j in range(k + 1, n):
                m[i, j] = m[i, j] - factor * m[k, j]
            x[i] = x[i] - factor * x[k]
    for k in range(n - 1, -1, -1):
        acc = x[k]
        for j in range(k + 1, n):
            acc = acc - m[k, j] * x[j]
        x[k] = acc / m[k, k]
    return x_arr


def char_poly(a):
    """det(x I - a) coefficients, ascending, by Faddeev-LeVerrier."""
    cdef double complex[:, :] aa = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = aa.shape[0]
    out = np.zeros(n + 1, dtype=np.complex128)
    cdef double complex[:] coeffs = out
    cdef double complex[MAXN][MAXN] m
    cdef double complex[MAXN][MAXN] nxt
    cdef Py_ssize_t i, j, l, k
    cdef double complex c, tr, acc
    coeffs[n] = 1.0
    for i in range(n):
        for j in range(n):
            m[i][j] = aa[i, j]
    for k in range(1, n + 1):
        tr = 0.0
        for i in range(n):
            tr = tr + m[i][i]
        c = -tr / k
        coeffs[n - k] = c
        if k < n:
            for i in range(n):
                m[i][i] = m[i][i] + c
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for l in range(n):
                        acc = acc + aa[i, l] * m[l][j]
                    nxt[i][j] = acc
            for i in range(n):
                for j in range(n):
                    m[i][j] = nxt[i][j]
    return out


def polyval(coeffs, x):
    cdef double complex[:] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef double complex z = x
    cdef double complex acc = 0.0
    cdef Py_ssize_t k
    for k in range(c.shape[0] - 1, -1, -1):
        acc = acc * z + c[k]
    return complex(acc)


def poly_roots(coeffs):
    """Aberth-Ehrlich iteration; same start and stop rules as the pure backend."""
    c_arr = np.asarray(coeffs, dtype=np.complex128)
    c_arr = c_arr / c_arr[-1]
    cdef Py_ssize_t n = c_arr.shape[0] - 1
    if n == 1:
        return np.array([-c_arr[0]])
    cdef double complex[:] c = c_arr
    absc_arr = np.abs(c_arr)
    cdef double[:] absc = absc_arr
    dc_arr = c_arr[1:] * np.arange(1, n + 1)
    cdef double complex[:] dc = dc_arr

    cdef double radius = 1.0 + float(np.max(absc_arr[:n]))
    z_arr = radius * np.exp(1j * (2.0 * np.pi * np.arange(n) / n + 0.39)) \
        * (1.0 + 1e-3 * np.arange(n) / n)
    cdef double complex[:] z = z_arr
    cdef double complex p, pd, w, s, denom
    cdef double err_scale, az
    cdef Py_ssize_t it, i, j, k
    cdef bint any_active
    for it in range(ABERTH_MAX_ITER):
        any_active = False
        for i in range(n):
            p = 0.0
            for k in range(n, -1, -1):
                p = p * z[i] + c[k]
            az = abs(z[i])
            err_scale = 0.0
            for k in range(n, -1, -1):
                err_scale = err_scale * az + absc[k]
            if abs(p) <= 1e-15 * (err_scale if err_scale > 1e-300 else 1e-300):
                continue
            any_active = True
            pd = 0.0
            for k in range(n - 1, -1, -1):
                pd = pd * z[i] + dc[k]
            if pd == 0:
                pd = 1e-300
            w = p / pd
            s = 0.0
            for j in range(n):
                if j != i:
                    s = s + 1.0 / (z[i] - z[j])
            denom = 1.0 - w * s
            if denom == 0:
                denom = 1e-300
            z[i] = z[i] - w / denom
        if not any_active:
            break
    order = np.lexsort((z_arr.imag, z_arr.real))
    return z_arr[order]


def _pivot_ranks(a, double rtol, scale_in=None):
    cdef double complex[:, :] m = np.array(a, dtype=np.complex128)
    cdef Py_ssize_t n = m.shape[0]
    pivots = []
    free_cols = []
    cdef Py_ssize_t row = 0, col, i, j, p
    cdef double best, scale = 0.0
    cdef double complex factor, tmp
    if scale_in is None:
        for i in range(n):
            for j in range(n):
                if abs(m[i, j]) > scale:
                    scale = abs(m[i, j])
    else:
        scale = scale_in
    if scale == 0.0:
        return [], list(range(n)), np.asarray(m)
    for col in range(n):
        if row >= n:
            free_cols.append(col)
            continue
        p = row
        best = abs(m[row, col])
        for i in range(row + 1, n):
            if abs(m[i, col]) > best:
                best = abs(m[i, col])
                p = i
        if best <= rtol * scale:
            free_cols.append(col)
            continue
        if p != row:
            for j in range(n):
                tmp = m[row, j]
                m[row, j] = m[p, j]
                m[p, j] = tmp
        pivots.append(best)
        for i in range(row + 1, n):
            factor = m[i, col] / m[row, col]
            for j in range(n):
                m[i, j] = m[i, j] - factor * m[row, j]
        row += 1
    return pivots, free_cols, np.asarray(m)


def rank(a, double rtol=RANK_RTOL, scale=None):
    pivots, _, _ = _pivot_ranks(a, rtol, scale)
    if not pivots:
        return 0
    cdef double largest = max(pivots)
    return sum(1 for p in pivots if p > rtol * largest)


def null_space(a, double rtol=RANK_RTOL, scale=None):
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    _, free_cols, ech = _pivot_ranks(a, rtol, scale)
    if len(free_cols) >= 2:
        vecs = []
        pivot_cols = [c for c in range(n) if c not in free_cols]
        for fc in free_cols:
            v = np.zeros(n, dtype=np.complex128)
            v[fc] = 1.0
            for i in range(len(pivot_cols) - 1, -1, -1):
                pc = pivot_cols[i]
                if ech[i, pc] != 0:
                    v[pc] = -(ech[i, :] @ v) / ech[i, pc]
            vecs.append(_canonical(v))
        return np.stack(vecs, axis=1)
    return _inverse_iteration(a)[:, None]


def null_vector(a, double rtol=RANK_RTOL, scale=None):
    return null_space(a, rtol, scale)[:, 0]


def _inverse_iteration(a):
    n = a.shape[0]
    scale = max(float(np.max(np.abs(a))), 1e-300)
    shifted = np.array(a, dtype=np.complex128)
    # graded jitter: a scalar shift cancels out of the elimination for
    # traceless matrices and can leave the pivot at exactly zero again
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
    v = v / np.linalg.norm(v)
    i = int(np.argmax(np.abs(v)))
    ph = v[i] / abs(v[i])
    return v / ph
