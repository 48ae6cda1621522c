"""Self-contained dense complex linear algebra for small matrices (n <= 8).

Determinants, characteristic polynomials, simultaneous-iteration root
finding, right/left eigenvectors and defectiveness diagnostics.  Everything
funnels through the kernel backend in ``epkit._core`` (compiled when
available, pure NumPy otherwise); NumPy's own eigensolver is deliberately
not used anywhere in this package, so tests can treat it as an independent
oracle.

Conventions
-----------
* Spectra are returned sorted lexicographically by (real, imag) unless a
  tracking operation supplies its own order.
* Eigenvector k of an ``EigenSystem`` is ``right_vectors[k]`` (a row of the
  stacked array), and similarly for left vectors.  Left/right pairs are
  normalised to <u_k, v_k> = 1 whenever the pairing is above the defect
  threshold; the pairing here is the bilinear one (no conjugation), as
  appropriate for biorthogonal systems.
* No balancing or scaling pass is applied; matrix entries are assumed to be
  O(1..100), which all shipped models satisfy.
"""

from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import DegreeZero, NotAnEigenvalue

MAX_DIM = 8

#: |<u, v>| (unit vectors) below this marks a near-defective pair
DEFECT_THRESHOLD = 1e-6

#: relative eigenvalue distance treated as one cluster; a numerically double
#: root splits by about sqrt(machine epsilon), well inside this
CLUSTER_RTOL = 1e-6


def as_matrix(m):
    """Validate and convert to a square complex matrix, 1 <= n <= 8."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"dimension {n} outside 1..{MAX_DIM}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


class Polynomial:
    """Dense polynomial with ascending complex coefficients."""

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        self.coeffs = c

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        return _core.polyval(self.coeffs, x)

    def derivative(self):
        if self.degree == 0:
            return Polynomial([0.0])
        return Polynomial(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def monic(self):
        return Polynomial(self.coeffs / self.coeffs[-1])

    def trimmed(self, rtol):
        """Drop leading coefficients below rtol times the largest one."""
        c = self.coeffs
        floor = rtol * float(np.max(np.abs(c)))
        k = len(c)
        while k > 1 and abs(c[k - 1]) <= floor:
            k -= 1
        return Polynomial(c[:k])

    def __repr__(self):
        return f"Polynomial(degree={self.degree})"


@dataclass
class EigenSystem:
    """Eigenvalues with paired right/left vectors and defect diagnostics.

    ``right_vectors[k]`` / ``left_vectors[k]`` belong to ``eigenvalues[k]``;
    ``pairing_residuals[k]`` is max(|Mv - Ev|, |uM - Eu|) / |M|_F and
    ``defect_flags[k]`` marks members of near-defective clusters.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    pairing_residuals: np.ndarray
    defect_flags: np.ndarray


@dataclass
class DefectReport:
    eigenvalue: complex
    geometric_multiplicity: int
    algebraic_multiplicity: int
    jordan_residual: float
    is_defective: bool


def determinant(m):
    """det(m) by partial-pivoted elimination; deterministic, 0 if singular."""
    return _core.determinant(as_matrix(m))


def char_poly(m):
    """Characteristic polynomial det(x I - m), ascending coefficients."""
    return Polynomial(_core.char_poly(as_matrix(m)))


def poly_roots(p):
    """All roots of ``p`` (with multiplicity), sorted by (real, imag).

    Parameters
    ----------
    p : Polynomial or coefficient sequence, ascending degree.

    Raises
    ------
    DegreeZero
        If the polynomial is constant.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    if p.degree < 1:
        raise DegreeZero("cannot take roots of a constant polynomial")
    return _core.poly_roots(p.coeffs)


def solve(m, b):
    """Square linear solve through the kernel backend."""
    return _core.solve(as_matrix(m), np.asarray(b, dtype=np.complex128))


def eig(m, left=True, defect_threshold=DEFECT_THRESHOLD, pair_normalize=True):
    """Full eigensystem of a small dense complex matrix.

    Eigenvalues are the roots of the characteristic polynomial; vectors come
    from the null space of (m - E I) via pivoted elimination (refined by
    inverse iteration), the left problem from the transpose.  Near-defective
    clusters are reported through ``defect_flags``, never raised.

    Set ``left=False`` to skip left vectors and biorthogonal pairing (the
    ``left_vectors`` array is then all zeros); tracking loops use this to
    halve the work.  ``pair_normalize=False`` keeps left vectors at unit
    norm instead of scaling them to <u_k, v_k> = 1 (monodromy transport
    needs the raw pairing magnitude).
    """
    a = as_matrix(m)
    n = a.shape[0]
    values = _core.poly_roots(_core.char_poly(a))
    norm_a = float(np.linalg.norm(a))
    scale = max(1.0, float(np.max(np.abs(values))))

    right = np.zeros((n, n), dtype=np.complex128)
    left_vs = np.zeros((n, n), dtype=np.complex128)
    eye = np.eye(n)

    # group near-equal roots so genuine degeneracies get independent vectors
    clusters = _cluster(values, CLUSTER_RTOL * scale)
    shift_scale = float(np.max(np.abs(a))) + float(np.max(np.abs(values)))
    for idxs in clusters:
        center = values[idxs].mean()
        # the root-finder noise of the cluster sets how small a pivot can be
        # while still representing a genuine null direction
        spread = max((abs(values[k] - center) for k in idxs), default=0.0)
        rtol = max(_core.RANK_RTOL, 3.0 * spread / shift_scale)
        basis = _core.null_space(a - center * eye, rtol, shift_scale)
        for j, k in enumerate(idxs):
            right[k] = basis[:, min(j, basis.shape[1] - 1)]
        if left:
            lbasis = _core.null_space((a - center * eye).T, rtol, shift_scale)
            for j, k in enumerate(idxs):
                left_vs[k] = lbasis[:, min(j, lbasis.shape[1] - 1)]

    defect_flags = np.zeros(n, dtype=bool)
    residuals = np.zeros(n)
    for k in range(n):
        r_res = np.linalg.norm(a @ right[k] - values[k] * right[k])
        residuals[k] = r_res / max(norm_a, 1e-300)
        if left:
            l_res = np.linalg.norm(left_vs[k] @ a - values[k] * left_vs[k])
            residuals[k] = max(residuals[k], l_res / max(norm_a, 1e-300))

    if left:
        # biorthogonalise cluster by cluster, then normalise <u_k, v_k> = 1
        for idxs in clusters:
            if len(idxs) > 1:
                g = left_vs[idxs] @ right[idxs].T
                if abs(_core.determinant(g)) > DEFECT_THRESHOLD:
                    block = left_vs[idxs]
                    left_vs[idxs] = np.stack(
                        [_core.solve(g, col) for col in block.T], axis=1
                    )
        for k in range(n):
            norm_u = np.linalg.norm(left_vs[k])
            if norm_u > 0:
                left_vs[k] = left_vs[k] / norm_u
            pairing = left_vs[k] @ right[k]
            if abs(pairing) <= defect_threshold:
                defect_flags[k] = True
            elif pair_normalize:
                left_vs[k] = left_vs[k] / pairing

    return EigenSystem(values, right, left_vs, residuals, defect_flags)


def defect_report(m, e, cluster_radius=None):
    """Multiplicity diagnostics for an eigenvalue (or near-eigenvalue) ``e``.

    Geometric multiplicity is n - rank(m - e I); algebraic multiplicity is
    n - rank((m - e I)^2), which is exact for the pairwise coalescences this
    package targets.  The Jordan residual |(m - e I)^2 w| is reported for
    the generalised vector w solving (m - e I) w = v in the damped
    least-squares sense; it vanishes at a true EP.

    Raises NotAnEigenvalue when ``e`` is farther from the spectrum than
    ``cluster_radius`` (default 1e-6 * max(1, |m|_F)).
    """
    a = as_matrix(m)
    n = a.shape[0]
    norm_a = float(np.linalg.norm(a))
    if cluster_radius is None:
        cluster_radius = 1e-6 * max(1.0, norm_a)
    roots = _core.poly_roots(_core.char_poly(a))
    if float(np.min(np.abs(roots - e))) > cluster_radius:
        raise NotAnEigenvalue(
            f"{e} is {np.min(np.abs(roots - e)):.3e} from the spectrum "
            f"(cluster radius {cluster_radius:.3e})"
        )

    shifted = a - e * np.eye(n)
    geometric = n - _core.rank(shifted)
    # reference the squared matrix against (|M - eI| scale)^2, otherwise a
    # numerically nilpotent square looks like a full-rank tiny matrix
    scale_sq = max(float(np.max(np.abs(shifted))), 1e-300) ** 2
    algebraic = n - _core.rank(shifted @ shifted, scale=scale_sq)
    geometric = max(geometric, 1)
    algebraic = max(algebraic, geometric)

    v = _core.null_vector(shifted)
    w = _ridge_solve(shifted, v)
    jordan_residual = float(np.linalg.norm(shifted @ (shifted @ w)))

    return DefectReport(
        eigenvalue=complex(e),
        geometric_multiplicity=geometric,
        algebraic_multiplicity=algebraic,
        jordan_residual=jordan_residual,
        is_defective=geometric < algebraic,
    )


def _ridge_solve(a, b):
    """Damped least-squares solve of a x = b (a possibly singular)."""
    n = a.shape[0]
    ah = a.conj().T
    lam = max(1e-12 * float(np.linalg.norm(a)) ** 2, 1e-150)
    return _core.solve(ah @ a + lam * np.eye(n), ah @ b)


def _cluster(values, radius):
    """Indices grouped by transitive closeness within ``radius``."""
    n = len(values)
    groups = []
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        stack = [i]
        while stack:
            j = stack.pop()
            for k in range(n):
                if not used[k] and abs(values[k] - values[j]) <= radius:
                    used[k] = True
                    group.append(k)
                    stack.append(k)
        groups.append(sorted(group))
    return groups
