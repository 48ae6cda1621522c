"""Generic exceptional-point machinery over parameterized matrix families.

A :class:`MatrixFamily` wraps an evaluator from one complex parameter to a
small dense matrix.  Families with two real knobs (the oscillator's f and g)
pack them as real/imaginary parts of that parameter.  On top of this the
module provides

* the simultaneous coalescence conditions and a damped Newton search,
* the resultant route that eliminates the frequency and leaves a quintic
  in the oscillator's spring constant,
* eigenvalue branch tracking with adaptive refinement, monodromy loops
  with eigenvector transport, and the branch-exponent estimator,
* the biorthogonal expansion used to exhibit the two-term reduction near
  an EP.

Eigenvector transport convention: at each accepted step the unit right and
left vectors are rotated by the phase that maximises overlap with their
predecessors, and the monodromy observable is the biorthogonally
normalised vector v / sqrt(<u, v>) with the square root continued along
the path.  "Eigenvalues restore after 2 loops, eigenvectors after 4" is a
statement about exactly this convention: the pairing <u, v> vanishes like
the square root of the distance to the EP, so the normalised vector
carries a fourth-root branch structure.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _core
from .errors import (
    ConvergedToDegenerate,
    DefectiveBasis,
    DegenerateFamily,
    FitUnstable,
    NoConvergence,
    TrackingAmbiguous,
)
from .linalg import DefectReport, Polynomial, defect_report, eig
from .oscillator import build_M, physical_frequency, secular_poly

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
TRACK_FLOOR = 1e-12
AMBIGUITY_FACTOR = 2.0


@dataclass(frozen=True)
class MatrixFamily:
    """Analytic matrix family over one complex parameter.

    ``evaluator`` maps the packed parameter to a dim x dim complex matrix
    and must be deterministic (holomorphy is assumed, not verified).
    ``spectral_form`` selects the coalescence conditions:

    * "frequency":  det(i w I - M) and its w-derivative (driven systems),
    * "eigenvalue": det(M - E I) and its E-derivative.

    ``param_names`` documents the packing, e.g. ("f", "g") means
    z = f + i g, while ("lambda",) means z is the parameter itself.
    """

    evaluator: object
    param_names: tuple
    dim: int
    spectral_form: str = "eigenvalue"

    def matrix(self, z):
        return np.asarray(self.evaluator(z), dtype=np.complex128)

    def unpack(self, z):
        z = complex(z)
        if len(self.param_names) == 2:
            return {self.param_names[0]: z.real, self.param_names[1]: z.imag}
        return {self.param_names[0]: z}


def two_level_family(sys):
    from .twolevel import build_h

    return MatrixFamily(
        evaluator=lambda lam: build_h(sys, lam),
        param_names=("lambda",),
        dim=2,
        spectral_form="eigenvalue",
    )


def oscillator_fg_family(base):
    """Oscillator family with z = f + i g free, other parameters fixed."""

    def evaluate(z):
        z = complex(z)
        return build_M(base.with_coupling(f=z.real, g=z.imag))

    return MatrixFamily(evaluate, ("f", "g"), 4, "frequency")


def oscillator_f_family(base):
    """Oscillator family over complex spring constant f at fixed g."""

    def evaluate(f):
        return build_M(base.with_coupling(f=complex(f)))

    return MatrixFamily(evaluate, ("f",), 4, "frequency")


@dataclass
class ExceptionalPoint:
    """A converged EP record with its residuals and defect diagnostics."""

    params: dict
    param: complex
    frequency: complex
    matrix_eigenvalue: complex
    eigenvector: np.ndarray = None
    left_eigenvector: np.ndarray = None
    det_residual: float = 0.0
    deriv_residual: float = 0.0
    defect: DefectReport = None
    self_orthogonality: float = 0.0


@dataclass
class BranchTrack:
    path: np.ndarray
    branches: np.ndarray  # (n_branches, n_points)
    matching_cost: float


@dataclass
class MonodromyResult:
    permutation: tuple
    loops_to_restore_eigenvalues: int
    loops_to_restore_eigenvector: int
    accumulated_phase: complex
    branch_overlaps: np.ndarray = field(default=None, repr=False)


def _spectral_value(family, z, omega):
    """(condition value, its derivative) plus the coefficient scale."""
    p = _core.char_poly(family.matrix(z))
    dp = p[1:] * np.arange(1, len(p))
    scale = float(np.max(np.abs(p)))
    if family.spectral_form == "frequency":
        x = 1j * omega
        return _core.polyval(p, x), 1j * _core.polyval(dp, x), scale
    n = len(p) - 1
    sign = (-1.0) ** n
    return (
        sign * _core.polyval(p, omega),
        sign * _core.polyval(dp, omega),
        scale,
    )


def coalescence_residual(family, z, omega):
    """The simultaneous coalescence conditions at (parameter, frequency).

    For "frequency" families this is (det(i w I - M), d/dw det); for
    "eigenvalue" families (det(M - E I), d/dE det).  Both vanish together
    exactly at an EP; the derivative is evaluated analytically from the
    characteristic polynomial coefficients.
    """
    value, deriv, _ = _spectral_value(family, z, omega)
    return value, deriv


def _matrix_eigenvalue(family, omega):
    return 1j * omega if family.spectral_form == "frequency" else complex(omega)


def newton_ep_search(family, seed_param, seed_omega, tol=NEWTON_TOL,
                     max_iter=NEWTON_MAX_ITER):
    """Damped Newton iteration on the 4-real-dimensional coalescence system.

    Unknowns are (Re z, Im z, Re w, Im w) where z is the family parameter
    and w the spectral variable; the residual stacks real and imaginary
    parts of both coalescence conditions.  The Jacobian is forward finite
    differences; steps are halved until the residual norm decreases.

    Returns a fully verified :class:`ExceptionalPoint`.

    Raises
    ------
    NoConvergence
        Residual still above ``tol`` x coefficient scale after
        ``max_iter`` iterations.
    ConvergedToDegenerate
        The limit matrix has a two-dimensional eigenspace (a genuine
        degeneracy, not an EP).
    """
    x = np.array(
        [
            complex(seed_param).real,
            complex(seed_param).imag,
            complex(seed_omega).real,
            complex(seed_omega).imag,
        ]
    )

    def residual(vec):
        value, deriv, scale = _spectral_value(
            family, complex(vec[0], vec[1]), complex(vec[2], vec[3])
        )
        return (
            np.array([value.real, value.imag, deriv.real, deriv.imag]) / scale
        )

    r = residual(x)
    # iterate to the rounding floor, not merely to ``tol``: the determinant
    # is quadratically flat at a double root, so a residual of tol still
    # allows a root split of sqrt(tol)
    for _ in range(max_iter):
        if float(np.max(np.abs(r))) <= 1e-15:
            break
        jac = np.zeros((4, 4))
        for j in range(4):
            h = 1e-7 * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            jac[:, j] = (residual(xp) - r) / h
        try:
            step = _core.solve(jac.astype(np.complex128), r.astype(np.complex128))
        except ZeroDivisionError:
            break
        step = step.real
        damping = 1.0
        norm0 = float(np.linalg.norm(r))
        for _ in range(25):
            cand = x - damping * step
            rc = residual(cand)
            if float(np.linalg.norm(rc)) < norm0:
                x, r = cand, rc
                break
            damping *= 0.5
        else:
            break

    if float(np.max(np.abs(r))) > tol:
        raise NoConvergence(
            f"residual {float(np.max(np.abs(r))):.3e} above {tol:.1e} "
            f"after at most {max_iter} iterations"
        )
    z = complex(x[0], x[1])
    omega = complex(x[2], x[3])
    return _assemble_ep(family, z, omega)


def _assemble_ep(family, z, omega):
    m = family.matrix(z)
    mu = _matrix_eigenvalue(family, omega)
    value, deriv, scale = _spectral_value(family, z, omega)

    # the root pair at a det-residual of r still splits by ~sqrt(r)
    radius = 1e-5 * max(1.0, abs(mu), float(np.linalg.norm(m)))
    report = defect_report(m, mu, cluster_radius=radius)
    if report.geometric_multiplicity >= 2:
        raise ConvergedToDegenerate(
            f"eigenspace at {mu} is {report.geometric_multiplicity}-dimensional"
        )

    shifted = m - mu * np.eye(family.dim)
    v = _core.null_vector(shifted)
    u = _core.null_vector(shifted.T)
    # at an EP the left-right pairing of unit vectors vanishes; a genuine
    # degeneracy approached to finite precision keeps it O(1) even when the
    # rank tests cannot tell the two apart
    if abs(u @ v) > 1e-3:
        raise ConvergedToDegenerate(
            f"left-right pairing {abs(u @ v):.2e} stays finite: genuine "
            "degeneracy, not a coalescence"
        )
    return ExceptionalPoint(
        params=family.unpack(z),
        param=z,
        frequency=omega,
        matrix_eigenvalue=mu,
        eigenvector=v,
        left_eigenvector=u,
        det_residual=abs(value) / scale,
        deriv_residual=abs(deriv) / scale,
        defect=report,
        self_orthogonality=float(abs(u @ v)),
    )


def grid_scan(family, re_range, im_range, n=41, threshold=0.1):
    """Heat-map seeding for the Newton search.

    Scans an n x n grid of the packed parameter.  The score at each node is
    min over spectrum of (|condition| + |condition derivative|) / scale,
    which vanishes at an EP.  Grid-local minima with score below
    ``threshold`` are returned as (parameter, frequency, score) seeds,
    best first.
    """
    res = np.linspace(re_range[0], re_range[1], n)
    ims = np.linspace(im_range[0], im_range[1], n)
    score = np.full((n, n), np.inf)
    omega_best = np.zeros((n, n), dtype=np.complex128)
    for i, re in enumerate(res):
        for j, im in enumerate(ims):
            z = complex(re, im)
            p = _core.char_poly(family.matrix(z))
            dp = p[1:] * np.arange(1, len(p))
            scale = float(np.max(np.abs(p)))
            roots = _core.poly_roots(p)
            vals = np.array(
                [abs(_core.polyval(dp, r)) / scale for r in roots]
            )
            k = int(np.argmin(vals))
            score[i, j] = vals[k]
            mu = roots[k]
            omega_best[i, j] = -1j * mu if family.spectral_form == "frequency" else mu
    seeds = []
    for i in range(n):
        for j in range(n):
            if score[i, j] >= threshold:
                continue
            window = score[max(0, i - 1): i + 2, max(0, j - 1): j + 2]
            if score[i, j] <= window.min():
                seeds.append(
                    (complex(res[i], ims[j]), complex(omega_best[i, j]),
                     float(score[i, j]))
                )
    seeds.sort(key=lambda s: s[2])
    return seeds


# ---------------------------------------------------------------------------
# resultant route (oscillator specific)


def _sylvester(pc, qc):
    """Sylvester matrix of two polynomials given by ascending coefficients."""
    m, n = len(pc) - 1, len(qc) - 1
    size = m + n
    s = np.zeros((size, size), dtype=np.complex128)
    for i in range(n):
        s[i, i: i + m + 1] = pc[::-1]
    for i in range(m):
        s[n + i, i: i + n + 1] = qc[::-1]
    return s


def resultant_quintic_in_f(params):
    """Eliminate the frequency from the coalescence conditions.

    The secular quartic has coefficients linear in f, so the resultant of
    (quartic, its w-derivative) is a polynomial in f of degree at most 7
    whose top coefficients vanish identically; removing that content leaves
    the quintic whose roots are the candidate EP spring constants at the
    given g.  Computed by evaluating the Sylvester determinant at integer
    f nodes and fitting the exact degree (no symbolic algebra needed).

    Raises DegenerateFamily if the eliminant vanishes identically.
    """
    nodes = np.arange(-4.0, 4.0)
    vals = np.zeros(len(nodes), dtype=np.complex128)
    for i, fv in enumerate(nodes):
        pc = secular_poly(params, f=fv).coeffs
        qc = pc[1:] * np.arange(1, len(pc))
        vals[i] = _core.determinant(_sylvester(pc, qc))
    mag = float(np.max(np.abs(vals)))
    if mag == 0.0:
        raise DegenerateFamily("resultant vanishes identically")
    vander = np.vander(nodes, len(nodes), increasing=True).astype(np.complex128)
    coeffs = _core.solve(vander, vals / mag) * mag
    quintic = Polynomial(coeffs).trimmed(1e-9)
    if quintic.degree < 1:
        raise DegenerateFamily("eliminant has no f dependence")
    return quintic


def tune_g_for_real_f(params, g_range, samples=61, im_tol=1e-8):
    """Scan g for EPs at a real, positive spring constant.

    Real-f EPs are isolated in g: a conjugate pair of quintic roots touches
    the real axis at the magic g and lifts off again.  The scan therefore
    tracks each root branch across a g grid and drives every local minimum
    of |Im f| to the axis by golden-section search (|Im f| goes like
    sqrt|g - g*| near the touch, so derivative-free minimisation is the
    right tool).  Hits are validated against the secular quartic and
    filtered to f > 0 with a damped frequency.

    Returns (g, f, omega_ep) triples, omega in the physical Im < 0
    convention with Re >= 0, sorted by g.  Branches that are real across
    the whole grid (the overdamped one) are reported wherever admissible.
    """
    gs = np.linspace(float(g_range[0]), float(g_range[1]), samples)

    def roots_at(g):
        return _core.poly_roots(
            resultant_quintic_in_f(params.with_coupling(g=float(g))).coeffs
        )

    hits = []

    def consider(g, fval):
        if abs(fval.imag) > im_tol * max(1.0, abs(fval)):
            return
        fr = float(fval.real)
        if fr <= 0.0:
            return
        quartic = secular_poly(params.with_coupling(f=fr, g=float(g)))
        roots = _core.poly_roots(quartic.coeffs)
        pairs = [
            (abs(roots[a] - roots[b]), a, b)
            for a in range(4)
            for b in range(a + 1, 4)
        ]
        _, a, b = min(pairs)
        w = (roots[a] + roots[b]) / 2.0
        if w.imag < -1e-9:
            return
        w_phys = physical_frequency(w)
        if w_phys.real < 0:
            w_phys = -w_phys.conjugate()
        hits.append((float(g), fr, w_phys))

    # track the five branches across the grid by nearest matching
    table = np.zeros((samples, 5), dtype=np.complex128)
    table[0] = roots_at(gs[0])
    for i in range(1, samples):
        current = roots_at(gs[i])
        order = []
        used = set()
        for r0 in table[i - 1]:
            k = min(
                (abs(current[t] - r0), t)
                for t in range(len(current))
                if t not in used
            )[1]
            used.add(k)
            order.append(k)
        table[i] = current[order]

    for i in range(samples):
        for r in table[i]:
            consider(gs[i], r)

    for b in range(5):
        dips = np.abs(table[:, b].imag)
        for i in range(1, samples - 1):
            if (
                dips[i] <= dips[i - 1]
                and dips[i] <= dips[i + 1]
                and dips[i] > 0.0
                and dips[i] < 0.1 * max(1.0, abs(table[i, b]))
            ):
                g_star, f_star = _minimise_im(
                    roots_at, gs[i - 1], gs[i + 1], table[i, b]
                )
                consider(g_star, f_star)

    uniq = []
    for h in sorted(hits):
        if not any(
            abs(h[0] - u[0]) <= 1e-6 * max(1.0, abs(u[0]))
            and abs(h[1] - u[1]) <= 1e-6 * max(1.0, abs(u[1]))
            for u in uniq
        ):
            uniq.append(h)
    return uniq


def _minimise_im(roots_at, g_lo, g_hi, ref_root):
    """Golden-section minimisation of |Im f| for one tracked quintic root."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0

    def branch_im(g):
        roots = roots_at(g)
        r = roots[int(np.argmin(np.abs(roots - ref_root)))]
        return abs(r.imag), r

    a, b = float(g_lo), float(g_hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, rc = branch_im(c)
    fd, rd = branch_im(d)
    for _ in range(90):
        if b - a < 1e-18 * max(1.0, abs(a)):
            break
        if fc < fd:
            b, d, fd, rd = d, c, fc, rc
            c = b - invphi * (b - a)
            fc, rc = branch_im(c)
        else:
            a, c, fc, rc = c, d, fd, rd
            d = a + invphi * (b - a)
            fd, rd = branch_im(d)
    return (c, rc) if fc < fd else (d, rd)


# ---------------------------------------------------------------------------
# branch tracking and monodromy


@lru_cache(maxsize=None)
def _perm_table(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


def _assign(prev, new):
    """Optimal assignment of new values to previous ones.

    Returns (perm, best_cost, second_cost) where ``perm`` indexes ``new``
    and second_cost is the cheapest strictly different assignment (used by
    the factor-2 ambiguity rule).
    """
    n = len(prev)
    perms = _perm_table(n)
    d = np.abs(prev[:, None] - new[None, :])
    costs = d[np.arange(n)[None, :], perms].sum(axis=1)
    order = np.argsort(costs, kind="stable")
    best = order[0]
    second = costs[order[1]] if len(order) > 1 else np.inf
    return perms[best], float(costs[best]), float(second)


def _eig_sorted(family, z, vectors):
    m = family.matrix(z)
    if vectors:
        es = eig(m, left=True, pair_normalize=False)
        return es.eigenvalues, es.right_vectors, es.left_vectors
    return _core.poly_roots(_core.char_poly(m)), None, None


def _track_step(family, z0, state0, z1, vectors, cost_box, gauge=False):
    """March the branch-ordered spectrum from z0 to z1, refining on ambiguity.

    With ``gauge`` set, an ambiguity between eigenvalues that are
    themselves numerically coincident (a genuine pinch on the path) is
    waved through: swapping equal values changes labels, not the branch
    shapes.  Monodromy keeps ``gauge`` off because its output IS the
    labelling.
    """
    vals0, rights0, lefts0 = state0
    vals1, rights1, lefts1 = _eig_sorted(family, z1, vectors)
    perm, best, second = _assign(vals0, vals1)
    scale = max(1.0, float(np.max(np.abs(vals0))))
    if second < AMBIGUITY_FACTOR * best + 1e-13 * scale:
        if gauge and len(vals1) > 1:
            gaps = np.abs(vals1[:, None] - vals1[None, :])
            np.fill_diagonal(gaps, np.inf)
            if float(gaps.min()) <= 1e-6 * scale:
                cost_box[0] += best
                new_vals = vals1[perm]
                return new_vals, None, None
        if abs(z1 - z0) < TRACK_FLOOR * max(1.0, abs(z0)):
            raise TrackingAmbiguous(
                f"assignment still ambiguous at step {abs(z1 - z0):.2e} "
                f"near parameter {z1}"
            )
        zm = 0.5 * (z0 + z1)
        state_m = _track_step(family, z0, state0, zm, vectors, cost_box, gauge)
        return _track_step(family, zm, state_m, z1, vectors, cost_box, gauge)
    cost_box[0] += best
    new_vals = vals1[perm]
    new_rights = new_lefts = None
    if vectors:
        new_rights = rights1[perm].copy()
        new_lefts = lefts1[perm].copy()
        for b in range(len(new_vals)):
            ov = np.vdot(new_rights[b], rights0[b])
            if abs(ov) > 1e-300:
                new_rights[b] = new_rights[b] * (ov / abs(ov))
            ov = np.vdot(new_lefts[b], lefts0[b])
            if abs(ov) > 1e-300:
                new_lefts[b] = new_lefts[b] * (ov / abs(ov))
    return new_vals, new_rights, new_lefts


def track_branches(family, path):
    """Follow every eigenvalue branch along an ordered parameter path.

    Matching between consecutive points is the optimal assignment on
    |dE|; midpoints are inserted adaptively whenever two assignments are
    within a factor 2 in cost, down to a floor of 1e-12, below which
    TrackingAmbiguous is raised.  A path that runs straight through a
    coalescence is allowed: once the competing assignments only permute
    numerically equal eigenvalues the labelling is pure convention and the
    cheapest one is taken (branch values stay continuous either way).
    """
    path = np.asarray(path, dtype=np.complex128)
    if len(path) < 2:
        raise ValueError("path needs at least two points")
    vals, _, _ = _eig_sorted(family, path[0], False)
    n = len(vals)
    branches = np.zeros((n, len(path)), dtype=np.complex128)
    branches[:, 0] = vals
    cost_box = [0.0]
    state = (vals, None, None)
    for i in range(1, len(path)):
        state = _track_step(
            family, path[i - 1], state, path[i], False, cost_box, gauge=True
        )
        branches[:, i] = state[0]
    return BranchTrack(path=path, branches=branches, matching_cost=cost_box[0])


def monodromy_loop(family, center, radius, steps=256, max_loops=16):
    """Transport the eigensystem around a circle and read off its monodromy.

    The caller guarantees exactly one EP strictly inside the loop (or none,
    for the identity case).  Eigenvalues are matched step to step by
    optimal assignment with adaptive refinement.  The transported object is
    the biorthogonally normalised eigenvector v / sqrt(<u, v>) with unit
    right and left vectors carried by nearest-phase alignment and the
    square root continued along the path; its fourth-root branch structure
    is exactly what distinguishes an EP loop (the pairing <u, v> vanishes
    like the square root of the distance to the EP, so two revolutions
    flip the normalised vector's sign and four restore it).

    ``accumulated_phase`` is the transported-vector factor of the most
    twisted branch after the eigenvalue period, normalised to unit
    modulus: -1 at a square-root EP, +1 for an empty loop.
    """
    if steps < 64:
        raise ValueError("monodromy loops need steps >= 64")
    center = complex(center)
    angles = 2.0 * np.pi * np.arange(steps) / steps
    ring = center + radius * np.exp(1j * angles)

    vals0, rights0, lefts0 = _eig_sorted(family, ring[0], True)
    n = len(vals0)
    start_vals = vals0.copy()
    sqrtp = np.array([_continued_sqrt(u @ v, None) for u, v in zip(lefts0, rights0)])
    start_hat = rights0 / sqrtp[:, None]

    cost_box = [0.0]
    state = (vals0, rights0, lefts0)
    one_loop_perm = None
    loops_values = None
    loops_vectors = None
    phase_at_value_period = None
    factors_record = None

    def hat_factors(state, sqrtp):
        rights = state[1]
        return np.array(
            [
                np.vdot(start_hat[b], rights[b] / sqrtp[b])
                / max(np.vdot(start_hat[b], start_hat[b]).real, 1e-300)
                for b in range(n)
            ]
        )

    for loop in range(1, max_loops + 1):
        for k in range(1, steps + 1):
            state = _track_step(
                family, ring[k - 1], state, ring[k % steps], True, cost_box
            )
            vals, rights, lefts = state
            sqrtp = np.array(
                [
                    _continued_sqrt(lefts[b] @ rights[b], sqrtp[b])
                    for b in range(n)
                ]
            )
        match, _, _ = _assign(start_vals, state[0])
        # match: start slot i holds branch match[i]; invert so that
        # permutation[b] is the start label branch b ended up carrying
        sigma = np.empty(n, dtype=int)
        sigma[match] = np.arange(n)
        if loop == 1:
            one_loop_perm = tuple(int(p) for p in sigma)
        if loops_values is None and tuple(sigma) == tuple(range(n)):
            loops_values = loop
            factors = hat_factors(state, sqrtp)
            factors_record = factors
            worst = int(np.argmax(np.abs(factors - 1.0)))
            ph = factors[worst]
            phase_at_value_period = ph / abs(ph) if abs(ph) > 0 else 0j
        if loops_values is not None and loop % loops_values == 0:
            factors = hat_factors(state, sqrtp)
            if all(abs(f - 1.0) < 0.5 for f in factors):
                loops_vectors = loop
                break

    if loops_values is None:
        raise TrackingAmbiguous(
            f"eigenvalues did not restore within {max_loops} loops"
        )
    if loops_vectors is None:
        raise TrackingAmbiguous(
            f"eigenvectors did not restore within {max_loops} loops"
        )

    return MonodromyResult(
        permutation=one_loop_perm,
        loops_to_restore_eigenvalues=loops_values,
        loops_to_restore_eigenvector=loops_vectors,
        accumulated_phase=complex(phase_at_value_period),
        branch_overlaps=factors_record,
    )


def _continued_sqrt(value, previous):
    """Square root of ``value`` on the branch nearest ``previous``."""
    root = np.sqrt(complex(value))
    if previous is not None and abs(-root - previous) < abs(root - previous):
        return -root
    return root


def branch_exponent(family, ep, approach_direction, offsets=None):
    """Exponent of the eigenvalue splitting along a ray off an EP.

    Fits log|E1 - E2| against log|t| over a geometric ladder of offsets
    z = z_EP + t * direction (default 1e-2 .. 1e-5 times the parameter
    scale), where E1, E2 are the two matrix eigenvalues nearest the
    coalesced one.  Returns the least-squares slope: 1/2 at a square-root
    branch point.

    Raises FitUnstable when the log-log fit residual exceeds 0.05.
    """
    direction = complex(approach_direction)
    direction = direction / abs(direction)
    z0 = complex(ep.param)
    mu = complex(ep.matrix_eigenvalue)
    scale = max(1.0, abs(z0))
    if offsets is None:
        offsets = scale * 10.0 ** np.linspace(-2.0, -5.0, 13)
    gaps = []
    for t in offsets:
        vals, _, _ = _eig_sorted(family, z0 + t * direction, False)
        nearest = np.argsort(np.abs(vals - mu))[:2]
        gaps.append(abs(vals[nearest[0]] - vals[nearest[1]]))
    x = np.log10(np.asarray(offsets, dtype=float))
    y = np.log10(np.maximum(gaps, 1e-300))
    slope, intercept = np.polyfit(x, y, 1)
    fit_res = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    if fit_res > 0.05:
        raise FitUnstable(f"log-log fit residual {fit_res:.3f} exceeds 0.05")
    return float(slope)


def biorth_expansion(family, lam, target):
    """Coefficients of ``target`` in the right-eigenvector basis at ``lam``.

    Uses the left eigenvectors with the biorthogonal normalisation
    <u_k, v_k> = 1, so beta_k = <u_k, target> and
    sum_k beta_k v_k reconstructs the target.  Requires a non-defective
    point (DefectiveBasis otherwise); near an EP the two coalescing
    coefficients dominate all others.
    """
    es = eig(family.matrix(lam), left=True)
    if es.defect_flags.any():
        raise DefectiveBasis(f"defective eigenbasis at parameter {lam}")
    target = np.asarray(target, dtype=np.complex128)
    return es.left_vectors @ target
