"""Closed-form analysis of the 2x2 non-Hermitian two-level model.

The model is h(lam) = diag(eps1, eps2) + lam * S diag(om1, om2) S^-1 with
the mixing matrix S = [[cos(phi1), -sin(phi2)], [sin(phi1), cos(phi2)]],
det S = cos(phi1 - phi2).  All angles are radians and may be complex; the
CLI converts from degrees at its boundary.

Branch conventions
------------------
Square roots are principal everywhere.  The plus/minus labels of the EP
location and eigenvector formulas are exposed explicitly ("plus"/"minus")
so callers pin signs instead of relying on branch-cut luck.  When both EP
locations are real the pair is relabelled by value (lambda_plus is the
larger one), which is how the reference spectra annotate them.

The left EP eigenvector shares its square-root branch with the right one:
its first component is fixed by left_ratio * right_ratio = -1, which is
what makes the EP self-orthogonality identity hold for every angle choice,
including ratios on the negative real axis where independently-principal
square roots would break it.
"""

import cmath
from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import (
    AngleSingularity,
    DegenerateSlopes,
    RealParametersRequired,
    SingularS,
)

_BRANCH_SIGNS = {"plus": 1.0, "minus": -1.0}


def _sqrt(z):
    """Principal square root with -0.0 imaginary parts flushed to +0.0."""
    z = complex(z)
    return cmath.sqrt(complex(z.real, z.imag + 0.0))


def _branch_sign(branch):
    try:
        return _BRANCH_SIGNS[branch]
    except KeyError:
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}") from None


@dataclass(frozen=True)
class TwoLevelSystem:
    """Parameters of the two-level family: levels, slopes and mixing angles."""

    eps1: complex
    eps2: complex
    om1: complex
    om2: complex
    phi1: complex
    phi2: complex

    @classmethod
    def from_degrees(cls, eps1, eps2, om1, om2, phi1_deg, phi2_deg):
        d = np.pi / 180.0
        return cls(eps1, eps2, om1, om2, phi1_deg * d, phi2_deg * d)

    @property
    def det_s(self):
        return cmath.cos(self.phi1 - self.phi2)

    def is_real(self):
        return all(
            complex(v).imag == 0.0
            for v in (self.eps1, self.eps2, self.om1, self.om2, self.phi1, self.phi2)
        )


@dataclass(frozen=True)
class EpPair:
    """Both EP locations with their coalesced energies."""

    lambda_plus: complex
    lambda_minus: complex
    coalesced_energy_plus: complex
    coalesced_energy_minus: complex
    both_real: bool


def _check_s(sys):
    if abs(sys.det_s) < 1e-12:
        raise SingularS(f"cos(phi1 - phi2) = {sys.det_s:.3e}; S not invertible")


def build_h(sys, lam):
    """The 2x2 matrix h(lam); entries written out so no inverse is formed."""
    _check_s(sys)
    c1, s1 = cmath.cos(sys.phi1), cmath.sin(sys.phi1)
    c2, s2 = cmath.cos(sys.phi2), cmath.sin(sys.phi2)
    d = sys.det_s
    dw = sys.om1 - sys.om2
    return np.array(
        [
            [
                sys.eps1 + lam * (c1 * c2 * sys.om1 + s1 * s2 * sys.om2) / d,
                lam * c1 * s2 * dw / d,
            ],
            [
                lam * s1 * c2 * dw / d,
                sys.eps2 + lam * (s1 * s2 * sys.om1 + c1 * c2 * sys.om2) / d,
            ],
        ],
        dtype=np.complex128,
    )


def discriminant(sys, lam):
    """The square-root term D(lam) separating the two eigenvalues."""
    _check_s(sys)
    de = sys.eps1 - sys.eps2
    dw = sys.om1 - sys.om2
    inner = (
        de * de
        + lam * lam * dw * dw
        + 2.0 * lam * de * dw * cmath.cos(sys.phi1 + sys.phi2) / sys.det_s
    )
    return _sqrt(inner)


def eigenvalues_closed_form(sys, lam):
    """Eigenvalue pair (E_plus, E_minus) = mean +/- D/2 at this lam."""
    d = discriminant(sys, lam)
    center = 0.5 * (sys.eps1 + sys.eps2 + lam * (sys.om1 + sys.om2))
    return center + 0.5 * d, center - 0.5 * d


def ep_locations(sys):
    """Both exceptional points of the family, with coalesced energies.

    Solves D(lam) = 0 in closed form.  ``both_real`` is set when both
    imaginary parts are below 1e-10 relative to the location magnitudes,
    which is the real-axis EP situation that produces a complex spectrum
    window between them.

    Raises
    ------
    DegenerateSlopes
        If om1 == om2 (no finite EP location).
    """
    _check_s(sys)
    dw = sys.om1 - sys.om2
    scale = max(abs(sys.om1), abs(sys.om2), 1e-30)
    if abs(dw) < 1e-12 * scale:
        raise DegenerateSlopes("om1 and om2 must differ")
    pref = -(sys.eps1 - sys.eps2) / dw / sys.det_s
    root = _sqrt(cmath.sin(2.0 * sys.phi1) * cmath.sin(2.0 * sys.phi2))
    lam_p = pref * (cmath.cos(sys.phi1 + sys.phi2) + 1j * root)
    lam_m = pref * (cmath.cos(sys.phi1 + sys.phi2) - 1j * root)

    mag = max(abs(lam_p), abs(lam_m), 1e-30)
    both_real = abs(lam_p.imag) <= 1e-10 * mag and abs(lam_m.imag) <= 1e-10 * mag
    if both_real and lam_p.real < lam_m.real:
        lam_p, lam_m = lam_m, lam_p

    def energy(lam):
        return 0.5 * (sys.eps1 + sys.eps2 + lam * (sys.om1 + sys.om2))

    return EpPair(lam_p, lam_m, energy(lam_p), energy(lam_m), both_real)


def _check_angles(sys):
    for phi in (sys.phi1, sys.phi2):
        if min(abs(cmath.sin(phi)), abs(cmath.cos(phi))) < 1e-12:
            raise AngleSingularity(
                "closed-form EP eigenvector undefined for an angle at 0 or pi/2; "
                "use ep_eigensystem for the numerical null vector"
            )


def ep_eigenvector_right(sys, branch):
    """(+/- i sqrt(cot phi1 / cot phi2), 1) in the unperturbed basis."""
    _check_angles(sys)
    ratio = _branch_sign(branch) * 1j * _sqrt(cmath.tan(sys.phi2) / cmath.tan(sys.phi1))
    return np.array([ratio, 1.0], dtype=np.complex128)


def ep_eigenvector_left(sys, branch):
    """Left EP row vector; square-root branch tied to the right vector.

    Componentwise this is (+/- i sqrt(tan phi1 / tan phi2), 1); the branch
    of the square root is the one with first component equal to
    -1 / (right first component), so the left-right pairing vanishes
    identically (the self-orthogonality identity).
    """
    right = ep_eigenvector_right(sys, branch)
    return np.array([-1.0 / right[0], 1.0], dtype=np.complex128)


def self_orthogonality(sys, branch):
    """|<psi_left | psi_right>| for one branch; zero at any EP."""
    v = ep_eigenvector_right(sys, branch)
    u = ep_eigenvector_left(sys, branch)
    return abs(u @ v)


def ep_eigensystem(sys):
    """Numerically robust per-EP records: (lam, energy, right, left).

    Unlike the closed-form eigenvector operations this works at the special
    angles (phi in {0, pi/2}) where the cot/tan expressions degenerate: the
    vectors come from the null space of h(lam_EP) - E.  Records are ordered
    (plus, minus) following ``ep_locations``.
    """
    pair = ep_locations(sys)
    records = []
    for lam, energy in (
        (pair.lambda_plus, pair.coalesced_energy_plus),
        (pair.lambda_minus, pair.coalesced_energy_minus),
    ):
        shifted = build_h(sys, lam) - energy * np.eye(2)
        v = _core.null_vector(shifted)
        u = _core.null_vector(shifted.T)
        if abs(v[1]) > 1e-12:
            v = v / v[1]
        if abs(u[1]) > 1e-12:
            u = u / u[1]
        records.append((lam, energy, v, u))
    return records


def real_spectrum_window(sys, lambda_range, samples):
    """Sample the eigenvalue pair over a real interval and flag realness.

    Returns a list of (lam, E1, E2, is_real_pair).  ``is_real_pair`` is true
    when both imaginary parts are below 1e-9 relative to the eigenvalue
    scale; for real parameters with opposite-sign angles the flag flips
    exactly at the two real EPs (within grid resolution).
    """
    if not sys.is_real():
        raise RealParametersRequired("real-window analysis needs real parameters")
    lo, hi = float(lambda_range[0]), float(lambda_range[1])
    if samples < 2:
        raise ValueError("need at least 2 samples")
    out = []
    for lam in np.linspace(lo, hi, samples):
        e1, e2 = eigenvalues_closed_form(sys, lam)
        scale = max(1.0, abs(e1), abs(e2))
        is_real = abs(e1.imag) <= 1e-9 * scale and abs(e2.imag) <= 1e-9 * scale
        out.append((float(lam), e1, e2, is_real))
    return out
