"""Two coupled damped driven oscillators: matrices, response, EP formulas.

State order is (p1, p2, q1, q2).  The equation-of-motion matrix is

    M = [[-2g-2k1,  2g,      -f-w1^2,  f      ],
         [ 2g,     -2g-2k2,   f,      -f-w2^2 ],
         [ 1,       0,        0,       0      ],
         [ 0,       1,        0,       0      ]]

and the secular determinant det(i w I - M) reduces to the quartic

    Q(w) = D1(w) D2(w) - (f + 2 i g w)^2,
    Dj(w) = -w^2 + 2 i (g + kj) w + f + wj^2.

Frequency sign convention
-------------------------
Solving Q(w) = 0 directly yields damped roots in the upper half plane
(Im w = +k for the uncoupled case).  Measurement conventions put decaying
resonances in the lower half plane, which is how the reference values for
this model (EP at 10.05 - 0.15i etc.) are expressed.  The module therefore
works with two pictures:

* "raw":       roots of Q itself, Im > 0 for damped motion;
* "physical":  the image under w -> conj(w), Im < 0, matching the
               customary damped-resonance form.  ``physical_frequency`` /
               ``raw_frequency`` convert.

``stationary_response`` solves the driven system in the raw picture,
(i w I - M) x = (c1, c2, 0, 0), so its phasors obey p_j = i w q_j exactly.
``physical_response`` (used by ``frequency_sweep`` and the CLI) solves the
conjugate-picture system (-i w I - M) x = c, whose poles are the physical
frequencies; moduli agree between the two pictures once the drive is
conjugated along, phases flip sign.  The EP amplitude ratio formulas below
take the physical frequency.
"""

from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import FormMismatch, NearSingular, NotAnEP
from .linalg import Polynomial

COND_LIMIT = 1e12


@dataclass(frozen=True)
class OscillatorParams:
    """Natural frequencies, individual dampings, coupling spring and damping."""

    omega1: float
    omega2: float
    k1: float
    k2: float
    f: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("damping constants must be non-negative")

    def with_coupling(self, f=None, g=None):
        return OscillatorParams(
            self.omega1,
            self.omega2,
            self.k1,
            self.k2,
            self.f if f is None else f,
            self.g if g is None else g,
        )


@dataclass(frozen=True)
class DriveSpec:
    """Drive amplitudes per particle and the (real) drive frequency."""

    c1: complex
    c2: complex
    omega: float = 0.0

    def __post_init__(self):
        if self.c1 == 0 and self.c2 == 0:
            raise ValueError("at least one drive amplitude must be nonzero")


@dataclass
class StationaryResponse:
    """Phasors of the stationary driven solution (raw picture)."""

    p1: complex
    p2: complex
    q1: complex
    q2: complex
    residual: float


@dataclass
class FrequencySweep:
    """Arrays of moduli and continuously-unwrapped phases (radians)."""

    omega: np.ndarray
    abs_q1: np.ndarray
    abs_q2: np.ndarray
    phase_q1: np.ndarray
    phase_q2: np.ndarray
    phase_diff: np.ndarray


def build_M(params):
    w1sq, w2sq = params.omega1**2, params.omega2**2
    f, g, k1, k2 = params.f, params.g, params.k1, params.k2
    return np.array(
        [
            [-2 * g - 2 * k1, 2 * g, -f - w1sq, f],
            [2 * g, -2 * g - 2 * k2, f, -f - w2sq],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
        ],
        dtype=np.complex128,
    )


def build_M0_M1(params):
    """Split M = M0 + f M1; the coupling structure M1 is f-independent."""
    m0 = build_M(params.with_coupling(f=0.0))
    m1 = np.zeros((4, 4), dtype=np.complex128)
    m1[0, 2], m1[0, 3] = -1, 1
    m1[1, 2], m1[1, 3] = 1, -1
    return m0, m1


def secular_poly(params, f=None):
    """det(i w I - M) as an ascending quartic in w (exact coefficients)."""
    fv = params.f if f is None else f
    a1 = fv + params.omega1**2
    a2 = fv + params.omega2**2
    b1 = 2j * (params.g + params.k1)
    b2 = 2j * (params.g + params.k2)
    g = params.g
    return Polynomial(
        [
            a1 * a2 - fv * fv,
            a1 * b2 + a2 * b1 - 4j * g * fv,
            -(a1 + a2) + b1 * b2 + 4 * g * g,
            -(b1 + b2),
            1.0,
        ]
    )


def secular_det(params, omega):
    """det(i omega I - M), the quartic evaluated at omega."""
    return secular_poly(params)(omega)


def secular_det_derivative(params, omega):
    """Analytic d/domega of the secular determinant (no finite differences)."""
    return secular_poly(params).derivative()(omega)


def secular_roots(params):
    """The four raw secular frequencies, sorted by (real, imag)."""
    return _core.poly_roots(secular_poly(params).coeffs)


def physical_frequency(omega):
    """Map a raw frequency into the reported (Im <= 0) half plane."""
    omega = complex(omega)
    return omega.conjugate() if omega.imag > 0 else omega


def raw_frequency(omega):
    """Inverse of ``physical_frequency``: back into the Im >= 0 half plane."""
    omega = complex(omega)
    return omega.conjugate() if omega.imag < 0 else omega


def _solve_guarded(a, b):
    try:
        x = _core.solve(a, b)
    except ZeroDivisionError:
        raise NearSingular("drive frequency is an exact resonance") from None
    # one inverse-iteration step estimates ||A^-1|| without a decomposition
    y = _core.solve(a, x / max(np.linalg.norm(x), 1e-300))
    cond = float(np.linalg.norm(y)) * float(np.linalg.norm(a))
    if cond > COND_LIMIT:
        raise NearSingular(f"condition estimate {cond:.2e} exceeds {COND_LIMIT:.0e}")
    return x


def stationary_response(params, drive):
    """Stationary phasors of the driven system, raw picture: (i w - M) x = c."""
    m = build_M(params)
    a = 1j * drive.omega * np.eye(4) - m
    b = np.array([drive.c1, drive.c2, 0, 0], dtype=np.complex128)
    x = _solve_guarded(a, b)
    residual = float(np.linalg.norm(a @ x - b))
    return StationaryResponse(x[0], x[1], x[2], x[3], residual)


def physical_response(params, drive, omega=None):
    """Phasors in the reported convention: solves (-i w I - M) x = c.

    ``omega`` may be complex (used to probe the response near the EP); it
    defaults to the drive frequency.  For real omega this equals the
    complex conjugate of ``stationary_response`` driven by conj(c), so
    moduli agree between the two conventions once the drive is mapped
    along with the phasors.
    """
    w = drive.omega if omega is None else omega
    m = build_M(params)
    a = -1j * w * np.eye(4) - m
    b = np.array([drive.c1, drive.c2, 0, 0], dtype=np.complex128)
    return _solve_guarded(a, b)


def frequency_sweep(params, c1, c2, omega_range, samples):
    """Response moduli and unwrapped phases over a real frequency interval.

    Phasors follow the reported convention (see module docstring), so the
    phase difference at a near-EP resonance comes out at +90 degrees for
    the EP-mode drive (c1, c2) = (i, 1).  Phases are continuous along the
    sweep: the first sample is principal, later samples pick the nearest
    branch.
    """
    lo, hi = float(omega_range[0]), float(omega_range[1])
    omegas = np.linspace(lo, hi, samples)
    q1 = np.zeros(samples, dtype=np.complex128)
    q2 = np.zeros(samples, dtype=np.complex128)
    for i, w in enumerate(omegas):
        x = physical_response(params, DriveSpec(c1, c2, float(w)))
        q1[i], q2[i] = x[2], x[3]
    ph1 = _unwrap(np.angle(q1))
    ph2 = _unwrap(np.angle(q2))
    return FrequencySweep(omegas, np.abs(q1), np.abs(q2), ph1, ph2, ph1 - ph2)


def _unwrap(phases):
    out = np.array(phases, dtype=float)
    for i in range(1, len(out)):
        jump = round((out[i] - out[i - 1]) / (2 * np.pi))
        out[i] -= 2 * np.pi * jump
    return out


def ep_amplitude_ratio(params, omega_ep, tol=1e-6):
    """Amplitude ratio q1/q2 = p1/p2 of the single mode at an EP.

    ``omega_ep`` is the EP frequency in the physical (Im < 0) convention.
    Both closed forms are evaluated,

        (f + w2^2 - 2i(g+k2) w - w^2) / (f - 2ig w)
        (f - 2ig w) / (f + w1^2 - 2i(g+k1) w - w^2),

    their agreement is asserted to ``tol`` relative, and the first is
    returned.  Raises NotAnEP when the coalescence conditions fail at the
    matching raw frequency, FormMismatch when the two forms disagree beyond
    1e-4 (which signals a wrong root rather than roundoff).
    """
    w = complex(omega_ep)
    poly = secular_poly(params)
    dpoly = poly.derivative()
    scale = float(np.max(np.abs(poly.coeffs)))
    # both w.conjugate() and -w are raw roots at a true EP with real f, g
    residual = min(
        max(abs(poly(cand)), abs(dpoly(cand))) for cand in (w.conjugate(), -w)
    )
    if residual > tol * scale:
        raise NotAnEP(
            f"coalescence residual {residual:.3e} above {tol:.1e} x scale {scale:.3e}"
        )

    f, g = params.f, params.g
    num1 = f + params.omega2**2 - 2j * (g + params.k2) * w - w * w
    den1 = f - 2j * g * w
    num2 = f - 2j * g * w
    den2 = f + params.omega1**2 - 2j * (g + params.k1) * w - w * w
    form1 = num1 / den1
    form2 = num2 / den2
    rel = abs(form1 - form2) / max(abs(form1), abs(form2), 1e-300)
    if rel > 1e-4:
        raise FormMismatch(f"the two ratio forms differ by {rel:.3e} relative")
    if rel > tol:
        raise NotAnEP(f"ratio forms agree only to {rel:.3e}, worse than {tol:.1e}")
    return form1
