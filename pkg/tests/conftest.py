import numpy as np
import pytest

from epkit import finder, oscillator, twolevel

# Reference two-level configuration with a real EP window: opposite-sign
# mixing angles put both exceptional points on the real coupling axis.
REF_TWOLEVEL = dict(eps1=-1.0, eps2=1.0, om1=-0.2, om2=-0.6, phi1_deg=-2.0, phi2_deg=45.0)

# Reference oscillator configuration: equal natural frequencies, unequal
# dampings, tuned so an EP sits at a real spring constant near f = 1.005,
# g = 0.00075 with coalesced frequency near 10.05 - 0.15i.
REF_OSC = dict(omega1=10.0, omega2=10.0, k1=0.2, k2=0.1)


@pytest.fixture(scope="session")
def fig_system():
    return twolevel.TwoLevelSystem.from_degrees(
        REF_TWOLEVEL["eps1"],
        REF_TWOLEVEL["eps2"],
        REF_TWOLEVEL["om1"],
        REF_TWOLEVEL["om2"],
        REF_TWOLEVEL["phi1_deg"],
        REF_TWOLEVEL["phi2_deg"],
    )


@pytest.fixture(scope="session")
def osc_base():
    return oscillator.OscillatorParams(**REF_OSC)


@pytest.fixture(scope="session")
def osc_ep(osc_base):
    """The reference oscillator EP, converged once per session."""
    family = finder.oscillator_fg_family(osc_base)
    return finder.newton_ep_search(family, complex(1.0, 0.001), complex(10.0, 0.15))


@pytest.fixture(scope="session")
def osc_ep_params(osc_base, osc_ep):
    return osc_base.with_coupling(f=osc_ep.params["f"], g=osc_ep.params["g"])


def random_two_level(rng, real=False, opposite_angles=False):
    """A reasonably conditioned random two-level system."""

    def cnum(lo, hi):
        re = rng.uniform(lo, hi)
        return re if real else complex(re, rng.uniform(-0.5, 0.5))

    phi1 = rng.uniform(0.15, 1.35)
    phi2 = rng.uniform(0.15, 1.35)
    if opposite_angles:
        phi1 = -phi1
    elif not real:
        phi1 = complex(phi1, rng.uniform(-0.2, 0.2))
        phi2 = complex(phi2, rng.uniform(-0.2, 0.2))
    return twolevel.TwoLevelSystem(
        eps1=cnum(-2.0, -0.5),
        eps2=cnum(0.5, 2.0),
        om1=cnum(-1.5, -0.8),
        om2=cnum(0.8, 1.5),
        phi1=phi1,
        phi2=phi2,
    )
