"""Oscillator model: matrices, secular quartic, driven response, EP formulas."""

import numpy as np
import pytest

from epkit import linalg, oscillator as osc
from epkit.errors import FormMismatch, NearSingular, NotAnEP


class TestBuildM:
    def test_free_oscillator_eigenvalues(self):
        p = osc.OscillatorParams(3.0, 7.0, 0.0, 0.0)
        m = osc.build_M(p)
        vals = linalg.eig(m, left=False).eigenvalues
        for expected in (3j, -3j, 7j, -7j):
            assert min(abs(vals - expected)) < 1e-10

    def test_decomposition_identity(self):
        p = osc.OscillatorParams(10.0, 10.0, 0.2, 0.1, f=1.005, g=0.00075)
        m0, m1 = osc.build_M0_M1(p)
        assert np.allclose(m0 + p.f * m1, osc.build_M(p))

    def test_coupling_block_row_sums_vanish(self):
        p = osc.OscillatorParams(10.0, 10.0, 0.2, 0.1)
        _, m1 = osc.build_M0_M1(p)
        assert np.allclose(m1.sum(axis=1), 0.0)

    def test_split_matrices_not_symmetric(self):
        p = osc.OscillatorParams(10.0, 10.0, 0.2, 0.1, g=0.3)
        m0, m1 = osc.build_M0_M1(p)
        assert not np.allclose(m0, m0.T)
        assert not np.allclose(m1, m1.T)

    def test_negative_damping_rejected(self):
        with pytest.raises(ValueError):
            osc.OscillatorParams(10.0, 10.0, -0.1, 0.1)


class TestSecular:
    def test_uncoupled_factorisation(self):
        p = osc.OscillatorParams(3.0, 7.0, 0.4, 0.0)
        # roots of each uncoupled factor: +-sqrt(wj^2 - kj^2) + i kj
        roots = osc.secular_roots(p)
        expected = [
            np.sqrt(9 - 0.16) + 0.4j,
            -np.sqrt(9 - 0.16) + 0.4j,
            7.0 + 0j,
            -7.0 + 0j,
        ]
        for e in expected:
            assert min(abs(roots - e)) < 1e-9

    def test_matches_char_poly_route(self, osc_ep_params):
        poly = osc.secular_poly(osc_ep_params)
        p_m = linalg.char_poly(osc.build_M(osc_ep_params))
        rng = np.random.default_rng(8)
        for _ in range(10):
            w = complex(rng.normal(scale=10), rng.normal())
            assert osc.secular_det(osc_ep_params, w) == pytest.approx(
                p_m(1j * w), rel=1e-10
            )
            assert poly(w) == pytest.approx(osc.secular_det(osc_ep_params, w))

    def test_determinant_definition(self, osc_ep_params):
        m = osc.build_M(osc_ep_params)
        for w in (0.0, 2.3, 10.0 + 0.1j):
            direct = linalg.determinant(1j * w * np.eye(4) - m)
            assert osc.secular_det(osc_ep_params, w) == pytest.approx(direct, rel=1e-10)

    def test_derivative_vs_finite_difference(self, osc_ep_params):
        h = 1e-6
        rng = np.random.default_rng(9)
        for _ in range(10):
            w = complex(rng.normal(scale=10), rng.normal())
            fd = (
                osc.secular_det(osc_ep_params, w + h)
                - osc.secular_det(osc_ep_params, w - h)
            ) / (2 * h)
            assert osc.secular_det_derivative(osc_ep_params, w) == pytest.approx(
                fd, rel=1e-5
            )

    def test_simple_root_has_nonzero_derivative(self):
        p = osc.OscillatorParams(3.0, 7.0, 0.0, 0.0)
        for w in osc.secular_roots(p):
            assert abs(osc.secular_det_derivative(p, w)) > 1.0

    def test_both_conditions_vanish_at_ep(self, osc_ep, osc_ep_params):
        scale = float(np.max(np.abs(osc.secular_poly(osc_ep_params).coeffs)))
        w = osc_ep.frequency
        assert abs(osc.secular_det(osc_ep_params, w)) <= 1e-8 * scale
        assert abs(osc.secular_det_derivative(osc_ep_params, w)) <= 1e-8 * scale


class TestFrequencyConventions:
    def test_physical_raw_round_trip(self):
        w = 10.05 + 0.15j
        assert osc.physical_frequency(w) == 10.05 - 0.15j
        assert osc.raw_frequency(osc.physical_frequency(w)) == w
        assert osc.physical_frequency(10.05 - 0.15j) == 10.05 - 0.15j

    def test_raw_roots_damped_upper_half_plane(self, osc_ep_params):
        for w in osc.secular_roots(osc_ep_params):
            assert w.imag > 0

    def test_ep_symmetry_of_the_model(self, osc_ep, osc_base):
        # the exact mirror of an EP at fixed g is (-conj(omega), conj(f)):
        # for a real spring constant the same f serves both signs of Re(omega)
        f, g = osc_ep.params["f"], osc_ep.params["g"]
        params = osc_base.with_coupling(f=f, g=g)
        poly = osc.secular_poly(params)
        dpoly = poly.derivative()
        scale = float(np.max(np.abs(poly.coeffs)))
        w_mirror = -osc_ep.frequency.conjugate()
        assert abs(poly(w_mirror)) <= 1e-8 * scale
        assert abs(dpoly(w_mirror)) <= 1e-8 * scale


class TestStationaryResponse:
    def test_uncoupled_undamped_closed_form(self):
        p = osc.OscillatorParams(3.0, 7.0, 0.0, 0.0)
        d = osc.DriveSpec(1.0 + 0.5j, -2.0, omega=1.3)
        r = osc.stationary_response(p, d)
        assert r.q1 == pytest.approx(d.c1 / (9.0 - 1.69), rel=1e-10)
        assert r.q2 == pytest.approx(d.c2 / (49.0 - 1.69), rel=1e-10)

    def test_residual_and_phasor_identity(self, osc_ep_params):
        rng = np.random.default_rng(10)
        for _ in range(20):
            w = rng.uniform(9.5, 10.6)
            d = osc.DriveSpec(1j, 1.0, omega=w)
            r = osc.stationary_response(osc_ep_params, d)
            assert r.residual <= 1e-10 * abs(d.c1)
            assert r.p1 == pytest.approx(1j * w * r.q1, rel=1e-10)
            assert r.p2 == pytest.approx(1j * w * r.q2, rel=1e-10)

    def test_exact_resonance_guarded(self):
        p = osc.OscillatorParams(3.0, 7.0, 0.0, 0.0)
        with pytest.raises(NearSingular):
            osc.stationary_response(p, osc.DriveSpec(1.0, 0.0, omega=3.0))

    def test_zero_drive_rejected(self):
        with pytest.raises(ValueError):
            osc.DriveSpec(0.0, 0.0, omega=1.0)


class TestFrequencySweep:
    def test_mode_drive_locks_moduli_and_phase(self, osc_ep_params):
        sweep = osc.frequency_sweep(osc_ep_params, 1j, 1.0, (9.5, 10.6), 301)
        assert np.max(np.abs(sweep.abs_q1 / sweep.abs_q2 - 1.0)) <= 0.05
        peak = int(np.argmax(sweep.abs_q2))
        assert abs(np.degrees(sweep.phase_diff[peak]) - 90.0) <= 5.0

    def test_anti_mode_drive_breaks_moduli_keeps_quadrature(self, osc_ep_params):
        sweep = osc.frequency_sweep(osc_ep_params, -1j, 1.0, (9.5, 10.6), 301)
        peak = int(np.argmax(sweep.abs_q2))
        assert abs(sweep.abs_q1[peak] / sweep.abs_q2[peak] - 1.0) > 0.2
        assert abs(abs(np.degrees(sweep.phase_diff[peak])) - 90.0) <= 5.0

    def test_coupling_transmits_to_undriven_particle(self, osc_ep_params):
        sweep = osc.frequency_sweep(osc_ep_params, 1.0, 0.0, (9.5, 10.6), 11)
        assert np.all(sweep.abs_q2 > 0)

    def test_phases_unwrap_continuously(self, osc_ep_params):
        sweep = osc.frequency_sweep(osc_ep_params, -1j, 1.0, (9.5, 10.6), 601)
        assert np.max(np.abs(np.diff(sweep.phase_q1))) < np.pi
        assert np.max(np.abs(np.diff(sweep.phase_q2))) < np.pi

    def test_conjugate_map_to_stationary_response(self, osc_ep_params):
        # the reported phasors with drive c are the conjugates of the
        # stationary ones with drive conj(c): moduli carry over that way
        sweep = osc.frequency_sweep(osc_ep_params, 1j, 1.0, (9.8, 10.2), 5)
        for i, w in enumerate(sweep.omega):
            r = osc.stationary_response(osc_ep_params, osc.DriveSpec(-1j, 1.0, float(w)))
            assert sweep.abs_q1[i] == pytest.approx(abs(r.q1), rel=1e-12)
            assert sweep.abs_q2[i] == pytest.approx(abs(r.q2), rel=1e-12)


class TestAmplitudeRatio:
    def test_reference_value(self, osc_ep, osc_ep_params):
        ratio = osc.ep_amplitude_ratio(
            osc_ep_params, osc.physical_frequency(osc_ep.frequency)
        )
        assert ratio.real == pytest.approx(0.0049, abs=5e-4)
        assert ratio.imag == pytest.approx(1.000, abs=1e-3)

    def test_matches_null_vector_ratio(self, osc_ep, osc_ep_params):
        w_phys = osc.physical_frequency(osc_ep.frequency)
        ratio = osc.ep_amplitude_ratio(osc_ep_params, w_phys)
        m = osc.build_M(osc_ep_params)
        shifted = 1j * (-w_phys) * np.eye(4) - m
        from epkit._core import null_vector

        v = null_vector(shifted)
        assert ratio == pytest.approx(v[2] / v[3], rel=1e-6)
        assert ratio == pytest.approx(v[0] / v[1], rel=1e-6)

    def test_drive_independence_near_ep(self, osc_ep, osc_ep_params):
        w_phys = osc.physical_frequency(osc_ep.frequency)
        exact = osc.ep_amplitude_ratio(osc_ep_params, w_phys)
        rng = np.random.default_rng(12)
        for _ in range(3):
            c = rng.normal(size=2) + 1j * rng.normal(size=2)
            probe = w_phys + 1e-4 * np.exp(1j * rng.uniform(0, 2 * np.pi))
            x = osc.physical_response(
                osc_ep_params, osc.DriveSpec(c[0], c[1]), omega=probe
            )
            assert abs(x[2] / x[3] - exact) <= 1e-2

    def test_ratio_converges_along_probe_ladder(self, osc_ep, osc_ep_params):
        w_phys = osc.physical_frequency(osc_ep.frequency)
        exact = osc.ep_amplitude_ratio(osc_ep_params, w_phys)
        errors = []
        for dist in (1e-2, 1e-3, 1e-4):
            x = osc.physical_response(
                osc_ep_params, osc.DriveSpec(0.7, 1.1 - 0.3j), omega=w_phys + dist * 1j
            )
            errors.append(abs(x[2] / x[3] - exact))
        assert errors[0] > errors[1] > errors[2]

    def test_not_an_ep_rejected(self, osc_ep_params):
        with pytest.raises(NotAnEP):
            osc.ep_amplitude_ratio(osc_ep_params, 9.0 - 0.2j)

    def test_form_mismatch_on_wrong_input(self, osc_base):
        # the two-form identity holds exactly on (images of) secular roots,
        # so a frequency that is no root at all must trip the guard even
        # when the residual precondition is disabled
        params = osc_base.with_coupling(f=0.5, g=0.00075)
        with pytest.raises(FormMismatch):
            osc.ep_amplitude_ratio(params, 9.0 - 0.2j, tol=1e9)
