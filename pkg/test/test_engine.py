#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

Tests for the Tauberian engine.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import unittest

import numpy as np
from scipy import integrate

from tauberkit.errors import InvalidInputError, OutOfRegionError
from tauberkit.errors import ModelInconsistencyError, ReclassifySuggestion
from tauberkit.errors import HypothesisViolationError
from tauberkit.model import DecayFunction, SingularityModel, AsymptoticLaw
from tauberkit.model import Verdict
from tauberkit.engine import EngineConfig, predict, G_eval, G_definition
from tauberkit.engine import eta, rho, rho_from_eta, envelope
from tauberkit.engine import transform_values, calibrate_envelope_constant
from tauberkit.engine import limit_verdict, bounded_verdict
from tauberkit.engine import check_loglim, check_dk, check_bounded_H
from tauberkit.engine import lipschitz_margin
from tauberkit.engine import diagnostics_AB, diagnostics_AB_bounds
from tauberkit.corpus import shifted_gamma, half_power, bounded_remainder
from tauberkit.corpus import counterexample_model


class TestEngineConfig(unittest.TestCase):

    def test_defaults(self):
        cfg = EngineConfig()
        self.assertFalse(cfg.is_resolved)
        self.assertEqual(len(cfg.sigma_sequence), 13)
        self.assertEqual(cfg.sigma_sequence[0], 0.25)
        self.assertEqual(cfg.condition_sigma_sequence[-1], 2.0 ** -20)

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            EngineConfig(a=-1.0)
        with self.assertRaises(InvalidInputError):
            EngineConfig(sigma_sequence=[0.1, 0.2])
        with self.assertRaises(InvalidInputError):
            EngineConfig(pass_ratio=0.6, fail_ratio=0.5)
        with self.assertRaises(InvalidInputError):
            EngineConfig(T_grid=[10.0, 5.0])
        with self.assertRaises(InvalidInputError):
            EngineConfig(envelope_constant=-1.0)

    def test_resolve(self):
        ex = shifted_gamma(1.0, 2.0, 1.0)
        cfg = EngineConfig().resolve(ex.f, 1.0)
        self.assertTrue(cfg.is_resolved)
        self.assertEqual(cfg.a, 1.0)
        self.assertAlmostEqual(cfg.T_grid[0], 64.0)
        self.assertAlmostEqual(cfg.T_grid[-1], 1e6)
        with self.assertRaises(InvalidInputError):
            EngineConfig(T_grid=[10.0, 100.0]).resolve(ex.f, 1.0)

    def test_resolve_estimates_nu(self):
        f = DecayFunction(lambda t: np.exp(-2 * t))
        cfg = EngineConfig().resolve(f, 2.0)
        self.assertAlmostEqual(cfg.a, 1.0)


class TestPredict(unittest.TestCase):

    def test_shifted_gamma(self):
        law = predict(shifted_gamma(1.0, 2.0, 1.0).model)
        self.assertAlmostEqual(law.D, np.exp(-1))
        self.assertEqual(law.j, 2.0)

    def test_inconsistent(self):
        complex_model = SingularityModel(
            mu=1.0, j=1.0, F=lambda z: np.exp(1j * np.asarray(z))
        )
        with self.assertRaises(ModelInconsistencyError):
            predict(complex_model)
        negative_model = SingularityModel(
            mu=1.0, j=1.0, F=lambda z: -np.ones_like(z)
        )
        with self.assertRaises(ModelInconsistencyError):
            predict(negative_model)


class TestRemainder(unittest.TestCase):

    ex = shifted_gamma(1.0, 1.0, 0.0)
    cfg = EngineConfig(a=1.0)

    def test_G_eval(self):
        z = np.array([0.5 + 1j, 0.1 - 3j, 2.0 + 0.5j])
        vals = G_eval(self.ex.f, self.ex.law, self.cfg, z)
        np.testing.assert_allclose(vals, -1 / (1 + z), rtol=1e-12)
        with self.assertRaises(OutOfRegionError):
            G_eval(self.ex.f, self.ex.law, self.cfg, -0.5 + 1j)

    def test_G_conjugate_symmetry(self):
        z = np.array([0.3 + 2j, 0.05 + 0.7j, 1.2 - 5j, 0.4])
        for ex in (shifted_gamma(1.0, 1.5, 1.0), half_power(1.0, 1.0)):
            vals = G_eval(ex.f, ex.law, self.cfg, z)
            np.testing.assert_allclose(
                G_eval(ex.f, ex.law, self.cfg, np.conj(z)), np.conj(vals),
                rtol=1e-10, atol=1e-14, err_msg=ex.f.name
            )
            self.assertAlmostEqual(vals[-1].imag, 0.0, places=12)

    def test_transform_values(self):
        w = np.array([[0.5, 0.2 + 1j], [-2.0 - 3j, 0.25j]])
        exact = transform_values(self.ex.f, w)
        np.testing.assert_allclose(exact, 1 / (1 - w), rtol=1e-12)
        self.assertEqual(exact.shape, (2, 2))
        f = DecayFunction(
            lambda t: np.exp(-t), log_func=lambda t: -np.asarray(t),
            log_derivative=lambda t: np.full_like(np.asarray(t), -1.0),
            mu_hint=1.0
        )
        np.testing.assert_allclose(
            transform_values(f, w, mu=1.0), 1 / (1 - w), rtol=1e-9
        )

    def test_G_definition(self):
        for z in (0.5 + 1j, 0.25 - 2j):
            val = G_definition(self.ex.f, self.ex.law, self.cfg, z)
            self.assertLess(abs(val + 1 / (1 + z)), 1e-8)
        with self.assertRaises(OutOfRegionError):
            G_definition(self.ex.f, self.ex.law, self.cfg, 1.5 + 1j)

    def test_eta(self):
        sigma, T = 1 / 16, 64.0

        def diff(tau):
            return abs(
                sigma / ((1 + 2 * sigma + 1j * tau) * (1 + sigma + 1j * tau))
            )

        ref, _ = integrate.quad(diff, 0, T, epsabs=0, epsrel=1e-12,
                                limit=200)
        val = eta(self.ex.f, self.ex.law, self.cfg, sigma, T)
        self.assertAlmostEqual(val, 2 * ref, delta=1e-7 * ref)
        self.assertLess(
            eta(self.ex.f, self.ex.law, self.cfg, sigma, 1e-12), 1e-12
        )
        with self.assertRaises(InvalidInputError):
            eta(self.ex.f, self.ex.law, self.cfg, 0.5, T)
        with self.assertRaises(InvalidInputError):
            eta(self.ex.f, self.ex.law, self.cfg, sigma, -1.0)


    def test_eta_decreasing(self):
        ex = half_power(1.0, 1.0)
        values = [
            eta(ex.f, ex.law, self.cfg, 2.0 ** -k, 10.0) for k in range(3, 12)
        ]
        self.assertTrue(np.all(np.diff(values) < 0))

    def test_eta_small_sigma(self):
        ex = shifted_gamma(1.0, 2.0, 1.0)
        val = eta(ex.f, ex.law, self.cfg, 2.0 ** -14, 10.0)
        self.assertTrue(0 <= val < 1e-2)


class TestRho(unittest.TestCase):

    def test_zero_eta(self):
        grid = np.geomspace(10, 1e4, 31)
        val, T_best = rho_from_eta(lambda s, T: 0.0, 100.0, 1.0, grid, 1)
        self.assertEqual(T_best, grid[-1])
        self.assertAlmostEqual(val, 1.01 / grid[-1])

    def test_interior_minimum(self):
        grid = np.geomspace(1, 1e4, 41)
        val, T_best = rho_from_eta(
            lambda s, T: 1e-4 * T, 100.0, 1.0, grid, 1
        )
        self.assertAlmostEqual(T_best, np.sqrt(1.01e4), delta=1.0)
        self.assertAlmostEqual(val, 2 * np.sqrt(1.01e-4), places=7)

    def test_exponential(self):
        ex = shifted_gamma(1.0, 1.0, 0.0)
        cfg = EngineConfig(threads=1)
        rho_50, _ = rho(ex.f, ex.law, cfg, 50.0)
        rho_100, T_best = rho(ex.f, ex.law, cfg, 100.0)
        self.assertLess(rho_100, rho_50)
        self.assertTrue(0.02 < rho_100 < 0.04)
        self.assertGreaterEqual(T_best, 64.0)
        rho_200, _ = rho(ex.f, ex.law, cfg, 200.0)
        self.assertLessEqual(rho_200, rho_100 + 1e-3)

    def test_invalid(self):
        ex = shifted_gamma(1.0, 1.0, 0.0)
        with self.assertRaises(InvalidInputError):
            rho(ex.f, ex.law, None, 0.5)
        with self.assertRaises(InvalidInputError):
            rho(ex.f, ex.law, None, 1.5)

    def test_envelope(self):
        ex = bounded_remainder(1.0)
        lo, hi = envelope(ex.f, ex.law, None, 10.0, rho_value=0.05)
        base = 10 * np.exp(-10)
        self.assertAlmostEqual(lo / base, 0.95)
        self.assertAlmostEqual(hi / base, 1.05)
        lo, hi = envelope(ex.f, ex.law, None, 10.0, rho_value=2.0)
        self.assertEqual(lo, 0.0)

    def test_envelope_zero_constant(self):
        ex = bounded_remainder(1.0)
        cfg = EngineConfig(envelope_constant=0.0)
        lo, hi = envelope(ex.f, ex.law, cfg, 10.0, rho_value=0.05)
        self.assertEqual(lo, hi)
        self.assertAlmostEqual(lo / (10 * np.exp(-10)), ex.law.leading)

    def test_calibrate_envelope_constant(self):
        cfg = EngineConfig(threads=1)
        ex = shifted_gamma(1.0, 1.0, 0.0)
        C, per_t = calibrate_envelope_constant(ex.f, ex.law, cfg, [50.0])
        self.assertEqual(len(per_t), 1)
        self.assertLess(C, 1e-8)
        ex = shifted_gamma(1.0, 2.0, 1.0)
        C, per_t = calibrate_envelope_constant(
            ex.f, ex.law, cfg, [50.0, 100.0]
        )
        self.assertGreater(C, 0)
        self.assertEqual(C, max(per_t))


class TestVerdicts(unittest.TestCase):

    def test_limit_verdict(self):
        self.assertEqual(
            limit_verdict(2.0 ** -np.arange(10))[0], Verdict.PASS
        )
        self.assertEqual(limit_verdict(np.ones(10))[0], Verdict.FAIL)
        self.assertEqual(
            limit_verdict(np.arange(1, 9) ** -1.2)[0], Verdict.INCONCLUSIVE
        )
        self.assertEqual(limit_verdict([])[0], Verdict.INCONCLUSIVE)
        self.assertEqual(
            limit_verdict([1.0, np.nan, 0.1])[0], Verdict.FAIL
        )
        self.assertEqual(limit_verdict(np.zeros(5))[0], Verdict.PASS)

    def test_rise_then_decay(self):
        # Measured from the peak, not from the first value
        values = [0.0561, 0.0822, 0.0988, 0.1044, 0.09, 0.07, 0.05, 0.03,
                  0.015, 0.008, 0.0036]
        verdict, note = limit_verdict(values)
        self.assertEqual(verdict, Verdict.PASS)
        self.assertIn("peak", note)
        self.assertEqual(
            limit_verdict(values[:4] + [0.1, 0.09, 0.08])[0], Verdict.FAIL
        )

    def test_noise_floor(self):
        values = [1e-9, 2e-9, 1e-9]
        self.assertEqual(limit_verdict(values)[0], Verdict.FAIL)
        self.assertEqual(
            limit_verdict(values, noise=[1e-8] * 3)[0], Verdict.PASS
        )

    def test_bounded_verdict(self):
        stable = [1.0, 1.5, 1.9, 2.0, 2.01, 2.02]
        self.assertEqual(bounded_verdict(stable)[0], Verdict.PASS)
        self.assertEqual(
            bounded_verdict(2.0 ** np.arange(8))[0], Verdict.FAIL
        )
        self.assertEqual(
            bounded_verdict([1.0, 2.0, 2.5, 2.8])[0], Verdict.INCONCLUSIVE
        )
        self.assertEqual(bounded_verdict([1.0, np.inf])[0], Verdict.FAIL)


class TestCheckers(unittest.TestCase):

    def test_loglim_pass(self):
        for ex in (half_power(1.0, 1.0), shifted_gamma(1.0, 2.0, 1.0)):
            report = check_loglim(ex.model, 5.0)
            self.assertEqual(report.verdict, Verdict.PASS, msg=ex.f.name)
            self.assertEqual(report.condition, 'loglim')
            self.assertAlmostEqual(report.region['beta'], 0.5)

    def test_loglim_half_power_rises_first(self):
        report = check_loglim(half_power(1.0, 1.0).model, 10.0)
        self.assertEqual(report.verdict, Verdict.PASS, msg=report.notes)
        self.assertGreater(np.max(report.values), report.values[0])

    def test_loglim_shifted_gamma_small_j(self):
        for j in (0.5, 1.0):
            report = check_loglim(shifted_gamma(1.0, j, 1.0).model, 10.0)
            self.assertEqual(report.verdict, Verdict.PASS, msg=str(j))

    def test_loglim_counterexample(self):
        report = check_loglim(counterexample_model(1.0, j=1.0), 5.0)
        self.assertEqual(report.verdict, Verdict.FAIL)
        self.assertGreater(report.values[-1], 1.0)
        report = check_loglim(counterexample_model(1.0, j=2.0), 5.0)
        self.assertEqual(report.verdict, Verdict.PASS)

    def test_loglim_invalid(self):
        model = shifted_gamma(1.0, 2.0, 1.0).model
        with self.assertRaises(InvalidInputError):
            check_loglim(model, 1000.0)
        with self.assertRaises(InvalidInputError):
            check_loglim(model, 5.0, EngineConfig(
                condition_sigma_sequence=[1.0, 0.5]
            ))

    def test_loglim_broken_F(self):
        def F(z):
            raise ValueError("not available")
        model = SingularityModel(mu=1.0, j=1.0, F=F)
        report = check_loglim(model, 5.0)
        self.assertEqual(report.verdict, Verdict.INCONCLUSIVE)

    def test_lipschitz(self):
        linear = SingularityModel(mu=1.0, j=1.0, F=lambda z: 2 * z + 1)
        self.assertAlmostEqual(lipschitz_margin(linear, 0.5, 1.0), 2.0,
                               places=6)
        with self.assertRaises(ReclassifySuggestion):
            lipschitz_margin(half_power(1.0, 1.0).model, 0.5, 1.0)
        with self.assertRaises(InvalidInputError):
            lipschitz_margin(linear, 1.5, 1.0)

    def test_dk(self):
        ex = shifted_gamma(1.0, 1.0, 1.0)
        report = check_dk(ex.f, ex.law, 5.0)
        self.assertEqual(report.verdict, Verdict.PASS)
        self.assertEqual(len(report.values), 18)
        wrong = AsymptoticLaw(D=1.1 * ex.law.D, j=1.0, mu=1.0)
        report = check_dk(ex.f, wrong, 5.0)
        self.assertEqual(report.verdict, Verdict.FAIL)
        with self.assertRaises(HypothesisViolationError):
            check_dk(ex.f, AsymptoticLaw(D=1.0, j=0.5, mu=1.0), 5.0)

    def test_bounded_H(self):
        ex = bounded_remainder(1.0)
        report = check_bounded_H(ex.f, ex.law, 5.0)
        self.assertEqual(report.verdict, Verdict.PASS)
        wrong = AsymptoticLaw(D=1.0, j=2.0, mu=0.9)
        report = check_bounded_H(ex.f, wrong, 5.0)
        self.assertEqual(report.verdict, Verdict.FAIL)
        with self.assertRaises(HypothesisViolationError):
            check_bounded_H(ex.f, AsymptoticLaw(D=1.0, j=1.0, mu=1.0), 5.0)


class TestDiagnostics(unittest.TestCase):

    def test_constant_F(self):
        model = SingularityModel(mu=1.0, j=1.5, F=lambda z: np.ones_like(z))
        self.assertEqual(diagnostics_AB(model, None, 0.1, 10.0), (0.0, 0.0))

    def test_bounds(self):
        for j, c in ((2.0, 1.0), (1.0, 0.5), (0.5, 1.0)):
            model = shifted_gamma(1.0, j, c).model
            for sigma in (2.0 ** -3, 2.0 ** -6):
                A, B = diagnostics_AB(model, None, sigma, 10.0)
                A_bound, B_bound = diagnostics_AB_bounds(
                    model, None, sigma, 10.0
                )
                self.assertLessEqual(A, A_bound * (1 + 1e-6))
                self.assertLessEqual(B, B_bound * (1 + 1e-6))

    def test_kernel_difference(self):
        tau = np.linspace(-20, 20, 401)
        for j in (0.5, 1.0, 2.0, 3.0):
            for sigma in (2.0 ** -3, 2.0 ** -8):
                dk = np.abs(
                    np.power(2 * sigma + 1j * tau, -j)
                    - np.power(sigma + 1j * tau, -j)
                )
                rhs = j * sigma * np.abs(sigma + 1j * tau) ** (-j - 1)
                self.assertTrue(np.all(dk <= rhs * (1 + 1e-12)))

    def test_B_bound_shifted_gamma(self):
        model = shifted_gamma(1.0, 2.0, 1.0).model
        _, B = diagnostics_AB(model, None, 0.125, 10.0)
        _, B_bound = diagnostics_AB_bounds(model, None, 0.125, 10.0)
        self.assertGreater(B, 0.2)
        self.assertLessEqual(B, B_bound)

    def test_decay(self):
        model = shifted_gamma(1.0, 2.0, 1.0).model
        A_3, B_3 = diagnostics_AB(model, None, 2.0 ** -3, 10.0)
        A_6, B_6 = diagnostics_AB(model, None, 2.0 ** -6, 10.0)
        self.assertLess(A_6, A_3)
        self.assertLess(B_6, B_3)


if __name__ == '__main__':
    mytest = TestCheckers()
    mytest.test_loglim_counterexample()
    mytest.test_dk()
    mytest = TestRho()
    mytest.test_exponential()
