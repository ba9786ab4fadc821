#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

Tests for the estimator of asymptotic laws.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import unittest

import numpy as np
from scipy import special

from tauberkit import corpus
from tauberkit.errors import InvalidInputError
from tauberkit.model import DecayFunction, AsymptoticLaw
from tauberkit.engine import EngineConfig
from tauberkit.estimator import fit_decay_law, ratio_table
from tauberkit.estimator import verification_report


def power_exp(D=3.0, j=2.5, mu=0.5):
    """phi = D/Gamma(j) t**(j-1) exp(-mu t), exactly the model of the fit."""
    law = AsymptoticLaw(D=D, j=j, mu=mu)
    return DecayFunction(law.predict, log_func=law.log_predict), law


class TestFit(unittest.TestCase):

    def test_exact_law(self):
        f, law = power_exp()
        res = fit_decay_law(f, (10.0, 50.0))
        self.assertFalse(res.inconclusive, msg=res.notes)
        self.assertAlmostEqual(res.law.j, law.j, delta=1e-6)
        self.assertAlmostEqual(res.law.mu, law.mu, delta=1e-7)
        self.assertAlmostEqual(res.law.D / law.D, 1.0, delta=1e-5)
        self.assertEqual(res.n_holdout, 200)
        self.assertEqual(res.n_fit + res.n_holdout, 2000)
        for coef in res.corrections.values():
            self.assertLess(abs(coef), 1e-4)

    def test_shifted_gamma(self):
        ex = corpus.shifted_gamma(1.0, 2.0, 1.0)
        res = fit_decay_law(ex.f, (20.0, 80.0))
        self.assertFalse(res.inconclusive, msg=res.notes)
        self.assertAlmostEqual(res.law.j, 2.0, delta=0.02)
        self.assertAlmostEqual(res.law.mu, 1.0, delta=2e-3)
        self.assertAlmostEqual(res.law.D / ex.law.D, 1.0, delta=0.1)

    def test_sampled(self):
        ex = corpus.shifted_gamma(1.0, 2.0, 1.0)
        f = corpus.sampled(ex, np.linspace(0, 80, 2001))
        res = fit_decay_law(f, (20.0, 70.0))
        self.assertFalse(res.inconclusive, msg=res.notes)
        self.assertAlmostEqual(res.law.j, 2.0, delta=0.02)
        self.assertAlmostEqual(res.law.mu, 1.0, delta=2e-3)

    def test_sampled_fractional(self):
        ex = corpus.shifted_gamma(0.7, 1.5, 2.0)
        f = corpus.sampled(ex, np.linspace(0, 80, 2000))
        res = fit_decay_law(f, (20.0, 70.0))
        self.assertFalse(res.inconclusive, msg=res.notes)
        self.assertAlmostEqual(res.law.mu / 0.7, 1.0, delta=0.01)
        self.assertAlmostEqual(res.law.j / 1.5, 1.0, delta=0.05)
        self.assertAlmostEqual(res.law.D / ex.law.D, 1.0, delta=0.05)

    def test_inconclusive(self):
        f, _ = power_exp()
        res = fit_decay_law(f, (0.5, 10.0))
        self.assertTrue(res.inconclusive)
        self.assertTrue(any('t = 1' in note for note in res.notes))

        growing = DecayFunction(lambda t: np.exp(0.1 * t))
        res = fit_decay_law(growing, (10.0, 50.0))
        self.assertTrue(res.inconclusive)
        self.assertIsNone(res.law)
        self.assertIsNone(res.to_dict()['law'])

    def test_invalid(self):
        f, _ = power_exp()
        with self.assertRaises(InvalidInputError):
            fit_decay_law(f, (5.0, 2.0))
        with self.assertRaises(InvalidInputError):
            fit_decay_law(f, (5.0, 20.0), correction_powers=(-1.0,))
        with self.assertRaises(InvalidInputError):
            fit_decay_law(f, (5.0, 20.0), holdout=1.0)
        vanishing = DecayFunction(lambda t: np.maximum(1 - t, 0.0))
        with self.assertRaises(InvalidInputError):
            fit_decay_law(vanishing, (2.0, 10.0))
        t = np.linspace(0, 10, 11)
        coarse = DecayFunction.from_samples(t, np.exp(-t), mu_hint=1.0)
        with self.assertRaises(InvalidInputError):
            fit_decay_law(coarse, (2.0, 8.0))


class TestRatioTable(unittest.TestCase):

    ex = corpus.shifted_gamma(1.0, 2.0, 1.0)

    def test_pass(self):
        grid = np.geomspace(10, 100, 10)
        report = ratio_table(self.ex.f, self.ex.law, grid)
        self.assertTrue(report.passed)
        np.testing.assert_allclose(report.ratios, (grid + 1) / grid)
        self.assertAlmostEqual(report.final_deviation, 0.01)
        self.assertFalse(ratio_table(self.ex.f, self.ex.law, grid,
                                     tol=0.005).passed)

    def test_drifting_law(self):
        law = AsymptoticLaw(D=self.ex.law.D, j=2.0, mu=1.001)
        report = ratio_table(self.ex.f, law, np.geomspace(10, 1000, 20))
        self.assertFalse(report.passed)

    def test_underflow(self):
        grid = np.geomspace(10, 2000, 30)
        report = ratio_table(self.ex.f, self.ex.law, grid)
        self.assertEqual(len(report.t_grid), 30)
        self.assertEqual(report.phi_hat[-1], 0.0)
        self.assertTrue(any('underflow' in note for note in report.notes))
        self.assertAlmostEqual(report.ratios[-1], 2001 / 2000)

    def test_truncation(self):
        f = DecayFunction(lambda t: (t + 1) * np.exp(-(t + 1)))
        grid = np.geomspace(10, 2000, 30)
        report = ratio_table(f, self.ex.law, grid)
        self.assertLess(len(report.t_grid), 30)
        self.assertTrue(any('truncated' in note for note in report.notes))
        with self.assertRaises(InvalidInputError):
            ratio_table(f, self.ex.law, [800.0, 900.0])

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            ratio_table(self.ex.f, self.ex.law, [])
        with self.assertRaises(InvalidInputError):
            ratio_table(self.ex.f, self.ex.law, [0.0, 1.0])
        with self.assertRaises(InvalidInputError):
            ratio_table(self.ex.f, self.ex.law, [2.0, 1.0])


class TestVerificationReport(unittest.TestCase):

    def test_report(self):
        ex = corpus.shifted_gamma(1.0, 2.0, 1.0)
        cfg = EngineConfig(threads=1)
        report = verification_report(
            ex.f, ex.law, cfg, eta_T=(1.0, 10.0), rho_t=(50.0, 0.5)
        )
        self.assertTrue(report.passed)
        self.assertEqual(len(report.eta_table), 26)
        self.assertTrue(all(row['eta'] >= 0 for row in report.eta_table))
        self.assertEqual(len(report.rho_values), 1)
        self.assertEqual(len(report.envelope), 1)
        env = report.envelope[0]
        self.assertLessEqual(env['lo'], env['hi'])
        self.assertTrue(any('rho(0.5)' in note for note in report.notes))
        info = report.to_dict()
        self.assertEqual(len(info['eta']), 26)
        self.assertAlmostEqual(
            env['phi'], 51 * np.exp(-51) / special.gamma(1.0)
        )


if __name__ == '__main__':
    mytest = TestFit()
    mytest.test_exact_law()
    mytest.test_shifted_gamma()
    mytest = TestRatioTable()
    mytest.test_underflow()
