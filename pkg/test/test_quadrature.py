#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

Tests for the transforms.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import unittest

import numpy as np

from tauberkit.errors import InvalidInputError, DivergenceRiskError
from tauberkit.errors import AccuracyFailureError, ConsistencyFailureError
from tauberkit.errors import OutOfRegionError, DomainViolationError
from tauberkit.model import DecayFunction
from tauberkit.quadrature import QuadratureOptions, integrate_panels
from tauberkit.quadrature import laplace, stieltjes, alpha_transform
from tauberkit.quadrature import parts_identity_residual, tail_cut


def exp_decay(rate=1.0, **kwargs):
    return DecayFunction(
        lambda t: np.exp(-rate * t),
        log_func=lambda t: -rate * np.asarray(t),
        log_derivative=lambda t: np.full_like(np.asarray(t), -rate),
        mu_hint=rate,
        **kwargs
    )


class TestIntegratePanels(unittest.TestCase):

    def test_oscillatory(self):
        val, err = integrate_panels(
            lambda t: np.exp(1j * t), [0.0, 0.5, 1.0]
        )
        self.assertAlmostEqual(val, (np.exp(1j) - 1) / 1j, places=13)
        self.assertLess(err, 1e-12)

    def test_degenerate(self):
        self.assertEqual(integrate_panels(np.exp, [1.0]), (0j, 0.0))

    def test_accuracy_failure(self):
        opts = QuadratureOptions(max_subdivisions=5)
        with self.assertRaises(AccuracyFailureError) as ctx:
            integrate_panels(lambda t: 1 / np.sqrt(t), [0.0, 1.0], opts)
        self.assertIsNotNone(ctx.exception.best_estimate)
        self.assertLess(abs(ctx.exception.best_estimate - 2), 0.5)

    def test_options(self):
        with self.assertRaises(InvalidInputError):
            QuadratureOptions(rel_tol=0)
        with self.assertRaises(InvalidInputError):
            QuadratureOptions(order=1)


class TestLaplace(unittest.TestCase):

    z_values = [0.3 + 2.0j, -1.0 + 0.5j, 0.9 - 10.0j, 0.0]

    def test_exponential(self):
        f = exp_decay()
        for z in self.z_values:
            val = laplace(f, z)
            self.assertLess(abs(val - 1 / (1 - z)), 1e-9, msg=f"z={z}")

    def test_full_output(self):
        val, info = laplace(exp_decay(), 0.5, full_output=True)
        self.assertAlmostEqual(val, 2.0, places=9)
        self.assertLessEqual(info['tail_bound'], 1e-14)
        for key in ('abserr', 't_cut', 'n_panels'):
            self.assertIn(key, info)

    def test_polynomial_factor(self):
        f = DecayFunction(lambda t: (1 + t) * np.exp(-t), mu_hint=1.0)
        for z in self.z_values:
            ref = 1 / (1 - z) + 1 / (1 - z) ** 2
            self.assertLess(abs(laplace(f, z) - ref), 1e-8 * abs(ref))

    def test_divergence(self):
        with self.assertRaises(DivergenceRiskError):
            laplace(exp_decay(), 1.0 + 1j)
        no_rate = DecayFunction(lambda t: np.exp(-t))
        with self.assertRaises(DivergenceRiskError):
            laplace(no_rate, 0.5)
        self.assertAlmostEqual(laplace(no_rate, 0.5, mu=1.0), 2.0, places=9)

    def test_tail_cut(self):
        t_cut, bound = tail_cut(exp_decay(), 0.5, 1.0, 1e-10)
        self.assertLessEqual(bound, 1e-10)
        self.assertGreater(t_cut, 40)

    def test_sampled(self):
        t = np.linspace(0, 30, 3001)
        f = DecayFunction.from_samples(t, np.exp(-t), mu_hint=1.0)
        for z in self.z_values:
            ref = 1 / (1 - z)
            self.assertLess(abs(laplace(f, z) - ref), 1e-4 * abs(ref))

    def test_sampled_tail_rate(self):
        # The extension beyond t = 10 decays with the rate of the samples
        t = np.linspace(0, 10, 10001)
        f = DecayFunction.from_samples(t, np.exp(-t), mu_hint=1.0)
        ref = laplace(f, 0.2)
        self.assertLess(abs(ref - 1.25), 1e-6)
        self.assertAlmostEqual(laplace(f, 0.2, mu=1.5), ref, places=13)
        self.assertAlmostEqual(
            stieltjes(f, 0.2, mu=1.5), stieltjes(f, 0.2), places=12
        )
        with self.assertRaises(DivergenceRiskError):
            laplace(f, 1.2, mu=1.5)


class TestStieltjes(unittest.TestCase):

    z_values = [0.3 + 2.0j, -1.0 + 0.5j, 0.5]

    def test_exponential(self):
        f = exp_decay()
        for z in self.z_values:
            self.assertLess(abs(stieltjes(f, z) + 1 / (1 - z)), 1e-9)

    def test_parts_identity(self):
        f = DecayFunction(lambda t: (1 + t) * np.exp(-t), mu_hint=1.0)
        for z in self.z_values:
            self.assertLess(parts_identity_residual(f, z), 1e-7)

    def test_sampled(self):
        t = np.linspace(0, 30, 3001)
        f = DecayFunction.from_samples(t, np.exp(-t), mu_hint=1.0)
        for z in self.z_values:
            self.assertLess(abs(stieltjes(f, z) + 1 / (1 - z)), 1e-3)
            # The identity is exact for the interpolant
            self.assertLess(parts_identity_residual(f, z), 1e-8)

    def test_not_monotone(self):
        t = np.linspace(0, 10, 11)
        phi = np.exp(-t)
        phi[5] = 2 * phi[4]
        f = DecayFunction.from_samples(t, phi, mu_hint=1.0)
        with self.assertRaises(DomainViolationError):
            stieltjes(f, 0.5)


class TestAlphaTransform(unittest.TestCase):

    def test_exponential(self):
        f = exp_decay()
        for a in (1.0, 2.5):
            for z in (0.5 + 1j, 0.2 - 3j, 2.0 + 1j):
                self.assertLess(abs(alpha_transform(f, a, z) - a / z), 1e-8)

    def test_routes(self):
        r1, r2 = alpha_transform(exp_decay(), 1.0, 0.5 + 1j,
                                 return_routes=True)
        self.assertLess(abs(r1 - r2), 1e-8)
        r1, r2 = alpha_transform(exp_decay(), 1.0, 1.5 + 1j,
                                 return_routes=True)
        self.assertIsNone(r2)

    def test_invalid(self):
        f = exp_decay()
        with self.assertRaises(InvalidInputError):
            alpha_transform(f, 0.0, 0.5)
        with self.assertRaises(OutOfRegionError):
            alpha_transform(f, 1.0, -0.5 + 1j)
        with self.assertRaises(InvalidInputError):
            alpha_transform(exp_decay(nu_certificate=3.0), 1.0, 0.5)

    def test_inconsistent_derivative(self):
        f = DecayFunction(
            lambda t: np.exp(-t),
            log_derivative=lambda t: np.full_like(np.asarray(t), -2.0),
            mu_hint=1.0
        )
        with self.assertRaises(ConsistencyFailureError) as ctx:
            alpha_transform(f, 1.0, 0.5 + 1j)
        self.assertEqual(len(ctx.exception.values), 2)


if __name__ == '__main__':
    mytest = TestLaplace()
    mytest.test_exponential()
    mytest.test_sampled()
    mytest = TestAlphaTransform()
    mytest.test_exponential()
