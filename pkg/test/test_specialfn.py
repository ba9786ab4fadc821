#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

Tests for the special functions.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import unittest

import numpy as np
import mpmath

from tauberkit.errors import InvalidInputError
from tauberkit.specialfn import Regime, RegimeJ, regime, gamma
from tauberkit.specialfn import upper_incomplete_gamma
from tauberkit.specialfn import lower_incomplete_gamma_scaled
from tauberkit.specialfn import g_j, h_j, h_j_direct, h_j_bound, i_j
from tauberkit.specialfn import tabulate


H_RTOL = 1e-8
GAMMA_RTOL = 1e-9

mpmath.mp.dps = 30


def mp_h_j(sigma, j, T):
    sigma = mpmath.mpf(sigma)
    points = [0]
    while points[-1] < T:
        points.append(min(T, max(sigma, 4 * points[-1])))
    val = mpmath.quad(
        lambda tau: (sigma**2 + tau**2) ** (-mpmath.mpf(j) / 2), points
    )
    return float(2 * sigma ** (j - 1) * val)


class TestRegime(unittest.TestCase):

    def test_classify(self):
        self.assertEqual(regime(0.5).regime, Regime.SUB)
        self.assertEqual(regime(1).regime, Regime.ONE)
        self.assertEqual(regime(1.5).regime, Regime.MID)
        self.assertEqual(regime(2).regime, Regime.HIGH)
        self.assertEqual(regime(7.25).regime, Regime.HIGH)

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            regime(0)
        with self.assertRaises(InvalidInputError):
            regime(-1.5)
        with self.assertRaises(InvalidInputError):
            RegimeJ(1.5, Regime.SUB)

    def test_gamma(self):
        self.assertAlmostEqual(gamma(5), 24.0, places=12)
        self.assertAlmostEqual(gamma(0.5), np.sqrt(np.pi), places=12)
        with self.assertRaises(InvalidInputError):
            gamma(0)


class TestIncompleteGamma(unittest.TestCase):

    s_values = [0.7, 1.5, 2.0, 3.3]
    x_values = [0.5 + 0.5j, 2 - 3j, -1 + 2j, 5 + 10j, 0.25]

    def test_upper_against_mpmath(self):
        for s in self.s_values:
            for x in self.x_values:
                ref = complex(mpmath.gammainc(s, a=x))
                val = upper_incomplete_gamma(s, x)
                self.assertLess(
                    abs(val - ref), GAMMA_RTOL * max(1.0, abs(ref)),
                    msg=f"s={s}, x={x}"
                )

    def test_upper_vectorized(self):
        x = np.array(self.x_values, dtype=complex)
        vals = upper_incomplete_gamma(2.0, x)
        self.assertEqual(vals.shape, x.shape)
        for xk, vk in zip(x, vals):
            self.assertAlmostEqual(
                complex(vk), complex(np.exp(-xk) * (1 + xk)), places=12
            )

    def test_branch_cut(self):
        with self.assertRaises(InvalidInputError):
            upper_incomplete_gamma(0.7, -2.0)

    def test_lower_scaled_against_mpmath(self):
        for s in (0.5, 0.7, 2.0):
            for x in (0.1 + 0.2j, 3 - 1j, 6 + 2j):
                ref = complex(mpmath.gammainc(s, 0, x) / mpmath.power(x, s))
                val = lower_incomplete_gamma_scaled(s, x)
                self.assertLess(
                    abs(val - ref), GAMMA_RTOL * max(1.0, abs(ref)),
                    msg=f"s={s}, x={x}"
                )

    def test_lower_scaled_at_zero(self):
        self.assertAlmostEqual(lower_incomplete_gamma_scaled(2.5, 0), 0.4)


class TestKernels(unittest.TestCase):

    j_values = [0.5, 1.0, 1.5, 2.0, 3.0]
    sigma_values = [1e-3, 0.1]
    T_values = [1.0, 10.0, 64.0]

    def test_g_j(self):
        self.assertAlmostEqual(g_j(0.25, 0.5), 2.0)
        self.assertAlmostEqual(g_j(0.5, 1), np.log(0.5))
        self.assertEqual(g_j(0.1, 2), 1.0)
        np.testing.assert_allclose(
            g_j(np.array([0.25, 1.0]), 0.5), [2.0, 1.0]
        )
        with self.assertRaises(InvalidInputError):
            g_j(0.0, 1)
        with self.assertRaises(InvalidInputError):
            g_j(0.1, 0)

    def test_h_j_against_mpmath(self):
        for j in self.j_values:
            for sigma in self.sigma_values:
                ref = mp_h_j(sigma, j, 10.0)
                val = h_j(sigma, j, 10.0)
                self.assertLess(
                    abs(val - ref), H_RTOL * ref, msg=f"j={j}, sigma={sigma}"
                )

    def test_h_j_direct(self):
        for j in self.j_values:
            for sigma in self.sigma_values:
                for T in self.T_values:
                    closed = h_j(sigma, j, T)
                    direct = h_j_direct(sigma, j, T)
                    self.assertLess(abs(closed - direct), H_RTOL * closed)
        self.assertAlmostEqual(
            h_j_direct(0.01, 1.5, 10.0, symmetric=False),
            h_j(0.01, 1.5, 10.0),
            places=8
        )

    def test_h_1_closed_form_random(self):
        rng = np.random.default_rng(12345)
        sigmas = 10 ** rng.uniform(-4, 0, 100)
        T_values = rng.uniform(0.1, 100, 100)
        closed = [h_j(s, 1, T) for s, T in zip(sigmas, T_values)]
        direct = [h_j_direct(s, 1, T) for s, T in zip(sigmas, T_values)]
        np.testing.assert_allclose(closed, direct, rtol=1e-10)

    def test_h_j_follows_g_j(self):
        sigmas = 2.0 ** -np.arange(4, 21)
        for j in (0.3, 0.7, 1.0, 1.5, 2.0, 3.0):
            ratios = np.array(
                [h_j(s, j, 10.0) / abs(g_j(s, j)) for s in sigmas]
            )
            growth = ratios[-4:] / ratios[-5:-1] - 1
            self.assertTrue(np.all(growth <= 0.05), msg=f"j={j}")
            if j < 1:
                scaled = [h_j(s, j, 10.0) / s ** (j - 1) for s in sigmas]
                limit = 2 * 10.0 ** (1 - j) / (1 - j)
                self.assertLessEqual(max(scaled), limit * (1 + 1e-9))

    def test_h_j_regime_bounds(self):
        sigmas = 2.0 ** -np.arange(0, 21)
        for T in (1.0, 64.0, 1e6):
            for sigma in sigmas:
                for j in (2.0, 2.5, 5.0):
                    self.assertLessEqual(h_j(sigma, j, T), np.pi + 1e-9)
                for j in (1.2, 1.5, 1.9):
                    bound = 2 ** (4 - 2 * j) * np.pi ** (j - 1) / (j - 1)
                    self.assertLessEqual(h_j(sigma, j, T), bound + 1e-9)

    def test_h_j_bound(self):
        sigmas = 2.0 ** -np.arange(2, 13)
        for j in self.j_values + [0.2, 1.1, 1.9, 2.5]:
            for T in self.T_values:
                for sigma in sigmas:
                    self.assertLessEqual(
                        h_j(sigma, j, T),
                        h_j_bound(sigma, j, T) * (1 + 1e-12),
                        msg=f"j={j}, sigma={sigma}, T={T}"
                    )

    def test_h_j_bound_is_uniform_for_j_above_one(self):
        self.assertEqual(h_j_bound(1e-6, 3.0, 1e6), np.pi)
        self.assertAlmostEqual(
            h_j_bound(0.1, 1.5, 10), 2 * np.sqrt(np.pi) / 0.5
        )

    def test_h_j_invalid(self):
        with self.assertRaises(InvalidInputError):
            h_j(0.0, 1.5, 10)
        with self.assertRaises(InvalidInputError):
            h_j(0.1, 1.5, -1)

    def test_i_j(self):
        # Empty range when T <= sqrt(sigma)
        self.assertEqual(i_j(0.04, 1.5, 0.1), 0.0)
        sigma, j, T = 0.01, 2.5, 10.0
        ref = mpmath.quad(
            lambda u: mpmath.cos(u) ** (j - 1),
            [mpmath.atan(1 / mpmath.sqrt(sigma)), mpmath.atan(T / sigma)]
        )
        self.assertAlmostEqual(i_j(sigma, j, T), float(ref), places=10)

    def test_tabulate(self):
        tbl = tabulate([0.25, 0.125], [1.0, 2.0, 3.0], [10.0])
        self.assertEqual(len(tbl), 6)
        self.assertEqual(
            tbl.colnames, ['sigma', 'j', 'T', 'g_j', 'h_j', 'h_j_bound']
        )
        self.assertTrue(
            np.all(tbl['h_j'] <= tbl['h_j_bound'] * (1 + 1e-12))
        )


if __name__ == '__main__':
    mytest = TestKernels()
    mytest.test_h_j_against_mpmath()
    mytest.test_h_j_bound()
    mytest = TestIncompleteGamma()
    mytest.test_upper_against_mpmath()
