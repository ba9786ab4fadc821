#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides the special functions: Gamma, the upper incomplete
Gamma function at complex arguments, the gauge function g_j and the kernel
integral h_j together with its regime bounds.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
from enum import Enum
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy import integrate
from astropy.table import Table

from .errors import InvalidInputError, AccuracyFailureError


QUAD_EPSREL = 1e-13
QUAD_LIMIT = 200

# Below this modulus the scaled lower incomplete gamma uses its power series
SERIES_RADIUS = 4.0
SERIES_TERMS = 80


class Regime(str, Enum):
    SUB = '(0,1)'
    ONE = '{1}'
    MID = '(1,2)'
    HIGH = '[2,inf)'


@dataclass(frozen=True)
class RegimeJ:
    """The singularity exponent j and the regime it belongs to."""

    j: float
    regime: Regime

    def __post_init__(self):
        if _classify(self.j) != Regime(self.regime):
            raise InvalidInputError(
                f"j = {self.j} does not belong to the regime {self.regime}"
            )


def _check_j(j):
    if not (np.isfinite(j) and j > 0):
        raise InvalidInputError(f"j must be finite and positive, got {j}")


def _check_sigma_T(sigma, T):
    if not (np.isfinite(sigma) and sigma > 0):
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if not (np.isfinite(T) and T > 0):
        raise InvalidInputError(f"T must be positive, got {T}")


def _classify(j):
    _check_j(j)
    if j < 1:
        return Regime.SUB
    if j == 1:
        return Regime.ONE
    if j < 2:
        return Regime.MID
    return Regime.HIGH


def regime(j):
    """Classify j into one of the regimes (0,1), {1}, (1,2), [2,inf)."""
    return RegimeJ(float(j), _classify(j))


def gamma(j):
    """
    Compute the Gamma function.

    Parameters
    ----------
    j : float
        A positive real number.

    Raises
    ------
    InvalidInputError
        If j <= 0.

    Returns
    -------
    float

    """
    _check_j(j)
    return float(special.gamma(j))


def _real_quad(func, a, b, **kwargs):
    """Integrate a complex function with two real quadratures."""
    opts = {'epsabs': 0.0, 'epsrel': QUAD_EPSREL, 'limit': QUAD_LIMIT}
    opts.update(kwargs)
    re_val, re_err = integrate.quad(lambda x: func(x).real, a, b, **opts)
    im_val, im_err = integrate.quad(lambda x: func(x).imag, a, b, **opts)
    return re_val + 1j * im_val, np.hypot(re_err, im_err)


def _is_integer(s):
    return float(s).is_integer()


def _is_half_integer(s):
    return float(s - 0.5).is_integer()


def _uigamma_integer(n, x):
    # Gamma(n, x) = (n-1)! exp(-x) sum_{k<n} x**k / k!
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, int(n)):
        term = term * x / k
        total = total + term
    return special.gamma(n) * np.exp(-x) * total


def _uigamma_half_integer(s, x):
    # Upward recurrence from Gamma(1/2, x) = sqrt(pi) * erfc(sqrt(x))
    val = np.sqrt(np.pi) * special.erfc(np.sqrt(x))
    a = 0.5
    while a < s:
        val = a * val + np.power(x, a) * np.exp(-x)
        a += 1
    return val


def _uigamma_quad(s, x, abs_tol):
    if abs(x) <= 1:
        # Gamma(s) - x**s * int_0^1 v**(s-1) exp(-x v) dv
        re_val, re_err = integrate.quad(
            lambda v: np.exp(-x * v).real, 0, 1, weight='alg',
            wvar=(s - 1, 0), epsabs=abs_tol, epsrel=QUAD_EPSREL,
            limit=QUAD_LIMIT
        )
        im_val, im_err = integrate.quad(
            lambda v: np.exp(-x * v).imag, 0, 1, weight='alg',
            wvar=(s - 1, 0), epsabs=abs_tol, epsrel=QUAD_EPSREL,
            limit=QUAD_LIMIT
        )
        return special.gamma(s) - np.power(x, s) * (re_val + 1j * im_val)

    # Along the ray u = x + r, r in [0, R]
    r_max = 40.0
    while np.exp(-r_max) * (abs(x) + r_max) ** max(s - 1, 0) > 1e-2 * abs_tol:
        r_max *= 1.5
    val, err = _real_quad(
        lambda r: np.power(x + r, s - 1) * np.exp(-r), 0, r_max,
        epsabs=abs_tol
    )
    return np.exp(-x) * val


def upper_incomplete_gamma(s, x, abs_tol=1e-15):
    """
    Compute the upper incomplete Gamma function at complex arguments.

    Gamma(s, x) is the integral of u**(s-1) * exp(-u) from x to infinity,
    with the principal branch of u**(s-1). Integer and half-integer values
    of s are handled by closed forms, real non-negative x by scipy, and the
    general case by quadrature along the horizontal ray starting at x.

    Parameters
    ----------
    s : float
        A positive real number.
    x : complex or array-like of complex
        The lower integration limit(s).
    abs_tol : float, optional
        Absolute tolerance of the quadrature route. The default is 1e-15.

    Raises
    ------
    InvalidInputError
        If s <= 0 or x is on the negative real axis for non-integer s.

    Returns
    -------
    complex or numpy.ndarray of complex

    """
    _check_j(s)
    x_arr = np.asarray(x, dtype=complex)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)

    if _is_integer(s) and s <= 64:
        result = _uigamma_integer(s, x_arr)
    elif np.all(x_arr.imag == 0) and np.all(x_arr.real >= 0):
        result = (
            special.gammaincc(s, x_arr.real) * special.gamma(s)
        ).astype(complex)
    elif np.any((x_arr.imag == 0) & (x_arr.real < 0)):
        raise InvalidInputError(
            "x lies on the branch cut of the incomplete Gamma function"
        )
    elif _is_half_integer(s) and s <= 64:
        result = _uigamma_half_integer(s, x_arr)
    else:
        result = np.array(
            [_uigamma_quad(s, xk, abs_tol) for xk in x_arr], dtype=complex
        )
    return complex(result[0]) if scalar else result


def lower_incomplete_gamma_scaled(s, x):
    """
    Compute x**(-s) * gamma(s, x), an entire function of x.

    gamma(s, x) = Gamma(s) - Gamma(s, x) is the lower incomplete Gamma
    function. The power series sum (-x)**n / (n! (s+n)) is used for small
    |x|, the difference of the complete and upper functions elsewhere.

    Parameters
    ----------
    s : float
        A positive real number.
    x : complex or array-like of complex

    Returns
    -------
    complex or numpy.ndarray of complex

    """
    _check_j(s)
    x_arr = np.asarray(x, dtype=complex)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    result = np.empty_like(x_arr)

    small = np.abs(x_arr) <= SERIES_RADIUS
    if np.any(small):
        xs = x_arr[small]
        term = np.ones_like(xs)
        total = term / s
        for n in range(1, SERIES_TERMS):
            term = -term * xs / n
            total = total + term / (s + n)
        result[small] = total
    if np.any(~small):
        xl = x_arr[~small]
        result[~small] = (
            special.gamma(s) - upper_incomplete_gamma(s, xl)
        ) / np.power(xl, s)
    return complex(result[0]) if scalar else result


def g_j(sigma, j):
    """
    Compute the gauge function g_j.

    g_j(sigma) is sigma**(j-1) for 0 < j < 1, log(sigma) for j = 1 and 1 for
    j > 1. Note that g_1 is negative for sigma < 1: comparisons should use
    its absolute value.

    Parameters
    ----------
    sigma : float or array-like
        Positive values of sigma.
    j : float
        The singularity exponent.

    Raises
    ------
    InvalidInputError
        If sigma <= 0 or j <= 0.

    Returns
    -------
    float or numpy.ndarray

    """
    _check_j(j)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(~(sigma > 0)):
        raise InvalidInputError("sigma must be positive")
    if j < 1:
        val = sigma ** (j - 1)
    elif j == 1:
        val = np.log(sigma)
    else:
        val = np.ones_like(sigma)
    return float(val) if val.ndim == 0 else val


def _sin_power_integral(p, lo, hi):
    """
    Integrate (sin u)**p from lo to hi, with 0 < lo < hi <= pi/2.

    The substitution u = exp(s) turns the endpoint behaviour u**p into the
    smooth factor exp((p + 1) s).
    """
    if hi <= lo:
        return 0.0

    def integrand(s):
        u = np.exp(s)
        return np.exp((p + 1) * s) * np.sinc(u / np.pi) ** p

    val, err = integrate.quad(
        integrand, np.log(lo), np.log(hi),
        epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT
    )
    if not np.isfinite(val) or err > 1e-8 * abs(val):
        raise AccuracyFailureError(
            "The kernel integral did not converge", best_estimate=val,
            error=err
        )
    return val


def h_j(sigma, j, T):
    """
    Compute the kernel integral h_j.

    h_j(sigma) = sigma**(j-1) * int_{-T}^{T} (sigma**2 + tau**2)**(-j/2).
    For j = 1 the closed form 2*arcsinh(T/sigma) is used; for j = 2 the
    value is 2*arctan(T/sigma); otherwise the integral is computed after the
    substitution tau = sigma*tan(t) in the form
    2 * int_{arctan(sigma/T)}^{pi/2} (sin u)**(j-2) du.

    Parameters
    ----------
    sigma : float
        Positive value of sigma.
    j : float
        The singularity exponent.
    T : float
        Positive half-length of the integration range.

    Returns
    -------
    float

    """
    _check_j(j)
    _check_sigma_T(sigma, T)
    if j == 1:
        return 2 * np.arcsinh(T / sigma)
    if j == 2:
        return 2 * np.arctan(T / sigma)
    return 2 * _sin_power_integral(j - 2, np.arctan(sigma / T), np.pi / 2)


def h_j_direct(sigma, j, T, symmetric=True):
    """
    Compute h_j by direct quadrature of its defining integral.

    The integrand has width sigma around tau = 0, so the range is split at
    sigma * 2**k.

    Parameters
    ----------
    sigma : float
        Positive value of sigma.
    j : float
        The singularity exponent.
    T : float
        Positive half-length of the integration range.
    symmetric : bool, optional
        If True integrate over [0, T] and double the result, otherwise
        integrate over [-T, T]. The default is True.

    Returns
    -------
    float

    """
    _check_j(j)
    _check_sigma_T(sigma, T)

    n_breaks = max(0, int(np.ceil(np.log2(T / sigma))))
    breaks = np.concatenate(([0.0], sigma * 2.0 ** np.arange(n_breaks)))
    breaks = np.unique(np.clip(np.append(breaks, T), 0, T))

    def integrand(tau):
        return (sigma**2 + tau**2) ** (-j / 2)

    def panels(sign):
        total = 0.0
        for a, b in zip(breaks[:-1], breaks[1:]):
            val, _ = integrate.quad(
                lambda x: integrand(sign * x), a, b,
                epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT
            )
            total += val
        return total

    if symmetric:
        total = 2 * panels(1.0)
    else:
        total = panels(1.0) + panels(-1.0)
    return sigma ** (j - 1) * total


def h_j_bound(sigma, j, T):
    """
    Compute the regime bound of h_j.

    Returns pi for j >= 2, 2**(4-2j) * pi**(j-1) / (j-1) for 1 < j < 2, the
    closed form itself for j = 1 and
    2**(3-j) / (1-j) * (arctan(sigma/T)**(j-1) - (pi/2)**(j-1)) for j < 1.

    Parameters
    ----------
    sigma : float
        Positive value of sigma.
    j : float
        The singularity exponent.
    T : float
        Positive half-length of the integration range.

    Returns
    -------
    float

    """
    _check_j(j)
    _check_sigma_T(sigma, T)
    if j >= 2:
        return np.pi
    if j > 1:
        return 2 ** (4 - 2 * j) * np.pi ** (j - 1) / (j - 1)
    if j == 1:
        return h_j(sigma, j, T)
    # pi/2 - arctan(T/sigma) == arctan(sigma/T)
    return (
        2 ** (3 - j) / (1 - j)
        * (np.arctan(sigma / T) ** (j - 1) - (np.pi / 2) ** (j - 1))
    )


def i_j(sigma, j, T):
    """
    Compute the tail integral of the B_j estimate.

    I_j = int (cos u)**(j-1) du between arctan(1/sqrt(sigma)) and
    arctan(T/sigma). It is 0 when T <= sqrt(sigma).
    """
    _check_j(j)
    _check_sigma_T(sigma, T)
    # In terms of v = pi/2 - u the limits are arctan(sigma/T) and
    # arctan(sqrt(sigma))
    return _sin_power_integral(
        j - 1, np.arctan(sigma / T), np.arctan(np.sqrt(sigma))
    )


def tabulate(sigma_values, j_values, T_values):
    """
    Tabulate g_j, h_j and h_j_bound over a parameter grid.

    Returns
    -------
    astropy.table.Table
        One row for each (sigma, j, T) combination.

    """
    rows = []
    for j in j_values:
        for T in T_values:
            for sigma in sigma_values:
                rows.append((
                    sigma, j, T, g_j(sigma, j), h_j(sigma, j, T),
                    h_j_bound(sigma, j, T)
                ))
    return Table(
        rows=rows, names=['sigma', 'j', 'T', 'g_j', 'h_j', 'h_j_bound']
    )
