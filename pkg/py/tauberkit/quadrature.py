#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides the transforms of a decay function phi:

    - the one-sided Laplace transform  int_0^inf exp(z t) phi(t) dt
    - the Laplace-Stieltjes transform  int_0^inf exp(z t) dphi(t)
    - the transform of alpha(t) = exp((mu + a) t) phi(t) against
      exp(-(a + z) t)

Closed-form functions are integrated by adaptive bisection with a fixed
order Gauss-Legendre rule on each panel, up to a cut where an analytic
bound of the tail falls below the absolute tolerance. Sampled functions are
integrated exactly as piecewise linear interpolants.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
from functools import lru_cache
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidInputError, DivergenceRiskError
from .errors import AccuracyFailureError, ConsistencyFailureError
from .errors import OutOfRegionError, DomainViolationError


# Upper limit of the search for the tail cut
T_CUT_MAX = 1.0e7

# Largest number of panels used to resolve the oscillations of exp(i Im(z) t)
MAX_INITIAL_PANELS = 200000

# Below this modulus the panel kernels are evaluated by power series
KERNEL_SERIES_RADIUS = 0.5


@dataclass(frozen=True)
class QuadratureOptions:
    """
    Tolerances and limits of the quadrature routines.

    Parameters
    ----------
    rel_tol : float
        Relative tolerance. The default is 1e-11.
    abs_tol : float
        Absolute tolerance, also used for the tail bound. The default is
        1e-14.
    max_subdivisions : int
        Maximum number of panel bisections. The default is 20000.
    order : int
        Number of Gauss-Legendre nodes per panel. The default is 20.
    consistency_tol : float
        Relative tolerance of the identity cross-checks. The default is 1e-7.
    max_refinements : int
        Maximum number of halvings of the Riemann-Stieltjes sums of sampled
        data. The default is 12.

    """

    rel_tol: float = 1e-11
    abs_tol: float = 1e-14
    max_subdivisions: int = 20000
    order: int = 20
    consistency_tol: float = 1e-7
    max_refinements: int = 12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidInputError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise InvalidInputError("max_subdivisions must be at least 1")
        if self.order < 2:
            raise InvalidInputError("order must be at least 2")
        if not self.consistency_tol > 0:
            raise InvalidInputError("consistency_tol must be positive")


DEFAULT_OPTIONS = QuadratureOptions()


@lru_cache(maxsize=8)
def _gauss_legendre(order):
    return special.roots_legendre(order)


def _panel_sums(func, lo, hi, order):
    nodes, weights = _gauss_legendre(order)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * nodes[None, :]
    vals = np.asarray(func(t.ravel()), dtype=complex).reshape(t.shape)
    return half * (vals @ weights)


def integrate_panels(func, breakpoints, opts=DEFAULT_OPTIONS):
    """
    Integrate a vectorized complex function by adaptive bisection.

    Every panel carries the Gauss-Legendre estimate on the whole panel and
    the sum of the estimates on its two halves; their difference is the
    error estimate, kept separately for the real and imaginary parts.
    Panels whose error exceeds their share of the tolerance are bisected
    until the total error is below max(abs_tol, rel_tol * |integral|).

    Parameters
    ----------
    func : callable
        A vectorized function mapping real arrays to complex arrays.
    breakpoints : array-like
        Increasing initial panel boundaries.
    opts : QuadratureOptions, optional
        The tolerances.

    Raises
    ------
    AccuracyFailureError
        If the tolerance is not met within opts.max_subdivisions bisections.

    Returns
    -------
    value : complex
        The integral.
    abserr : float
        The estimated absolute error.

    """
    breakpoints = np.unique(np.asarray(breakpoints, dtype=float))
    if len(breakpoints) < 2:
        return 0j, 0.0

    lo, hi = breakpoints[:-1], breakpoints[1:]
    whole = _panel_sums(func, lo, hi, opts.order)
    n_splits = 0

    while True:
        mid = 0.5 * (lo + hi)
        left = _panel_sums(func, lo, mid, opts.order)
        right = _panel_sums(func, mid, hi, opts.order)
        halves = left + right
        err_re = np.abs(halves.real - whole.real)
        err_im = np.abs(halves.imag - whole.imag)

        value = np.sum(halves)
        tol = max(opts.abs_tol, opts.rel_tol * abs(value))
        tot_re, tot_im = np.sum(err_re), np.sum(err_im)
        if not np.isfinite(value):
            raise AccuracyFailureError(
                "Non-finite integrand", best_estimate=value, error=np.inf
            )
        if tot_re <= tol and tot_im <= tol:
            return complex(value), float(np.hypot(tot_re, tot_im))

        share = tol / len(lo)
        bad = (err_re > share) | (err_im > share)
        bad[np.argmax(np.maximum(err_re, err_im))] = True
        n_splits += int(np.sum(bad))
        if n_splits > opts.max_subdivisions:
            raise AccuracyFailureError(
                f"Tolerance {tol:.3g} not reached after {n_splits} "
                "subdivisions",
                best_estimate=complex(value),
                error=float(np.hypot(tot_re, tot_im))
            )

        good = ~bad
        lo = np.concatenate((lo[good], lo[bad], mid[bad]))
        new_hi = np.concatenate((hi[good], mid[bad], hi[bad]))
        whole = np.concatenate((whole[good], left[bad], right[bad]))
        hi = new_hi
        idx = np.argsort(lo)
        lo, hi, whole = lo[idx], hi[idx], whole[idx]


def _decay_rate(f, mu, x):
    """Return the rate used for the tail bound and the check of Re(z)."""
    if mu is None:
        mu = f.mu_hint
    if mu is None:
        raise DivergenceRiskError(
            f"No decay rate known for '{f.name}': give mu or mu_hint"
        )
    if x >= mu:
        raise DivergenceRiskError(
            f"Re(z) = {x:.6g} is not below the decay rate mu = {mu:.6g}"
        )
    return mu


def tail_cut(f, x, mu, abs_tol, extra=1.0):
    """
    Find a point beyond which the tail of the Laplace integral is negligible.

    For T > 0 the local decay rate r of phi on [T, 2T] is estimated from
    log(phi) and capped at mu. The tail beyond T is then bounded by
    extra * phi(T) * exp(x T) / (r - x).

    Parameters
    ----------
    f : DecayFunction
        The function.
    x : float
        The real part of the transform variable.
    mu : float
        The decay rate.
    abs_tol : float
        The required bound.
    extra : float, optional
        Multiplicative factor of the bound. The default is 1.

    Raises
    ------
    DivergenceRiskError
        If no cut is found before T_CUT_MAX.

    Returns
    -------
    t_cut : float
        The cut point.
    bound : float
        The bound of the neglected tail.

    """
    t_cut = max(1.0, 1.0 / (mu - x))
    while t_cut <= T_CUT_MAX:
        log_phi = f.log_eval(np.array([t_cut, 2 * t_cut]))
        if log_phi[0] == -np.inf:
            return t_cut, 0.0
        rate = min(mu, (log_phi[0] - log_phi[1]) / t_cut)
        if rate > x:
            bound = extra * np.exp(log_phi[0] + x * t_cut) / (rate - x)
            if bound <= abs_tol:
                return t_cut, float(bound)
        t_cut *= 2
    raise DivergenceRiskError(
        f"Cannot bound the tail of the transform of '{f.name}' at "
        f"Re(z) = {x:.6g}"
    )


def _initial_breakpoints(t_cut, omega):
    n_osc = int(np.ceil(t_cut * abs(omega) / (2 * np.pi)))
    if n_osc > MAX_INITIAL_PANELS:
        raise AccuracyFailureError(
            f"Too many oscillations ({n_osc}) to resolve on [0, {t_cut:.3g}]"
        )
    geometric = np.geomspace(min(1e-3, t_cut / 2), t_cut, 32)
    uniform = np.linspace(0.0, t_cut, max(n_osc, 1) + 1)
    return np.unique(np.concatenate(([0.0], geometric, uniform)))


def _kernels(w):
    """
    Return (exp(w) - 1)/w and (exp(w)(w - 1) + 1)/w**2.

    These are int_0^1 exp(w u) du and int_0^1 u exp(w u) du.
    """
    w = np.asarray(w, dtype=complex)
    k0 = np.empty_like(w)
    k1 = np.empty_like(w)
    small = np.abs(w) < KERNEL_SERIES_RADIUS
    if np.any(small):
        ws = w[small]
        term = np.ones_like(ws)
        s0 = np.zeros_like(ws)
        s1 = np.zeros_like(ws)
        for n in range(24):
            s0 += term / (n + 1)
            s1 += term / (n + 2)
            term = term * ws / (n + 1)
        k0[small] = s0
        k1[small] = s1
    if np.any(~small):
        wl = w[~small]
        ew = np.exp(wl)
        k0[~small] = (ew - 1) / wl
        k1[~small] = (ew * (wl - 1) + 1) / wl**2
    return k0, k1


def _sampled_tail_rate(f, mu, x):
    """
    Return the rate of the exponential extension of sampled data.

    Beyond the last sample phi decays with f.mu_hint, the rate fixed when
    the samples were read, whatever rate the caller passes.
    """
    rate = mu if f.mu_hint is None else f.mu_hint
    if f.samples[1][-1] > 0 and x >= rate:
        raise DivergenceRiskError(
            f"Re(z) = {x:.6g} is not below the tail rate {rate:.6g} of "
            f"'{f.name}'"
        )
    return rate


def _laplace_sampled(f, z, mu):
    t, phi = f.samples
    dt = np.diff(t)
    slope = np.diff(phi) / dt
    k0, k1 = _kernels(z * dt)
    # int_{t_k}^{t_k+1} exp(z t) (phi_k + slope_k (t - t_k)) dt
    panels = np.exp(z * t[:-1]) * dt * (phi[:-1] * k0 + slope * dt * k1)
    value = np.sum(panels)
    if phi[-1] > 0:
        value += phi[-1] * np.exp(z * t[-1]) / (mu - z)
    return complex(value)


def laplace(f, z, opts=DEFAULT_OPTIONS, mu=None, full_output=False):
    """
    Compute the one-sided Laplace transform int_0^inf exp(z t) phi(t) dt.

    Parameters
    ----------
    f : DecayFunction
        The function to transform.
    z : complex
        The transform variable, Re(z) < mu.
    opts : QuadratureOptions, optional
        The tolerances.
    mu : float or None, optional
        The decay rate of phi, defaults to f.mu_hint. The tail of sampled
        data always decays with f.mu_hint when it is set.
    full_output : bool, optional
        If True, also return a dictionary with the error estimate, the tail
        bound and the cut point. The default is False.

    Raises
    ------
    DivergenceRiskError
        If Re(z) >= mu or the tail cannot be bounded.
    AccuracyFailureError
        If the tolerance is not met; the exception carries the best
        estimate.

    Returns
    -------
    value : complex
        The transform.
    info : dict
        Only if full_output is True.

    """
    z = complex(z)
    mu = _decay_rate(f, mu, z.real)

    if f.is_sampled:
        value = _laplace_sampled(f, z, _sampled_tail_rate(f, mu, z.real))
        info = {
            'abserr': 0.0, 'tail_bound': 0.0,
            't_cut': float(f.samples[0][-1]), 'n_panels': len(f.samples[0])
        }
    else:
        t_cut, bound = tail_cut(f, z.real, mu, opts.abs_tol)

        def integrand(t):
            return np.exp(z * t + f.log_eval(t))

        breaks = _initial_breakpoints(t_cut, z.imag)
        value, abserr = integrate_panels(integrand, breaks, opts)
        info = {
            'abserr': abserr, 'tail_bound': bound, 't_cut': t_cut,
            'n_panels': len(breaks) - 1
        }
    if full_output:
        return value, info
    return value


def _check_monotone_samples(f):
    t, phi = f.samples
    tol = 1e-9 * np.max(phi)
    bad = np.nonzero(np.diff(phi) > tol)[0]
    if len(bad):
        raise DomainViolationError(
            f"'{f.name}' is not monotone: it increases after t = "
            f"{t[bad[0]]:.6g}"
        )


def _stieltjes_sampled(f, z, mu, opts):
    _check_monotone_samples(f)
    t, phi = f.samples
    dt = np.diff(t)
    slope = np.diff(phi) / dt

    def midpoint_sum(n_sub):
        u = (np.arange(n_sub) + 0.5) / n_sub
        t_mid = t[:-1, None] + dt[:, None] * u[None, :]
        increments = (slope * dt / n_sub)[:, None]
        return np.sum(np.exp(z * t_mid) * increments)

    # The midpoint error is O(n**-2), so Richardson extrapolation is used
    n_sub = 1
    prev = midpoint_sum(n_sub)
    best = None
    delta = np.inf
    for _ in range(opts.max_refinements):
        n_sub *= 2
        cur = midpoint_sum(n_sub)
        extrap = (4 * cur - prev) / 3
        if best is not None:
            delta = abs(extrap - best)
            if delta <= max(opts.abs_tol, opts.rel_tol * abs(extrap)):
                best = extrap
                break
        best = extrap
        prev = cur
    else:
        raise AccuracyFailureError(
            "The Riemann-Stieltjes sums did not converge",
            best_estimate=complex(best), error=float(delta)
        )

    value = best
    if phi[-1] > 0:
        value += -mu * phi[-1] * np.exp(z * t[-1]) / (mu - z)
    return complex(value)


def stieltjes(f, z, opts=DEFAULT_OPTIONS, mu=None):
    """
    Compute the Laplace-Stieltjes transform int_0^inf exp(z t) dphi(t).

    For closed-form functions the integrand is exp(z t) phi'(t), evaluated
    as exp(z t + log(phi)) times the logarithmic derivative. For sampled
    functions midpoint Riemann-Stieltjes sums over the increments of the
    linear interpolant are refined until they stop changing.

    Parameters
    ----------
    f : DecayFunction
        The function to transform.
    z : complex
        The transform variable, Re(z) < mu.
    opts : QuadratureOptions, optional
        The tolerances.
    mu : float or None, optional
        The decay rate of phi, defaults to f.mu_hint. The tail of sampled
        data always decays with f.mu_hint when it is set.

    Raises
    ------
    DivergenceRiskError
        If Re(z) >= mu or the tail cannot be bounded.
    DomainViolationError
        If sampled data are not monotone.
    AccuracyFailureError
        If the tolerance is not met.

    Returns
    -------
    complex

    """
    z = complex(z)
    mu = _decay_rate(f, mu, z.real)

    if f.is_sampled:
        rate = _sampled_tail_rate(f, mu, z.real)
        return _stieltjes_sampled(f, z, rate, opts)

    # The tail of int exp(zt) dphi is bounded through the parts identity
    t_cut, _ = tail_cut(
        f, z.real, mu, opts.abs_tol, extra=(mu - z.real) + abs(z)
    )

    def integrand(t):
        return np.exp(z * t + f.log_eval(t)) * f.dlog_eval(t)

    value, _ = integrate_panels(
        integrand, _initial_breakpoints(t_cut, z.imag), opts
    )
    return value


def parts_identity_residual(f, z, opts=DEFAULT_OPTIONS, mu=None):
    """
    Return |S(z) + phi(0) + z L(z)|.

    S and L are the Stieltjes and Laplace transforms; the quantity vanishes
    by integration by parts.
    """
    lap = laplace(f, z, opts, mu)
    sti = stieltjes(f, z, opts, mu)
    return abs(sti + f.phi0 + z * lap)


def alpha_transform(f, a, z, opts=DEFAULT_OPTIONS, mu=None, nu=None,
                    return_routes=False):
    """
    Compute int_0^inf exp(-(a + z) t) dalpha(t), alpha = exp((mu + a)t) phi.

    The value is computed as -phi(0) + (a + z) * L(mu - z). When
    0 < Re(z) < mu it is cross-checked against
    (mu + a) * L(mu - z) + S(mu - z).

    Parameters
    ----------
    f : DecayFunction
        The function.
    a : float
        The shift, a > 0 and mu + a > nu.
    z : complex
        The transform variable, Re(z) > 0.
    opts : QuadratureOptions, optional
        The tolerances.
    mu : float or None, optional
        The decay rate, defaults to f.mu_hint.
    nu : float or None, optional
        The regularity certificate, defaults to f.nu_certificate.
    return_routes : bool, optional
        If True return both routes (the second is None when it is not
        computed). The default is False.

    Raises
    ------
    InvalidInputError
        If a <= 0 or mu + a <= nu.
    OutOfRegionError
        If Re(z) <= 0.
    ConsistencyFailureError
        If the two routes disagree.

    Returns
    -------
    complex or 2-tuple

    """
    z = complex(z)
    if not a > 0:
        raise InvalidInputError("The shift a must be positive")
    if z.real <= 0:
        raise OutOfRegionError(f"Re(z) = {z.real:.6g} must be positive")
    mu = f.mu_hint if mu is None else mu
    if mu is None:
        raise DivergenceRiskError(f"No decay rate known for '{f.name}'")
    nu = f.nu_certificate if nu is None else nu
    if nu is not None and not mu + a > nu:
        raise InvalidInputError(
            f"mu + a = {mu + a:.6g} must exceed nu = {nu:.6g}"
        )

    lap = laplace(f, mu - z, opts, mu)
    route_1 = -f.phi0 + (a + z) * lap
    route_2 = None
    if z.real < mu:
        route_2 = (mu + a) * lap + stieltjes(f, mu - z, opts, mu)
        diff = abs(route_1 - route_2)
        if diff > opts.consistency_tol * max(1.0, abs(route_1)):
            raise ConsistencyFailureError(
                f"alpha transform routes disagree at z = {z}: "
                f"{route_1} != {route_2}",
                values=(route_1, route_2)
            )
    if return_routes:
        return route_1, route_2
    return route_1
