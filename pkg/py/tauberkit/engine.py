#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides the quantitative Tauberian engine: the prediction of
the asymptotic law from a singularity model, the remainder function G, the
error terms eta and rho, the envelope of phi and the checkers of the
conditions on F and on the remainder H.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import TauberError, InvalidInputError, OutOfRegionError
from .errors import ModelInconsistencyError, HypothesisViolationError
from .errors import ReclassifySuggestion
from .model import AsymptoticLaw, ConditionReport, Verdict, FClass
from .model import estimate_min_nu
from .quadrature import QuadratureOptions, DEFAULT_OPTIONS
from .quadrature import laplace, stieltjes, integrate_panels
from .specialfn import g_j, h_j, i_j
from .utils import sigma_sequence, grid_sup, parallel_map


def _default_sigmas():
    return sigma_sequence(np.arange(2, 15))


def _default_condition_sigmas():
    return sigma_sequence(np.arange(2, 21))


@dataclass(frozen=True, eq=False)
class EngineConfig:
    """
    Parameters of the Tauberian engine.

    Parameters
    ----------
    a : float or None
        The shift a > 0 with mu + a > nu. If None it is resolved to
        max(1, nu - mu + 1).
    sigma_sequence : numpy.ndarray
        Decreasing values of sigma used by the eta scans (2**-k, k=2..14).
    condition_sigma_sequence : numpy.ndarray
        Decreasing values of sigma used by the condition checkers
        (2**-k, k=2..20).
    T_grid : numpy.ndarray or None
        Grid of T for the minimization of rho. If None it is resolved to 40
        log-spaced values from 32*(a+1) to 1e6.
    envelope_constant : float
        Constant C >= 0 of the envelope band D/Gamma(j) +- C*rho. With
        C = 0 the band collapses onto the predicted value.
    pass_ratio : float
        A sequence of values passes when its final value is below pass_ratio
        times its largest value and the last three values decrease.
    fail_ratio : float
        A sequence fails when its final value is at least fail_ratio times
        its middle value.
    zero_tol : float
        Values below this threshold count as zero.
    noise_rtol : float
        Relative rounding level of the remainder checks.
    growth_tol : float
        Relative increments admitted by the boundedness check.
    n_tau : int
        Number of grid points of the suprema over tau, odd so that tau = 0
        is a node.
    eta_rel_tol : float
        Relative tolerance of the eta integrals.
    eta_noise_rtol : float
        Relative rounding level of G where the transform is exact; it sets
        the absolute tolerance of the eta integrals.
    quad : QuadratureOptions
        Options of the transform quadratures.
    threads : int or None
        Number of worker threads, see utils.get_threads.

    """

    a: Optional[float] = None
    sigma_sequence: np.ndarray = field(default_factory=_default_sigmas)
    condition_sigma_sequence: np.ndarray = field(
        default_factory=_default_condition_sigmas
    )
    T_grid: Optional[np.ndarray] = None
    envelope_constant: float = 1.0
    pass_ratio: float = 0.05
    fail_ratio: float = 0.5
    zero_tol: float = 1e-14
    noise_rtol: float = 1e-10
    growth_tol: float = 0.05
    n_tau: int = 513
    eta_rel_tol: float = 1e-8
    eta_noise_rtol: float = 1e-14
    quad: QuadratureOptions = DEFAULT_OPTIONS
    threads: Optional[int] = None

    def __post_init__(self):
        if self.a is not None and not self.a > 0:
            raise InvalidInputError("The shift a must be positive")
        for name in ('sigma_sequence', 'condition_sigma_sequence'):
            seq = np.asarray(getattr(self, name), dtype=float).ravel()
            if len(seq) == 0 or np.any(~(seq > 0)):
                raise InvalidInputError(f"{name} must contain positive values")
            if np.any(np.diff(seq) >= 0):
                raise InvalidInputError(f"{name} must be decreasing")
            object.__setattr__(self, name, seq)
        if self.T_grid is not None:
            grid = np.asarray(self.T_grid, dtype=float).ravel()
            if len(grid) == 0 or np.any(~(grid > 0)):
                raise InvalidInputError("T_grid must contain positive values")
            if np.any(np.diff(grid) <= 0):
                raise InvalidInputError("T_grid must be increasing")
            object.__setattr__(self, 'T_grid', grid)
        if not self.envelope_constant >= 0:
            raise InvalidInputError("envelope_constant cannot be negative")
        if not 0 < self.pass_ratio < self.fail_ratio <= 1:
            raise InvalidInputError(
                "Need 0 < pass_ratio < fail_ratio <= 1"
            )
        if self.n_tau < 2:
            raise InvalidInputError("n_tau must be at least 2")

    @property
    def is_resolved(self):
        return self.a is not None and self.T_grid is not None

    def resolve(self, f, mu):
        """
        Return a copy with the shift a and the T-grid fixed for f.

        If f carries no certificate nu, it is estimated on a grid and a
        warning is printed.
        """
        nu = f.nu_certificate
        if nu is None:
            nu = estimate_min_nu(f, np.linspace(0, 50 / mu, 5001))
            print(
                f"WARNING: '{f.name}' has no nu certificate, using the "
                f"estimate nu = {nu:.6g}",
                file=sys.stderr
            )
        a = self.a if self.a is not None else max(1.0, nu - mu + 1.0)
        if not mu + a > nu:
            raise InvalidInputError(
                f"mu + a = {mu + a:.6g} must exceed nu = {nu:.6g}"
            )
        t_min = 32 * (a + 1)
        if self.T_grid is None:
            T_grid = np.geomspace(t_min, max(1e6, 2 * t_min), 40)
        else:
            T_grid = self.T_grid
            if T_grid[0] < t_min * (1 - 1e-12):
                raise InvalidInputError(
                    f"T_grid must start at or above 32*(a+1) = {t_min:.6g}"
                )
        return replace(self, a=a, T_grid=T_grid)


def _resolved(cfg, f, law):
    cfg = EngineConfig() if cfg is None else cfg
    return cfg if cfg.is_resolved else cfg.resolve(f, law.mu)


def _check_sigma(sigma, mu):
    if not (np.isfinite(sigma) and 0 < sigma < mu / 2):
        raise InvalidInputError(
            f"sigma = {sigma} must lie in (0, mu/2) = (0, {mu / 2:.6g})"
        )


def _check_sigmas(sigmas, mu):
    if np.any(~(sigmas < mu / 2)):
        raise InvalidInputError(
            f"All the values of sigma must be below mu/2 = {mu / 2:.6g}"
        )


def _symmetric_breaks(sigma, T):
    n_oct = max(0, int(np.ceil(np.log2(T / sigma))))
    pos = sigma * 2.0 ** np.arange(n_oct)
    pos = np.concatenate((pos[pos < T], [T]))
    return np.concatenate((-pos[::-1], [0.0], pos))


def _half_breaks(sigma, T):
    breaks = _symmetric_breaks(sigma, T)
    return breaks[breaks >= 0]


def predict(model, imag_tol=1e-9):
    """
    Predict the asymptotic law from a singularity model.

    D = F(mu), which must be real and non-negative.

    Raises
    ------
    ModelInconsistencyError
        If F(mu) has a significant imaginary part or is negative.

    Returns
    -------
    AsymptoticLaw

    """
    val = complex(model.F_eval(np.array([model.mu]))[0])
    if not np.isfinite(val):
        raise ModelInconsistencyError(f"F(mu) is not finite: {val}")
    if abs(val.imag) > imag_tol * max(1.0, abs(val)):
        raise ModelInconsistencyError(
            f"F(mu) = {val} is not real: phi would not be real-valued"
        )
    if val.real < -1e-12:
        raise ModelInconsistencyError(
            f"F(mu) = {val.real:.6g} is negative: phi would not be positive"
        )
    return AsymptoticLaw(D=max(val.real, 0.0), j=model.j, mu=model.mu)


def transform_values(f, w, opts=DEFAULT_OPTIONS, mu=None):
    """
    Evaluate the Laplace transform of f at an array of points.

    The exact oracle of f is used when it is available, the quadrature of
    the quadrature module otherwise.
    """
    w = np.asarray(w, dtype=complex)
    if f.exact_transform is not None:
        vals = np.asarray(f.exact_transform(w), dtype=complex)
        return vals * np.ones_like(w)
    flat = [laplace(f, wk, opts, mu) for wk in w.ravel()]
    return np.array(flat, dtype=complex).reshape(w.shape)


def G_eval(f, law, cfg, z):
    """
    Evaluate the remainder function G on Re(z) > 0.

    G(z) = L(mu - z) - phi(0)/(a + z) - D * z**(-j), where L is the Laplace
    transform of phi and z**(-j) uses the principal branch.

    Parameters
    ----------
    f : DecayFunction
        The decay function.
    law : AsymptoticLaw
        The predicted law.
    cfg : EngineConfig or None
        The engine configuration.
    z : complex or array-like of complex
        The evaluation points.

    Raises
    ------
    OutOfRegionError
        If Re(z) <= 0 somewhere.

    Returns
    -------
    complex or numpy.ndarray of complex

    """
    cfg = _resolved(cfg, f, law)
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr.real <= 0):
        raise OutOfRegionError("G is evaluated only on Re(z) > 0")
    lap = transform_values(f, law.mu - z_arr, cfg.quad, law.mu)
    val = lap - f.phi0 / (cfg.a + z_arr) - law.D * np.power(z_arr, -law.j)
    return complex(val) if val.ndim == 0 else val


def G_definition(f, law, cfg, z):
    """
    Evaluate G from the transform of alpha(t) = exp((mu + a)t) phi(t).

    The transform of alpha is computed as (mu + a) L(mu - z) + S(mu - z),
    with S the Laplace-Stieltjes transform, so that the value is an
    independent cross-check of G_eval. Requires 0 < Re(z) < mu.
    """
    cfg = _resolved(cfg, f, law)
    z = complex(z)
    if not 0 < z.real < law.mu:
        raise OutOfRegionError("G_definition requires 0 < Re(z) < mu")
    lap = complex(transform_values(f, law.mu - z, cfg.quad, law.mu))
    sti = stieltjes(f, law.mu - z, cfg.quad, law.mu)
    alpha = (law.mu + cfg.a) * lap + sti
    return alpha / (cfg.a + z) - law.D * z ** (-law.j)


def eta(f, law, cfg, sigma, T):
    """
    Compute the eta error term.

    eta = sigma**(j-1) * int_{-T}^{T} |G(2 sigma + i tau) - G(sigma + i tau)|.
    Since phi is real, G is conjugate symmetric and only tau >= 0 is
    integrated.

    Parameters
    ----------
    f : DecayFunction
        The decay function.
    law : AsymptoticLaw
        The predicted law.
    cfg : EngineConfig or None
        The engine configuration.
    sigma : float
        0 < sigma < mu/2.
    T : float
        The half width of the integration range, T > 0.

    Raises
    ------
    InvalidInputError
        If sigma or T are out of range.

    Returns
    -------
    float

    """
    cfg = _resolved(cfg, f, law)
    _check_sigma(sigma, law.mu)
    if not (np.isfinite(T) and T > 0):
        raise InvalidInputError(f"T must be positive, got {T}")

    def integrand(tau):
        return np.abs(
            G_eval(f, law, cfg, 2 * sigma + 1j * tau)
            - G_eval(f, law, cfg, sigma + 1j * tau)
        )

    # G cancels D z**(-j) against the transform: its rounding error scales
    # like |z|**(-j), whose integral is sigma**(1-j) h_j / 2
    noise = cfg.eta_noise_rtol
    if f.exact_transform is None:
        noise = max(noise, cfg.quad.rel_tol)
    floor = (
        noise * max(law.D, 1.0) * sigma ** (1 - law.j)
        * h_j(sigma, law.j, T)
    )
    opts = replace(
        cfg.quad, rel_tol=cfg.eta_rel_tol,
        abs_tol=max(cfg.quad.abs_tol, floor)
    )
    val, _ = integrate_panels(integrand, _half_breaks(sigma, T), opts)
    return float(sigma ** (law.j - 1) * 2 * val.real)


def rho_from_eta(eta_func, t, j, T_grid, threads=None):
    """
    Minimize 1/T + eta(1/t, T) + (T t)**(-j) over T.

    The objective is evaluated on T_grid; an interior minimum is then
    refined by a golden-section search in log(T) between its neighbours.

    Parameters
    ----------
    eta_func : callable
        eta_func(sigma, T) returns the eta term.
    t : float
        The point where rho is evaluated.
    j : float
        The singularity exponent.
    T_grid : array-like
        Increasing grid of T.
    threads : int or None, optional
        Number of threads used on the grid. The default is None.

    Returns
    -------
    rho : float
        The minimum.
    T_best : float
        The minimizer.

    """
    sigma = 1.0 / t
    T_grid = np.asarray(T_grid, dtype=float)

    def objective(T):
        return 1.0 / T + eta_func(sigma, T) + (T * t) ** (-j)

    values = np.array(parallel_map(objective, T_grid, threads))
    k = int(np.argmin(values))
    best, T_best = float(values[k]), float(T_grid[k])

    if 0 < k < len(T_grid) - 1:
        bracket = tuple(np.log(T_grid[k - 1:k + 2]))
        try:
            res = optimize.minimize_scalar(
                lambda log_T: objective(np.exp(log_T)),
                bracket=bracket, method='golden', options={'xtol': 1e-4}
            )
        except ValueError:
            res = None
        if res is not None and np.isfinite(res.fun) and res.fun < best:
            best, T_best = float(res.fun), float(np.exp(res.x))
    return best, T_best


def rho(f, law, cfg, t):
    """
    Compute rho(t) and its minimizing T.

    Raises
    ------
    InvalidInputError
        If t < 1 or 1/t >= mu/2.
    """
    cfg = _resolved(cfg, f, law)
    if not t >= 1:
        raise InvalidInputError(f"rho needs t >= 1, got {t}")
    _check_sigma(1.0 / t, law.mu)

    def eta_func(sigma, T):
        return eta(f, law, cfg, sigma, T)

    return rho_from_eta(eta_func, t, law.j, cfg.T_grid, cfg.threads)


def envelope(f, law, cfg, t, rho_value=None):
    """
    Return the band (lo, hi) around phi at t.

    The band is (D/Gamma(j) -+ C rho(t)) * t**(j-1) * exp(-mu t), with the
    lower end clamped at zero.
    """
    cfg = _resolved(cfg, f, law)
    if rho_value is None:
        rho_value, _ = rho(f, law, cfg, t)
    base = t ** (law.j - 1) * np.exp(-law.mu * t)
    spread = cfg.envelope_constant * rho_value
    lo = max(0.0, law.leading - spread) * base
    hi = (law.leading + spread) * base
    return float(lo), float(hi)


def calibrate_envelope_constant(f, law, cfg, t_values):
    """
    Fit the envelope constant on known cases.

    For every t the constant needed to enclose phi(t) is
    |phi(t) / (t**(j-1) exp(-mu t)) - D/Gamma(j)| / rho(t).

    Returns
    -------
    C : float
        The largest of the constants.
    per_t : list of float
        The constant at each t.

    """
    cfg = _resolved(cfg, f, law)
    per_t = []
    for t in t_values:
        rho_value, _ = rho(f, law, cfg, t)
        scaled = np.exp(
            f.log_eval(np.array([t]))[0] - (law.j - 1) * np.log(t)
            + law.mu * t
        )
        per_t.append(float(abs(scaled - law.leading) / rho_value))
    return max(per_t), per_t


def limit_verdict(values, pass_ratio=0.05, fail_ratio=0.5, zero_tol=1e-14,
                  noise=None):
    """
    Classify a sequence of values that should tend to zero.

    Parameters
    ----------
    values : array-like
        The values, ordered as the decreasing sigma sequence.
    pass_ratio : float, optional
        The sequence passes if its last value is below pass_ratio times its
        largest value and the last three values strictly decrease. The
        largest value is used so that sequences rising before they decay
        are measured from their peak.
    fail_ratio : float, optional
        The sequence fails if its last value is at least fail_ratio times the
        middle one.
    zero_tol : float, optional
        Values below zero_tol are treated as zero.
    noise : array-like or None, optional
        Per-value rounding level; values below it are treated as zero.

    Returns
    -------
    verdict : Verdict
    note : str

    """
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return Verdict.INCONCLUSIVE, "empty sequence"
    if not np.all(np.isfinite(values)):
        return Verdict.FAIL, "non-finite values"
    floor = np.full(len(values), zero_tol)
    if noise is not None:
        floor = np.maximum(floor, np.asarray(noise, dtype=float))
    eff = np.where(values <= floor, 0.0, values)
    if np.all(eff == 0):
        return Verdict.PASS, "all values vanish up to rounding"
    if len(eff) < 3:
        return Verdict.INCONCLUSIVE, "sequence too short"

    peak, last, middle = np.max(eff), eff[-1], eff[(len(eff) - 1) // 2]
    if last < pass_ratio * peak and eff[-3] > eff[-2] > eff[-1]:
        ratio = peak / max(last, 1e-300)
        return Verdict.PASS, f"fell by a factor {ratio:.3g} from the peak"
    if last == 0 and eff[-2] == 0:
        return Verdict.PASS, "tail values vanish up to rounding"
    if last >= fail_ratio * middle:
        return Verdict.FAIL, "no decay along the sigma sequence"
    return Verdict.INCONCLUSIVE, "decay too slow to decide"


def bounded_verdict(values, growth_tol=0.05):
    """
    Classify a sequence of suprema that should stay bounded.

    The sequence passes when the last two relative increments are below
    growth_tol and fails when its last value is at least twice the middle
    one.
    """
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        return Verdict.FAIL, "non-finite values"
    if len(values) < 3:
        return Verdict.INCONCLUSIVE, "sequence too short"
    incr = np.abs(np.diff(values[-3:])) / np.maximum(values[-2:], 1e-300)
    if np.all(incr <= growth_tol):
        return Verdict.PASS, f"stable within {np.max(incr):.3g}"
    if values[-1] >= 2 * values[(len(values) - 1) // 2]:
        return Verdict.FAIL, "the remainder grows along the sigma sequence"
    return Verdict.INCONCLUSIVE, "the suprema are not yet stable"


def _region(mu, sigmas, T):
    return {'beta': mu - 2 * float(np.max(sigmas)), 'mu': mu, 'T': T}


def check_loglim(model, T, cfg=None):
    """
    Check the log-limit condition on F.

    For each sigma of cfg.condition_sigma_sequence the value
    |g_j(sigma)| * sup |F(mu - 2 sigma - i tau) - F(mu - sigma - i tau)|,
    with the supremum over |tau| <= T, is computed; the condition holds
    when the values tend to zero.

    Parameters
    ----------
    model : SingularityModel
        The singularity model.
    T : float
        Half height of the strip, T <= model.T_max.
    cfg : EngineConfig or None, optional
        The engine configuration.

    Raises
    ------
    InvalidInputError
        If T exceeds model.T_max or the sigmas are not below mu/2.

    Returns
    -------
    ConditionReport

    """
    cfg = EngineConfig() if cfg is None else cfg
    mu, j = model.mu, model.j
    if not 0 < T <= model.T_max:
        raise InvalidInputError(
            f"T = {T} must lie in (0, T_max = {model.T_max}]"
        )
    sigmas = cfg.condition_sigma_sequence
    _check_sigmas(sigmas, mu)

    def value(sigma):
        def diff(tau):
            return np.abs(
                model.F_eval(mu - 2 * sigma - 1j * tau)
                - model.F_eval(mu - sigma - 1j * tau)
            )
        sup, _ = grid_sup(diff, -T, T, cfg.n_tau)
        return abs(g_j(sigma, j)) * sup

    notes = []
    try:
        values = np.array(parallel_map(value, sigmas, cfg.threads))
        verdict, note = limit_verdict(
            values, cfg.pass_ratio, cfg.fail_ratio, cfg.zero_tol
        )
    except (TauberError, ArithmeticError, ValueError) as exc:
        values = np.full(len(sigmas), np.nan)
        verdict, note = Verdict.INCONCLUSIVE, f"F evaluation failed: {exc}"
    notes.append(note)
    return ConditionReport(
        condition='loglim',
        sigma_sequence=sigmas,
        values=values,
        verdict=verdict,
        notes=notes,
        region=_region(mu, sigmas, T),
        parameters={'j': float(j), 'f_class': FClass(model.f_class).value}
    )


def lipschitz_margin(model, beta, T, n_points=33, levels=12):
    """
    Estimate the Lipschitz constant of F on beta <= Re(z) <= mu, |Im(z)| <= T.

    Difference quotients in the imaginary direction are taken on a regular
    grid of the strip and on lines Re(z) = mu - d with d -> 0. Quotients
    that keep growing as the lines approach mu indicate that F is not
    holomorphic there.

    Parameters
    ----------
    model : SingularityModel
        The singularity model.
    beta : float
        Left edge of the strip, 0 < beta < mu.
    T : float
        Half height of the strip.
    n_points : int, optional
        Number of nodes per side of the grid. The default is 33.
    levels : int, optional
        Number of lines approaching mu. The default is 12.

    Raises
    ------
    InvalidInputError
        If beta is not in (0, mu).
    ReclassifySuggestion
        If the quotients grow as Re(z) -> mu.

    Returns
    -------
    float

    """
    mu = model.mu
    if not 0 < beta < mu:
        raise InvalidInputError(f"beta = {beta} must lie in (0, mu)")
    if not T > 0:
        raise InvalidInputError("T must be positive")
    if FClass(model.f_class) != FClass.HOLOMORPHIC:
        print(
            "WARNING: F is not declared holomorphic at mu, the Lipschitz "
            "estimate may not converge",
            file=sys.stderr
        )
    width = mu - beta
    tau = np.linspace(-T, T, 2 * (n_points // 2) + 1)

    def quotient(re_part, h):
        z = re_part + 1j * tau
        dF = model.F_eval(z + 1j * h) - model.F_eval(z - 1j * h)
        return float(np.max(np.abs(dF))) / (2 * h)

    h_grid = width / (8 * n_points)
    base = max(
        quotient(x, h_grid) for x in np.linspace(beta, mu, n_points)[:-1]
    )

    dists = width * 2.0 ** -np.arange(1, levels + 1)
    line_q = np.array([quotient(mu - d, d / 8) for d in dists])
    if not np.all(np.isfinite(line_q)):
        raise ReclassifySuggestion(
            "F is not finite near Re(z) = mu", quotients=line_q
        )
    n_cmp = min(4, levels - 1)
    if line_q[-1] > 2 * line_q[-1 - n_cmp] and line_q[-1] > 1e-12:
        raise ReclassifySuggestion(
            "The difference quotients of F grow as Re(z) -> mu: F does not "
            "look holomorphic at mu, consider the continuous-only class",
            quotients=line_q
        )
    return float(max(base, np.max(line_q)))


def _remainder(f, law, cfg):
    mu, j, D = law.mu, law.j, law.D

    def H(z):
        return (
            transform_values(f, z, cfg.quad, mu)
            - D * np.power(mu - z, -j)
        )
    return H


def check_dk(f, law, T, cfg=None):
    """
    Check the Delange-Korevaar condition on the remainder H.

    H(z) = L(z) - D/(mu - z)**j. For consecutive sigmas the values
    sup_{|tau|<=T} |H(mu - sigma_{k+1} - i tau) - H(mu - sigma_k - i tau)|
    must tend to zero.

    Raises
    ------
    HypothesisViolationError
        If j < 1.

    Returns
    -------
    ConditionReport

    """
    if law.j < 1:
        raise HypothesisViolationError(
            f"The DK condition needs j >= 1, got j = {law.j}"
        )
    cfg = EngineConfig() if cfg is None else cfg
    mu, j = law.mu, law.j
    sigmas = cfg.condition_sigma_sequence
    _check_sigmas(sigmas, mu)
    H = _remainder(f, law, cfg)

    def value(k):
        s_0, s_1 = sigmas[k], sigmas[k + 1]

        def diff(tau):
            return np.abs(H(mu - s_1 - 1j * tau) - H(mu - s_0 - 1j * tau))
        sup, _ = grid_sup(diff, -T, T, cfg.n_tau)
        return sup

    values = np.array(
        parallel_map(value, range(len(sigmas) - 1), cfg.threads)
    )
    # Rounding level of the cancellation between L and the singular part
    noise = cfg.noise_rtol * max(law.D, 1.0) * sigmas[1:] ** (-j)
    verdict, note = limit_verdict(
        values, cfg.pass_ratio, cfg.fail_ratio, cfg.zero_tol, noise
    )
    return ConditionReport(
        condition='dk',
        sigma_sequence=sigmas[1:],
        values=values,
        verdict=verdict,
        notes=[note],
        region=_region(mu, sigmas, T),
        parameters={'j': float(j), 'D': float(law.D)}
    )


def check_bounded_H(f, law, T, cfg=None):
    """
    Check that the remainder H stays bounded near Re(z) = mu.

    The suprema sup_{|tau|<=T} |H(mu - sigma - i tau)| must stabilize
    along the sigma sequence.

    Raises
    ------
    HypothesisViolationError
        If j <= 1.

    Returns
    -------
    ConditionReport

    """
    if law.j <= 1:
        raise HypothesisViolationError(
            f"The boundedness condition needs j > 1, got j = {law.j}"
        )
    cfg = EngineConfig() if cfg is None else cfg
    mu = law.mu
    sigmas = cfg.condition_sigma_sequence
    _check_sigmas(sigmas, mu)
    H = _remainder(f, law, cfg)

    def value(sigma):
        sup, _ = grid_sup(
            lambda tau: np.abs(H(mu - sigma - 1j * tau)), -T, T, cfg.n_tau
        )
        return sup

    values = np.array(parallel_map(value, sigmas, cfg.threads))
    verdict, note = bounded_verdict(values, cfg.growth_tol)
    return ConditionReport(
        condition='bounded_H',
        sigma_sequence=sigmas,
        values=values,
        verdict=verdict,
        notes=[note],
        region=_region(mu, sigmas, T),
        parameters={'j': float(law.j), 'D': float(law.D)}
    )


def diagnostics_AB(model, cfg, sigma, T):
    """
    Compute the two error terms A_j and B_j of eta.

    A_j = sigma**(j-1) int |F(mu - 2 sigma - i tau) - F(mu - sigma - i tau)|
    / |sigma + i tau|**j and B_j = sigma**(j-1) int |F(mu - 2 sigma - i tau)
    - F(mu)| |(2 sigma + i tau)**(-j) - (sigma + i tau)**(-j)|, both over
    |tau| <= T.

    Returns
    -------
    A_j : float
    B_j : float

    """
    cfg = EngineConfig() if cfg is None else cfg
    mu, j = model.mu, model.j
    _check_sigma(sigma, mu)
    if not T > 0:
        raise InvalidInputError("T must be positive")
    F_mu = model.F_eval(np.array([mu]))[0]

    def a_integrand(tau):
        dF = (
            model.F_eval(mu - 2 * sigma - 1j * tau)
            - model.F_eval(mu - sigma - 1j * tau)
        )
        return np.abs(dF) / np.abs(sigma + 1j * tau) ** j

    def b_integrand(tau):
        dF = model.F_eval(mu - 2 * sigma - 1j * tau) - F_mu
        dk = (
            np.power(2 * sigma + 1j * tau, -j)
            - np.power(sigma + 1j * tau, -j)
        )
        return np.abs(dF) * np.abs(dk)

    opts = replace(cfg.quad, rel_tol=cfg.eta_rel_tol)
    breaks = _symmetric_breaks(sigma, T)
    a_val, _ = integrate_panels(a_integrand, breaks, opts)
    b_val, _ = integrate_panels(b_integrand, breaks, opts)
    scale = sigma ** (j - 1)
    return float(scale * a_val.real), float(scale * b_val.real)


def diagnostics_AB_bounds(model, cfg, sigma, T):
    """
    Compute the upper bounds of A_j and B_j.

    A_j <= sup |F(mu - 2 sigma - i tau) - F(mu - sigma - i tau)| h_j and
    B_j <= j [sup_{|tau|<=sqrt(sigma)} |F(mu - 2 sigma - i tau) - F(mu)|
    h_{j+1} + 4 C_1 I_j], with C_1 the largest |F| on the evaluation points.
    The factor j comes from
    |(2 sigma + i tau)**(-j) - (sigma + i tau)**(-j)|
    <= j sigma |sigma + i tau|**(-j-1).

    Returns
    -------
    A_bound : float
    B_bound : float

    """
    cfg = EngineConfig() if cfg is None else cfg
    mu, j = model.mu, model.j
    _check_sigma(sigma, mu)
    F_mu = model.F_eval(np.array([mu]))[0]

    def left(tau):
        return model.F_eval(mu - 2 * sigma - 1j * np.asarray(tau))

    sup_a, _ = grid_sup(
        lambda tau: np.abs(left(tau) - model.F_eval(mu - sigma - 1j * tau)),
        -T, T, cfg.n_tau
    )
    a_bound = sup_a * h_j(sigma, j, T)

    near = min(np.sqrt(sigma), T)
    sup_b, _ = grid_sup(
        lambda tau: np.abs(left(tau) - F_mu), -near, near, cfg.n_tau
    )
    sup_f, _ = grid_sup(lambda tau: np.abs(left(tau)), -T, T, cfg.n_tau)
    c_1 = max(sup_f, abs(F_mu))
    b_bound = j * (sup_b * h_j(sigma, j + 1, T) + 4 * c_1 * i_j(sigma, j, T))
    return float(a_bound), float(b_bound)
