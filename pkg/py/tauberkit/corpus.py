#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides a corpus of decay functions with known transforms,
singularity models and asymptotic laws, used as ground truth for the
engine and the estimator.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special
from astropy.table import Table

from .errors import InvalidInputError, TauberError
from .model import DecayFunction, SingularityModel, FClass, AsymptoticLaw
from .model import validate_nonincreasing, validate_nu_certificate
from .model import estimate_min_nu
from .engine import EngineConfig, predict, check_loglim
from .estimator import ratio_table
from .quadrature import laplace, parts_identity_residual, alpha_transform
from .specialfn import upper_incomplete_gamma, lower_incomplete_gamma_scaled
from .utils import strip_grid, strip_points


DEFAULT_CORRECTIONS = (1.0, 2.0)
HALF_POWER_CORRECTIONS = (0.5, 1.0, 2.0)


@dataclass(frozen=True, eq=False)
class Exemplar:
    """
    A decay function together with its ground truth.

    Parameters
    ----------
    name : str
        The name of the family.
    f : DecayFunction
        The decay function, carrying its exact transform.
    model : SingularityModel
        The singular structure of the transform.
    law : AsymptoticLaw
        The asymptotic law predicted from the model.
    params : dict
        The parameters of the family.
    ratio_horizon : float
        A time beyond which phi/phi_hat is within 2% of 1.
    correction_powers : tuple of float
        Powers p of the corrections t**-p suited to the estimator.
    notes : list of str
        Free text notes.

    """

    name: str
    f: DecayFunction
    model: SingularityModel
    law: AsymptoticLaw
    params: dict = field(default_factory=dict)
    ratio_horizon: float = 100.0
    correction_powers: tuple = DEFAULT_CORRECTIONS
    notes: list = field(default_factory=list)

    @property
    def exact_transform(self):
        return self.f.exact_transform

    def to_dict(self):
        return {
            'name': self.name,
            'params': {k: float(v) for k, v in self.params.items()},
            'law': self.law.to_dict(),
            'nu': self.f.nu_certificate,
            'f_class': self.model.f_class.value,
            'ratio_horizon': float(self.ratio_horizon),
            'correction_powers': [float(p) for p in self.correction_powers],
            'notes': list(self.notes),
        }


def _check_positive(**kwargs):
    for key, val in kwargs.items():
        if not (np.isfinite(val) and val > 0):
            raise InvalidInputError(f"{key} must be positive, got {val}")


def shifted_gamma(mu, j, c=0.0):
    """
    Build the shifted Gamma exemplar phi(t) = (t + c)**(j-1) exp(-mu (t + c)).

    The transform is exp(-z c) Gamma(j, c (mu - z)) / (mu - z)**j, so that
    F(z) = Gamma(j) exp(-z c) and H(z) = -c**j exp(-z c) gamma*(j, c (mu - z))
    with gamma*(s, x) = x**(-s) gamma(s, x) entire.

    Parameters
    ----------
    mu : float
        The decay rate, mu > 0.
    j : float
        The singularity exponent, j > 0.
    c : float, optional
        The shift, c >= max(0, (j - 1)/mu), and c > 0 if j < 1. The default
        is 0.

    Raises
    ------
    InvalidInputError
        If the parameters are out of range.

    Returns
    -------
    Exemplar

    """
    _check_positive(mu=mu, j=j)
    if not (np.isfinite(c) and c >= 0):
        raise InvalidInputError(f"c must be non-negative, got {c}")
    if c < (j - 1) / mu - 1e-12:
        raise InvalidInputError(
            f"c = {c} must be at least (j - 1)/mu = {(j - 1) / mu:.6g}, "
            "otherwise phi is not monotone"
        )
    if j < 1 and c == 0:
        raise InvalidInputError("j < 1 needs c > 0, phi is unbounded at 0")

    gamma_j = special.gamma(j)

    def log_func(t):
        t = np.asarray(t, dtype=float)
        if j == 1:
            return -mu * (t + c)
        return (j - 1) * np.log(t + c) - mu * (t + c)

    def func(t):
        return np.exp(log_func(t))

    def log_derivative(t):
        t = np.asarray(t, dtype=float)
        if j == 1:
            return np.full_like(t, -mu)
        return (j - 1) / (t + c) - mu

    def exact_transform(z):
        z = np.asarray(z, dtype=complex)
        s = mu - z
        return (
            np.exp(-z * c) * upper_incomplete_gamma(j, c * s)
            / np.power(s, j)
        )

    def F(z):
        return gamma_j * np.exp(-np.asarray(z, dtype=complex) * c)

    def H(z):
        z = np.asarray(z, dtype=complex)
        if c == 0:
            return np.zeros_like(z)
        return (
            -c ** j * np.exp(-z * c)
            * lower_incomplete_gamma_scaled(j, c * (mu - z))
        )

    nu = mu if j >= 1 else mu + (1 - j) / c
    f = DecayFunction(
        func=func,
        nu_certificate=nu,
        mu_hint=mu,
        log_func=log_func,
        log_derivative=log_derivative,
        exact_transform=exact_transform,
        name=f"shifted_gamma(mu={mu:g}, j={j:g}, c={c:g})"
    )
    model = SingularityModel(mu=mu, j=j, F=F, H=H, f_class=FClass.HOLOMORPHIC)
    return Exemplar(
        name='shifted_gamma',
        f=f,
        model=model,
        law=predict(model),
        params={'mu': mu, 'j': j, 'c': c},
        ratio_horizon=100 * max(c, 1 / mu),
        correction_powers=DEFAULT_CORRECTIONS,
    )


def half_power(mu, c):
    """
    Build the exemplar phi(t) = exp(-mu (t + c)) (1 + (t + c)**(-1/2)).

    Its transform exp(-mu c) [1/(mu - z) + sqrt(pi) erfcx(sqrt(c (mu - z)))
    / (mu - z)**(1/2)] has j = 1 and F(z) = exp(-mu c) [1 + sqrt(pi)
    (mu - z)**(1/2) erfcx(sqrt(c (mu - z)))], which is continuous but not
    holomorphic at mu.
    """
    _check_positive(mu=mu, c=c)
    scale = np.exp(-mu * c)

    def log_func(t):
        u = np.asarray(t, dtype=float) + c
        return -mu * u + np.log1p(u ** -0.5)

    def func(t):
        return np.exp(log_func(t))

    def log_derivative(t):
        u = np.asarray(t, dtype=float) + c
        return -mu - 0.5 / (u ** 1.5 + u)

    def exact_transform(z):
        s = mu - np.asarray(z, dtype=complex)
        return scale * (
            1 / s + np.sqrt(np.pi) * special.erfcx(np.sqrt(c * s))
            / np.sqrt(s)
        )

    def F(z):
        s = mu - np.asarray(z, dtype=complex)
        return scale * (
            1 + np.sqrt(np.pi) * np.sqrt(s) * special.erfcx(np.sqrt(c * s))
        )

    f = DecayFunction(
        func=func,
        nu_certificate=mu + 0.5 / (c ** 1.5 + c),
        mu_hint=mu,
        log_func=log_func,
        log_derivative=log_derivative,
        exact_transform=exact_transform,
        name=f"half_power(mu={mu:g}, c={c:g})"
    )
    model = SingularityModel(mu=mu, j=1.0, F=F, f_class=FClass.CONTINUOUS)
    return Exemplar(
        name='half_power',
        f=f,
        model=model,
        law=predict(model),
        params={'mu': mu, 'c': c},
        ratio_horizon=1e4 * max(c, 1 / mu),
        correction_powers=HALF_POWER_CORRECTIONS,
        notes=["phi/phi_hat - 1 decays like t**(-1/2)"],
    )


def mixture(e1, e2, w1=1.0, w2=1.0):
    """
    Build the exemplar phi = w1 phi_1 + w2 phi_2 with mu_1 < mu_2.

    The singularity at mu_1 dominates: F = w1 F_1, while the transform of
    phi_2 is holomorphic on Re(z) < mu_2 and goes into H.

    Raises
    ------
    InvalidInputError
        If a weight is not positive or mu_1 >= mu_2.
    """
    _check_positive(w1=w1, w2=w2)
    mu1, mu2 = e1.law.mu, e2.law.mu
    if mu1 == mu2:
        raise InvalidInputError(
            "The two components have the same singularity mu, their "
            "singular parts would collide"
        )
    if mu1 > mu2:
        raise InvalidInputError("The first component must have mu_1 < mu_2")
    f1, f2 = e1.f, e2.f
    log_w1, log_w2 = np.log(w1), np.log(w2)

    def log_func(t):
        return np.logaddexp(log_w1 + f1.log_eval(t), log_w2 + f2.log_eval(t))

    def func(t):
        return np.exp(log_func(t))

    def log_derivative(t):
        l1 = log_w1 + f1.log_eval(t)
        l2 = log_w2 + f2.log_eval(t)
        weight_2 = special.expit(l2 - l1)
        return (1 - weight_2) * f1.dlog_eval(t) + weight_2 * f2.dlog_eval(t)

    def exact_transform(z):
        return w1 * f1.exact_transform(z) + w2 * f2.exact_transform(z)

    def F(z):
        return w1 * e1.model.F_eval(z)

    def H(z):
        return w1 * e1.model.H_eval(z) + w2 * f2.exact_transform(z)

    nu = None
    if f1.nu_certificate is not None and f2.nu_certificate is not None:
        nu = max(f1.nu_certificate, f2.nu_certificate)
    f = DecayFunction(
        func=func,
        nu_certificate=nu,
        mu_hint=mu1,
        log_func=log_func,
        log_derivative=log_derivative,
        exact_transform=exact_transform,
        name=f"mixture({f1.name}, {f2.name})"
    )
    model = SingularityModel(
        mu=mu1, j=e1.law.j, F=F, H=H, f_class=e1.model.f_class,
        T_max=min(e1.model.T_max, e2.model.T_max)
    )
    return Exemplar(
        name='mixture',
        f=f,
        model=model,
        law=predict(model),
        params={'w1': w1, 'w2': w2, 'mu1': mu1, 'mu2': mu2},
        ratio_horizon=max(e1.ratio_horizon, 100 / (mu2 - mu1)),
        correction_powers=e1.correction_powers,
    )


def bounded_remainder(mu):
    """
    Build the exemplar phi(t) = t exp(-mu t) + exp(-2 mu t) / (2 mu).

    The transform 1/(mu - z)**2 + 1/(2 mu (2 mu - z)) has j = 2, F = 1 and a
    remainder H that is bounded up to Re(z) = mu.
    """
    _check_positive(mu=mu)

    def log_func(t):
        t = np.asarray(t, dtype=float)
        return -mu * t + np.log(t + np.exp(-mu * t) / (2 * mu))

    def func(t):
        return np.exp(log_func(t))

    def log_derivative(t):
        t = np.asarray(t, dtype=float)
        e = np.exp(-mu * t)
        return -mu + (1 - e / 2) / (t + e / (2 * mu))

    def H(z):
        return 1 / (2 * mu * (2 * mu - np.asarray(z, dtype=complex)))

    def exact_transform(z):
        z = np.asarray(z, dtype=complex)
        return 1 / (mu - z) ** 2 + H(z)

    f = DecayFunction(
        func=func,
        nu_certificate=mu,
        mu_hint=mu,
        log_func=log_func,
        log_derivative=log_derivative,
        exact_transform=exact_transform,
        name=f"bounded_remainder(mu={mu:g})"
    )
    model = SingularityModel(
        mu=mu, j=2.0, F=lambda z: np.ones_like(np.asarray(z, dtype=complex)),
        H=H, f_class=FClass.HOLOMORPHIC
    )
    return Exemplar(
        name='bounded_remainder',
        f=f,
        model=model,
        law=predict(model),
        params={'mu': mu},
        ratio_horizon=100 / mu,
        correction_powers=DEFAULT_CORRECTIONS,
    )


def loglim_counterexample(mu):
    """
    Return an F, continuous at mu, violating the log-limit condition for j=1.

    With s = mu - Re(z) and x = max(0, log2(1/s)), F = 1 + cos(pi x) psi(x)
    where psi(x) = 1/(1 + x) + 4 * 2**(-x). F(mu) = 1 and F is continuous,
    but |log(sigma)| |F(mu - 2 sigma) - F(mu - sigma)| does not vanish.
    F does not depend on Im(z).
    """
    _check_positive(mu=mu)

    def F(z):
        z = np.asarray(z, dtype=complex)
        s = mu - z.real
        with np.errstate(divide='ignore'):
            x = np.where(s > 0, np.log2(1 / np.where(s > 0, s, 1.0)), np.inf)
        x = np.maximum(x, 0.0)
        finite = np.isfinite(x)
        x_f = np.where(finite, x, 0.0)
        psi = 1 / (1 + x_f) + 4 * 2.0 ** -x_f
        val = np.where(finite, 1 + np.cos(np.pi * x_f) * psi, 1.0)
        return val.astype(complex)
    return F


def counterexample_model(mu, j=1.0, T_max=100.0):
    """Wrap loglim_counterexample(mu) into a singularity model."""
    return SingularityModel(
        mu=mu, j=j, F=loglim_counterexample(mu), f_class=FClass.CONTINUOUS,
        T_max=T_max
    )


def _mixture_of_exponentials(mu1=1.0, mu2=2.0, w1=1.0, w2=1.0):
    return mixture(shifted_gamma(mu1, 1.0), shifted_gamma(mu2, 1.0), w1, w2)


_REGISTRY = {
    'shifted_gamma': (shifted_gamma, {'mu': 1.0, 'j': 2.0, 'c': 1.0}),
    'half_power': (half_power, {'mu': 1.0, 'c': 1.0}),
    'mixture': (
        _mixture_of_exponentials,
        {'mu1': 1.0, 'mu2': 2.0, 'w1': 1.0, 'w2': 1.0}
    ),
    'bounded_remainder': (bounded_remainder, {'mu': 1.0}),
}


def names():
    """Return the names of the registered exemplars."""
    return list(_REGISTRY)


def get(name, **params):
    """
    Build a registered exemplar.

    Parameters
    ----------
    name : str
        One of names().
    **params
        Overrides of the default parameters.

    Raises
    ------
    InvalidInputError
        If the name or a parameter is unknown.

    Returns
    -------
    Exemplar

    """
    if name not in _REGISTRY:
        raise InvalidInputError(
            f"Unknown exemplar '{name}', choose among {', '.join(names())}"
        )
    builder, defaults = _REGISTRY[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise InvalidInputError(
            f"Unknown parameters for '{name}': {', '.join(sorted(unknown))}"
        )
    return builder(**{**defaults, **params})


def registry():
    """Return the default exemplars, keyed by name."""
    return {name: get(name) for name in _REGISTRY}


def sample_table(exemplar, t_grid):
    """
    Sample an exemplar on a grid.

    Returns
    -------
    astropy.table.Table
        A table with columns 't' and 'phi'.

    """
    t_grid = np.asarray(t_grid, dtype=float)
    tbl = Table([t_grid, exemplar.f(t_grid)], names=['t', 'phi'])
    tbl.meta['exemplar'] = exemplar.f.name
    return tbl


def sampled(exemplar, t_grid, name: Optional[str] = None):
    """Return a sampled copy of the decay function of an exemplar."""
    t_grid = np.asarray(t_grid, dtype=float)
    return DecayFunction.from_samples(
        t_grid, exemplar.f(t_grid), mu_hint=exemplar.law.mu,
        nu_certificate=exemplar.f.nu_certificate,
        name=name or f"sampled {exemplar.f.name}"
    )


def _relative_error(value, reference):
    return float(np.max(np.abs(value - reference) / (1 + np.abs(reference))))


def verify(exemplar, cfg=None, n_points=20):
    """
    Verify the invariants of an exemplar.

    The checks are: the quadrature of the transform against the exact one,
    the monotonicity of phi and its certificate nu, the law, the singular
    representation of the transform, the integration by parts identity and
    the two routes of the alpha transform, the ratio phi/phi_hat at the
    horizon and the log-limit condition on F.

    Parameters
    ----------
    exemplar : Exemplar
        The exemplar.
    cfg : EngineConfig or None, optional
        The engine configuration.
    n_points : int, optional
        Number of strip points of the identity checks. The default is 20.

    Returns
    -------
    astropy.table.Table
        One row per check with columns 'exemplar', 'check', 'passed' and
        'value'.

    """

    f, law, model = exemplar.f, exemplar.law, exemplar.model
    mu = law.mu
    cfg = EngineConfig() if cfg is None else cfg
    cfg = cfg if cfg.is_resolved else cfg.resolve(f, mu)
    re_range = (0.05 * mu, 0.95 * mu)
    z_grid = strip_grid(re_range, (-5, 5))
    z_strip = strip_points(n_points, re_range, (-5, 5))
    t_check = np.linspace(0, 50 / mu, 2001)

    def transform_error():
        lap = np.array([laplace(f, z, cfg.quad, mu) for z in z_grid])
        err = _relative_error(lap, f.exact_transform(z_grid))
        return err <= 1e-8, err

    def monotone():
        ok = validate_nonincreasing(f, t_check)
        ok = ok and validate_nu_certificate(f, t_check)
        return ok, estimate_min_nu(f, t_check)

    def law_check():
        err = abs(predict(model).D - law.D)
        return err <= 1e-10 * max(1.0, law.D), err

    def representation():
        err = _relative_error(
            model.representation(z_grid), f.exact_transform(z_grid)
        )
        return err <= 1e-9, err

    def parts_identity():
        worst = 0.0
        for z in z_strip:
            res = parts_identity_residual(f, z, cfg.quad, mu)
            scale = 1 + f.phi0 + abs(z * f.exact_transform(z))
            worst = max(worst, res / scale)
            alpha_transform(f, cfg.a, mu - z, cfg.quad, mu)
        return worst <= 1e-7, worst

    def ratio():
        grid = np.geomspace(10 / mu, exemplar.ratio_horizon, 20)
        report = ratio_table(f, law, grid, tol=0.02)
        return report.passed, report.final_deviation

    def loglim():
        report = check_loglim(model, min(5.0, model.T_max), cfg)
        return report.passed, float(report.values[-1])

    checks = [
        ('transform', transform_error), ('monotone', monotone),
        ('law', law_check), ('representation', representation),
        ('parts_identity', parts_identity), ('ratio', ratio),
        ('loglim', loglim),
    ]
    rows = []
    for check_name, check in checks:
        try:
            passed, value = check()
        except TauberError as exc:
            print(
                f"WARNING: check '{check_name}' of '{f.name}' failed: {exc}",
                file=sys.stderr
            )
            passed, value = False, np.nan
        rows.append((f.name, check_name, bool(passed), float(value)))
    return Table(rows=rows, names=['exemplar', 'check', 'passed', 'value'])
