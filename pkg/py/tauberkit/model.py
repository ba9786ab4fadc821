#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides the domain types: decay functions, singularity models,
asymptotic laws and the reports produced by the checkers, together with the
validation of the standing hypotheses on the decay function.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import sys
from enum import Enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special
from astropy.table import Table

from .errors import InvalidInputError, DomainViolationError
from .errors import CannotCertifyError


MONOTONE_RTOL_CLOSED = 1e-12
MONOTONE_RTOL_SAMPLED = 1e-9

# Fraction of the samples used to estimate the rate of the tail extension
TAIL_FRACTION = 0.1


class FunctionKind(str, Enum):
    CLOSED_FORM = 'closed-form'
    SAMPLED = 'sampled-grid'


class FClass(str, Enum):
    HOLOMORPHIC = 'holomorphic-at-mu'
    CONTINUOUS = 'continuous-only'
    DK_LIMIT = 'dk-limit'


class Verdict(str, Enum):
    PASS = 'pass'
    FAIL = 'fail'
    INCONCLUSIVE = 'inconclusive'


def _as_float_array(t):
    return np.asarray(t, dtype=float)


@dataclass(frozen=True)
class DecayFunction:
    """
    A positive non-increasing function on [0, inf).

    Parameters
    ----------
    func : callable
        Vectorized evaluator of phi(t).
    kind : FunctionKind
        Whether phi is given in closed form or by samples.
    samples : 2-tuple of numpy.ndarray or None
        The (t, phi) samples of a sampled function.
    nu_certificate : float or None
        A value nu such that exp(nu*t)*phi(t) is non-decreasing.
    phi0 : float or None
        The value phi(0). Computed from func when not given.
    mu_hint : float or None
        The known (or estimated) exponential decay rate of phi.
    log_func : callable or None
        Vectorized evaluator of log(phi(t)), used where phi underflows.
    log_derivative : callable or None
        Vectorized evaluator of d/dt log(phi(t)).
    exact_transform : callable or None
        Vectorized oracle of the Laplace transform int exp(zt) phi(t) dt.
    name : str
        A short name used in reports.

    """

    func: Callable
    kind: FunctionKind = FunctionKind.CLOSED_FORM
    samples: Optional[tuple] = None
    nu_certificate: Optional[float] = None
    phi0: Optional[float] = None
    mu_hint: Optional[float] = None
    log_func: Optional[Callable] = None
    log_derivative: Optional[Callable] = None
    exact_transform: Optional[Callable] = None
    name: str = 'phi'

    def __post_init__(self):
        if self.nu_certificate is not None and not self.nu_certificate > 0:
            raise InvalidInputError("nu_certificate must be positive")
        if self.mu_hint is not None and not self.mu_hint > 0:
            raise InvalidInputError("mu_hint must be positive")
        if self.phi0 is None:
            object.__setattr__(
                self, 'phi0', float(np.asarray(self.func(np.array([0.0])))[0])
            )
        if not np.isfinite(self.phi0) or self.phi0 < 0:
            raise DomainViolationError(f"Invalid value phi(0) = {self.phi0}")

    def __call__(self, t):
        return np.asarray(self.func(_as_float_array(t)), dtype=float)

    def log_eval(self, t):
        """Evaluate log(phi(t)), -inf where phi vanishes."""
        t = _as_float_array(t)
        if self.log_func is not None:
            return np.asarray(self.log_func(t), dtype=float)
        with np.errstate(divide='ignore'):
            return np.log(self(t))

    def dlog_eval(self, t):
        """
        Evaluate the logarithmic derivative of phi.

        If no analytic derivative is available, a central difference of
        log(phi) is used.
        """
        t = _as_float_array(t)
        if self.log_derivative is not None:
            return np.asarray(self.log_derivative(t), dtype=float)
        h = 1e-5 * (1.0 + t)
        t_lo = np.maximum(t - h, 0.0)
        return (self.log_eval(t + h) - self.log_eval(t_lo)) / (t + h - t_lo)

    @property
    def is_sampled(self):
        return self.kind == FunctionKind.SAMPLED

    @classmethod
    def from_samples(cls, t, phi, mu_hint=None, nu_certificate=None,
                     name='samples'):
        """
        Build a decay function from samples.

        Values between samples are obtained by linear interpolation. Beyond
        the last sample, phi is extended by an exponential tail with rate
        mu_hint or, if it is not given, with the rate estimated from the last
        samples.

        Parameters
        ----------
        t : array-like
            Strictly increasing sample times, the first one must be 0.
        phi : array-like
            Non-negative sample values.
        mu_hint : float or None, optional
            Known decay rate. The default is None.
        nu_certificate : float or None, optional
            The regularity certificate nu. The default is None.
        name : str, optional
            The name of the function. The default is 'samples'.

        Raises
        ------
        InvalidInputError
            If the samples are malformed.
        DomainViolationError
            If some samples are negative.

        Returns
        -------
        DecayFunction

        """
        t = _as_float_array(t).ravel()
        phi = _as_float_array(phi).ravel()
        if len(t) != len(phi):
            raise InvalidInputError("t and phi must have the same length")
        if len(t) < 2:
            raise InvalidInputError("At least two samples are required")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(phi))):
            raise InvalidInputError("Samples must be finite")
        if t[0] != 0:
            raise InvalidInputError("The first sample must be at t = 0")
        if np.any(np.diff(t) <= 0):
            raise InvalidInputError("Sample times must be strictly increasing")
        if np.any(phi < 0):
            raise DomainViolationError("Sampled values must be non-negative")

        tail_rate = mu_hint
        if tail_rate is None:
            tail_rate = _estimate_tail_rate(t, phi)
            if tail_rate is not None:
                print(
                    f"WARNING: no decay rate given for '{name}', the samples "
                    f"are extended with the estimated rate {tail_rate:.6g}",
                    file=sys.stderr
                )
        t_last, phi_last = t[-1], phi[-1]

        def func(x):
            x = _as_float_array(x)
            vals = np.interp(x, t, phi)
            beyond = x > t_last
            if np.any(beyond):
                if tail_rate is None or phi_last == 0:
                    vals = np.where(beyond, 0.0, vals)
                else:
                    vals = np.where(
                        beyond,
                        phi_last * np.exp(-tail_rate * (x - t_last)),
                        vals
                    )
            return vals

        return cls(
            func=func,
            kind=FunctionKind.SAMPLED,
            samples=(t, phi),
            nu_certificate=nu_certificate,
            phi0=float(phi[0]),
            mu_hint=tail_rate,
            name=name
        )

    @classmethod
    def from_csv(cls, filename, mu_hint=None, nu_certificate=None):
        """
        Read a sampled decay function from a CSV file with header 't,phi'.

        Parameters
        ----------
        filename : str
            The path of the CSV file.
        mu_hint : float or None, optional
            Known decay rate. The default is None.
        nu_certificate : float or None, optional
            The regularity certificate nu. The default is None.

        Raises
        ------
        InvalidInputError
            If the file cannot be parsed. The message reports the line
            number of the first offending row.

        Returns
        -------
        DecayFunction

        """
        try:
            tbl = Table.read(filename, format='ascii.csv')
        except Exception as exc:
            raise InvalidInputError(f"Cannot read '{filename}': {exc}")

        for col in ('t', 'phi'):
            if col not in tbl.colnames:
                raise InvalidInputError(
                    f"{filename}: line 1: missing column '{col}' in header"
                )

        t = _column_to_float(tbl['t'], filename)
        phi = _column_to_float(tbl['phi'], filename)

        # The header is line 1, so row k is on line k + 2
        if len(t) == 0:
            raise InvalidInputError(f"{filename}: no samples found")
        if t[0] != 0:
            raise InvalidInputError(f"{filename}: line 2: first t must be 0")
        bad = np.nonzero(np.diff(t) <= 0)[0]
        if len(bad):
            raise InvalidInputError(
                f"{filename}: line {bad[0] + 3}: t is not strictly increasing"
            )
        bad = np.nonzero(phi < 0)[0]
        if len(bad):
            raise InvalidInputError(
                f"{filename}: line {bad[0] + 2}: negative phi"
            )
        return cls.from_samples(
            t, phi, mu_hint=mu_hint, nu_certificate=nu_certificate,
            name=str(filename)
        )

    def to_table(self, t_grid=None):
        """
        Tabulate the function.

        Parameters
        ----------
        t_grid : array-like or None, optional
            The evaluation grid. Sampled functions use their samples when it
            is None. The default is None.

        Returns
        -------
        astropy.table.Table
            A table with columns 't' and 'phi'.

        """
        if t_grid is None:
            if self.samples is None:
                raise InvalidInputError(
                    "A t-grid is required for closed-form functions"
                )
            t_grid, values = self.samples
        else:
            t_grid = _as_float_array(t_grid)
            values = self(t_grid)
        return Table([t_grid, values], names=['t', 'phi'])

    def to_csv(self, filename, t_grid=None):
        """Write the function to a CSV file with header 't,phi'."""
        self.to_table(t_grid).write(
            filename, format='ascii.csv', overwrite=True
        )


def _column_to_float(col, filename):
    values = np.empty(len(col), dtype=float)
    for k, val in enumerate(col):
        try:
            values[k] = float(val)
        except (TypeError, ValueError):
            raise InvalidInputError(
                f"{filename}: line {k + 2}: '{val}' is not a number"
            )
        if not np.isfinite(values[k]):
            raise InvalidInputError(
                f"{filename}: line {k + 2}: non-finite value"
            )
    return values


def _estimate_tail_rate(t, phi):
    n_tail = max(2, int(np.ceil(TAIL_FRACTION * len(t))))
    t_tail, phi_tail = t[-n_tail:], phi[-n_tail:]
    if np.any(phi_tail <= 0):
        return None
    rate = -(np.log(phi_tail[-1]) - np.log(phi_tail[0]))
    rate /= (t_tail[-1] - t_tail[0])
    return rate if rate > 0 else None


@dataclass(frozen=True)
class SingularityModel:
    """
    The singular structure of the transform of a decay function.

    The transform is represented as F(z)/(mu - z)**j + H(z) on the strip
    0 < Re(z) <= mu, |Im(z)| <= T_max.
    """

    mu: float
    j: float
    F: Callable
    H: Optional[Callable] = None
    f_class: FClass = FClass.HOLOMORPHIC
    T_max: float = 100.0

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise InvalidInputError(f"mu must be positive, got {self.mu}")
        if not (np.isfinite(self.j) and self.j > 0):
            raise InvalidInputError(f"j must be positive, got {self.j}")
        if not self.T_max > 0:
            raise InvalidInputError("T_max must be positive")
        object.__setattr__(self, 'f_class', FClass(self.f_class))

    def F_eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.F(z), dtype=complex) * np.ones_like(z)

    def H_eval(self, z):
        z = np.asarray(z, dtype=complex)
        if self.H is None:
            return np.zeros_like(z)
        return np.asarray(self.H(z), dtype=complex) * np.ones_like(z)

    def representation(self, z):
        """Evaluate F(z)/(mu - z)**j + H(z) with the principal branch."""
        z = np.asarray(z, dtype=complex)
        return self.F_eval(z) / np.power(self.mu - z, self.j) + self.H_eval(z)

    def check_continuity(self, beta, T=None, n_points=64, jump_tol=0.25):
        """
        Check numerically that F is continuous on the closed strip.

        F is evaluated on a regular grid of beta <= Re(z) <= mu,
        |Im(z)| <= T and the largest jump between neighbouring nodes is
        compared with the size of F.

        Parameters
        ----------
        beta : float
            Left edge of the strip, 0 < beta < mu.
        T : float or None, optional
            Half height of the strip, defaults to T_max.
        n_points : int, optional
            Number of nodes per side. The default is 64.
        jump_tol : float, optional
            Admitted jump relative to 1 + max|F|. The default is 0.25.

        Returns
        -------
        bool

        """
        if not 0 < beta < self.mu:
            raise InvalidInputError("beta must be in (0, mu)")
        T = self.T_max if T is None else T
        re_part = np.linspace(beta, self.mu, n_points)
        im_part = np.linspace(-T, T, n_points)
        vals = self.F_eval(re_part[None, :] + 1j * im_part[:, None])
        if not np.all(np.isfinite(vals)):
            return False
        scale = 1.0 + np.max(np.abs(vals))
        jump = max(
            np.max(np.abs(np.diff(vals, axis=0))),
            np.max(np.abs(np.diff(vals, axis=1)))
        )
        return bool(jump <= jump_tol * scale)


@dataclass(frozen=True)
class AsymptoticLaw:
    """The asymptotic law D/Gamma(j) * t**(j - 1) * exp(-mu*t)."""

    D: float
    j: float
    mu: float

    def __post_init__(self):
        if not (np.isfinite(self.D) and self.D >= 0):
            raise InvalidInputError(f"D must be non-negative, got {self.D}")
        if not (np.isfinite(self.j) and self.j > 0):
            raise InvalidInputError(f"j must be positive, got {self.j}")
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise InvalidInputError(f"mu must be positive, got {self.mu}")

    @property
    def leading(self):
        """The constant D/Gamma(j)."""
        return self.D / special.gamma(self.j)

    def log_predict(self, t):
        t = _as_float_array(t)
        with np.errstate(divide='ignore'):
            log_d = np.log(self.D)
        return (
            log_d - special.gammaln(self.j)
            + (self.j - 1) * np.log(t) - self.mu * t
        )

    def predict(self, t):
        return np.exp(self.log_predict(t))

    def to_dict(self):
        return {'D': float(self.D), 'j': float(self.j), 'mu': float(self.mu)}


@dataclass
class ConditionReport:
    """
    Outcome of a hypothesis checker.

    The evaluation region is the strip beta <= Re(z) <= mu, |Im(z)| <= T.
    """

    condition: str
    sigma_sequence: np.ndarray
    values: np.ndarray
    verdict: Verdict
    notes: list = field(default_factory=list)
    region: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        self.sigma_sequence = _as_float_array(self.sigma_sequence)
        self.values = _as_float_array(self.values)
        self.verdict = Verdict(self.verdict)
        if len(self.sigma_sequence) != len(self.values):
            raise InvalidInputError(
                "sigma_sequence and values must have the same length"
            )
        if np.any(np.diff(self.sigma_sequence) >= 0):
            raise InvalidInputError("sigma_sequence must be decreasing")

    @property
    def passed(self):
        return self.verdict == Verdict.PASS

    def to_dict(self):
        return {
            'condition': self.condition,
            'verdict': self.verdict.value,
            'sigma_sequence': [float(x) for x in self.sigma_sequence],
            'values': [float(x) for x in self.values],
            'notes': list(self.notes),
            'region': {k: float(v) for k, v in self.region.items()},
            'parameters': dict(self.parameters),
        }

    def to_table(self):
        return Table(
            [self.sigma_sequence, self.values], names=['sigma', 'value']
        )


@dataclass
class VerificationReport:
    """
    Ratios phi/phi_hat on a t-grid together with the eta/rho machinery.

    The ratios are stored explicitly since they are computed from logarithms
    where phi and phi_hat underflow.
    """

    t_grid: np.ndarray
    ratios: np.ndarray
    tolerance: float
    passed: bool = False
    phi: Optional[np.ndarray] = None
    phi_hat: Optional[np.ndarray] = None
    eta_table: list = field(default_factory=list)
    rho_values: list = field(default_factory=list)
    envelope: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.t_grid = _as_float_array(self.t_grid)
        self.ratios = _as_float_array(self.ratios)
        if len(self.t_grid) != len(self.ratios):
            raise InvalidInputError("t_grid and ratios must match in size")
        if len(self.t_grid) == 0:
            raise InvalidInputError("Empty verification grid")
        if not np.all(self.ratios > 0):
            raise DomainViolationError("Ratios must be positive")
        if self.phi is None:
            self.phi = np.full(len(self.t_grid), np.nan)
        if self.phi_hat is None:
            self.phi_hat = np.full(len(self.t_grid), np.nan)
        self.phi = _as_float_array(self.phi)
        self.phi_hat = _as_float_array(self.phi_hat)

    @property
    def final_deviation(self):
        return float(np.abs(self.ratios[-1] - 1))

    def to_dict(self):
        return {
            'passed': bool(self.passed),
            'tolerance': float(self.tolerance),
            'final_deviation': self.final_deviation,
            't': [float(x) for x in self.t_grid],
            'ratio': [float(x) for x in self.ratios],
            'eta': self.eta_table,
            'rho': self.rho_values,
            'envelope': self.envelope,
            'notes': list(self.notes),
        }

    def to_table(self):
        return Table(
            [self.t_grid, self.phi, self.phi_hat, self.ratios],
            names=['t', 'phi', 'phi_hat', 'ratio']
        )


def _check_grid(grid):
    grid = _as_float_array(grid).ravel()
    if len(grid) == 0:
        raise InvalidInputError("The grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("The grid must be strictly increasing")
    if grid[0] < 0:
        raise InvalidInputError("The grid must lie in [0, inf)")
    return grid


def validate_nonincreasing(f, grid, tol=None):
    """
    Check that phi is non-increasing on a grid.

    Parameters
    ----------
    f : DecayFunction
        The function to check.
    grid : array-like
        A strictly increasing grid.
    tol : float or None, optional
        Absolute tolerance. If None, 1e-12 (closed form) or 1e-9 (sampled)
        times the largest value on the grid. The default is None.

    Raises
    ------
    InvalidInputError
        If the grid is empty or not increasing, or tol < 0.
    DomainViolationError
        If phi is negative somewhere on the grid.

    Returns
    -------
    bool
        True if phi(t[k+1]) <= phi(t[k]) + tol for all k.

    """
    grid = _check_grid(grid)
    values = f(grid)
    if np.any(values < 0):
        raise DomainViolationError(f"'{f.name}' is negative on the grid")
    if tol is None:
        rtol = MONOTONE_RTOL_SAMPLED if f.is_sampled else MONOTONE_RTOL_CLOSED
        tol = rtol * np.max(values)
    elif tol < 0:
        raise InvalidInputError("tol must be non-negative")
    return bool(np.all(np.diff(values) <= tol))


def estimate_min_nu(f, grid):
    """
    Estimate the smallest nu such that exp(nu*t)*phi(t) is non-decreasing.

    Parameters
    ----------
    f : DecayFunction
        The function to check.
    grid : array-like
        A strictly increasing grid.

    Raises
    ------
    CannotCertifyError
        If phi vanishes on the grid.

    Returns
    -------
    nu_est : float
        The largest decay rate between consecutive nodes, clamped at 0.

    """
    grid = _check_grid(grid)
    if len(grid) < 2:
        return 0.0
    log_phi = f.log_eval(grid)
    if not np.all(np.isfinite(log_phi)):
        raise CannotCertifyError(
            f"'{f.name}' vanishes on the grid, log(phi) is undefined"
        )
    rates = -np.diff(log_phi) / np.diff(grid)
    return float(max(0.0, np.max(rates)))


def validate_nu_certificate(f, grid, tol=1e-9):
    """
    Check the declared certificate nu against the grid estimate.

    Returns
    -------
    bool
        True if estimate_min_nu(f, grid) <= nu + tol.

    """
    if f.nu_certificate is None:
        raise CannotCertifyError(f"'{f.name}' has no nu certificate")
    return estimate_min_nu(f, grid) <= f.nu_certificate + tol
