#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides the estimation of an asymptotic law from samples of a
decay function and the verification of a law against the function.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg
from scipy import special

from .errors import InvalidInputError, TauberError
from .model import AsymptoticLaw, VerificationReport
from .engine import EngineConfig, eta, rho, envelope
from .utils import nannmad, parallel_map


DEFAULT_CORRECTIONS = (1.0, 2.0)
HOLDOUT_FRACTION = 0.1
MIN_SAMPLES = 10

# A fit is inconclusive if the corrections exceed this at the window start
MAX_CORRECTION = 0.5
RESIDUAL_TOL = 1e-2


@dataclass
class FitResult:
    """
    The outcome of fit_decay_law.

    Parameters
    ----------
    law : AsymptoticLaw or None
        The fitted law, None when the fitted parameters are not admissible.
    window : 2-tuple of float
        The fit window.
    residuals : dict
        Statistics of the log-residuals on the fit and held-out samples.
    inconclusive : bool
        Whether the fit should not be trusted.
    notes : list of str
        Reasons of the inconclusive flag.
    corrections : dict
        The coefficients of the corrections t**-p, keyed by p.
    n_fit : int
        Number of samples used by the fit.
    n_holdout : int
        Number of held-out samples.

    """

    law: Optional[AsymptoticLaw]
    window: tuple
    residuals: dict = field(default_factory=dict)
    inconclusive: bool = False
    notes: list = field(default_factory=list)
    corrections: dict = field(default_factory=dict)
    n_fit: int = 0
    n_holdout: int = 0

    def to_dict(self):
        return {
            'law': None if self.law is None else self.law.to_dict(),
            'window': [float(x) for x in self.window],
            'residuals': {k: float(v) for k, v in self.residuals.items()},
            'inconclusive': bool(self.inconclusive),
            'notes': list(self.notes),
            'corrections': {
                f"{p:g}": float(k) for p, k in self.corrections.items()
            },
            'n_fit': int(self.n_fit),
            'n_holdout': int(self.n_holdout),
        }


def _window_samples(f, window, n_points):
    t_lo, t_hi = window
    if f.is_sampled:
        t_all, _ = f.samples
        t = t_all[(t_all >= t_lo) & (t_all <= t_hi)]
    else:
        t = np.linspace(t_lo, t_hi, n_points)
    if len(t) < MIN_SAMPLES:
        raise InvalidInputError(
            f"The window [{t_lo:g}, {t_hi:g}] holds {len(t)} samples, at "
            f"least {MIN_SAMPLES} are needed"
        )
    log_phi = f.log_eval(t)
    if not np.all(np.isfinite(log_phi)):
        raise InvalidInputError(
            "phi must be positive in the fit window to take its logarithm"
        )
    return t, log_phi


def fit_decay_law(f, window, correction_powers=DEFAULT_CORRECTIONS,
                  n_points=2000, holdout=HOLDOUT_FRACTION):
    """
    Fit the law D/Gamma(j) t**(j-1) exp(-mu t) to a decay function.

    log(phi) is fitted by linear least squares with the model
    b0 + (j - 1) log(t) - mu t + sum_p k_p t**(-p). The last samples of the
    window are held out and the residuals on them are used to judge the
    fit.

    Parameters
    ----------
    f : DecayFunction
        The function; sampled functions use the samples in the window.
    window : 2-tuple of float
        The fit window (t_lo, t_hi), 0 < t_lo < t_hi.
    correction_powers : tuple of float, optional
        Powers p of the correction terms. The default is (1, 2).
    n_points : int, optional
        Number of samples of closed-form functions. The default is 2000.
    holdout : float, optional
        Fraction of held-out samples at the end of the window. The default
        is 0.1.

    Raises
    ------
    InvalidInputError
        If the window is malformed, holds too few samples, phi vanishes on
        it or the least squares problem is rank deficient.

    Returns
    -------
    FitResult

    """
    t_lo, t_hi = (float(x) for x in window)
    if not 0 < t_lo < t_hi:
        raise InvalidInputError(f"Invalid fit window [{t_lo}, {t_hi}]")
    if not 0 <= holdout < 1:
        raise InvalidInputError("holdout must be in [0, 1)")
    powers = tuple(float(p) for p in correction_powers)
    if any(not p > 0 for p in powers):
        raise InvalidInputError("Correction powers must be positive")

    t, log_phi = _window_samples(f, (t_lo, t_hi), n_points)
    n_hold = int(np.floor(holdout * len(t)))
    n_fit = len(t) - n_hold
    n_cols = 3 + len(powers)
    if n_fit < n_cols + 2:
        raise InvalidInputError("Too few samples for the number of terms")

    t_c = 0.5 * (t_lo + t_hi)
    t_s = 0.5 * (t_hi - t_lo)
    columns = [np.ones_like(t), np.log(t), -(t - t_c) / t_s]
    columns += [t ** -p for p in powers]
    design = np.column_stack(columns)
    col_scale = np.max(np.abs(design), axis=0)
    design = design / col_scale

    coef, _, rank, _ = linalg.lstsq(design[:n_fit], log_phi[:n_fit])
    if rank < n_cols:
        raise InvalidInputError(
            "The least squares problem is rank deficient: the window is too "
            "narrow for the chosen corrections"
        )
    coef = coef / col_scale
    fitted = np.column_stack(columns) @ coef
    res = log_phi - fitted

    j = 1.0 + coef[1]
    mu = coef[2] / t_s
    log_leading = coef[0] + mu * t_c
    corrections = dict(zip(powers, coef[3:]))

    notes = []
    residuals = {
        'fit_rms': np.sqrt(np.mean(res[:n_fit] ** 2)),
        'fit_nmad': float(nannmad(res[:n_fit])),
    }
    if n_hold > 0:
        held = res[n_fit:]
        residuals['holdout_max'] = np.max(np.abs(held))
        residuals['holdout_rms'] = np.sqrt(np.mean(held ** 2))
        if residuals['holdout_max'] > RESIDUAL_TOL:
            notes.append("large residuals on the held-out samples")
    trend = np.polyfit(t, res, 1)[0] * (t_hi - t_lo)
    residuals['trend'] = trend
    if abs(trend) > RESIDUAL_TOL:
        notes.append("the residuals show a trend across the window")

    if t_lo < 1:
        notes.append("the window starts below t = 1, outside the asymptotic "
                     "regime")
    corr_size = sum(abs(k) * t_lo ** -p for p, k in corrections.items())
    if corr_size > MAX_CORRECTION:
        notes.append(
            f"the corrections are large ({corr_size:.3g}) at the window start"
        )

    law = None
    if mu > 0 and j > 0 and np.isfinite(log_leading):
        law = AsymptoticLaw(
            D=float(np.exp(log_leading + special.gammaln(j))), j=j, mu=mu
        )
    else:
        notes.append(
            f"the fitted parameters are not admissible (j={j:.4g}, "
            f"mu={mu:.4g})"
        )

    return FitResult(
        law=law,
        window=(t_lo, t_hi),
        residuals=residuals,
        inconclusive=bool(notes),
        notes=notes,
        corrections=corrections,
        n_fit=n_fit,
        n_holdout=n_hold,
    )


def ratio_table(f, law, grid, tol=0.02, n_trend=None):
    """
    Compare a decay function with its asymptotic law.

    The ratios phi/phi_hat are computed from logarithms. The check passes
    when |ratio - 1| <= tol at the last point and the deviations do not
    increase along the grid.

    Parameters
    ----------
    f : DecayFunction
        The function.
    law : AsymptoticLaw
        The law.
    grid : array-like
        Increasing positive times.
    tol : float, optional
        Tolerance on the last ratio. The default is 0.02.
    n_trend : int or None, optional
        Number of trailing points whose deviations must not increase. All
        points when None. The default is None.

    Raises
    ------
    InvalidInputError
        If the grid is empty or not in (0, inf).

    Returns
    -------
    VerificationReport

    """
    grid = np.asarray(grid, dtype=float).ravel()
    if len(grid) == 0 or np.any(~(grid > 0)):
        raise InvalidInputError("The grid must be non-empty and in (0, inf)")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("The grid must be strictly increasing")

    notes = []
    log_ratio = f.log_eval(grid) - law.log_predict(grid)
    finite = np.isfinite(log_ratio)
    if not np.all(finite):
        n_ok = int(np.argmin(finite))
        if n_ok == 0:
            raise InvalidInputError("phi/phi_hat is undefined on the grid")
        print(
            f"WARNING: the grid is truncated at t = {grid[n_ok - 1]:.6g}, "
            "phi or phi_hat vanish beyond it",
            file=sys.stderr
        )
        notes.append(f"grid truncated at t = {grid[n_ok - 1]:.6g}")
        grid, log_ratio = grid[:n_ok], log_ratio[:n_ok]

    with np.errstate(under='ignore'):
        phi = f(grid)
        phi_hat = law.predict(grid)
    if np.any(phi_hat == 0):
        notes.append("phi_hat underflows, ratios computed from logarithms")

    ratios = np.exp(log_ratio)
    dev = np.abs(ratios - 1)
    tail = dev if n_trend is None else dev[-n_trend:]
    trend_ok = bool(np.all(np.diff(tail) <= 1e-12))
    if not trend_ok:
        notes.append("the deviation from 1 does not decrease")
    passed = bool(dev[-1] <= tol and trend_ok)
    return VerificationReport(
        t_grid=grid,
        ratios=ratios,
        tolerance=tol,
        passed=passed,
        phi=phi,
        phi_hat=phi_hat,
        notes=notes,
    )


def verification_report(f, law, cfg=None, t_grid=None, eta_T=(1, 10, 64),
                        rho_t=(), tol=0.02):
    """
    Build a complete verification report.

    The report collects the ratio table, the eta scan over
    cfg.sigma_sequence for each T in eta_T, rho at the points rho_t and the
    envelope of phi there. Quantities that cannot be computed are skipped
    with a note.

    Returns
    -------
    VerificationReport

    """
    cfg = EngineConfig() if cfg is None else cfg
    cfg = cfg if cfg.is_resolved else cfg.resolve(f, law.mu)
    if t_grid is None:
        t_grid = np.geomspace(10 / law.mu, 100 / law.mu, 10)
    report = ratio_table(f, law, t_grid, tol)

    pairs = [
        (sigma, T) for T in eta_T for sigma in cfg.sigma_sequence
        if sigma < law.mu / 2
    ]

    def eta_row(pair):
        sigma, T = pair
        try:
            return {'sigma': float(sigma), 'T': float(T),
                    'eta': eta(f, law, cfg, sigma, T)}
        except TauberError as exc:
            return {'sigma': float(sigma), 'T': float(T), 'eta': None,
                    'error': str(exc)}

    report.eta_table = parallel_map(eta_row, pairs, cfg.threads)

    for t in rho_t:
        try:
            rho_value, T_best = rho(f, law, cfg, t)
        except TauberError as exc:
            report.notes.append(f"rho({t:g}) not computed: {exc}")
            continue
        lo, hi = envelope(f, law, cfg, t, rho_value)
        report.rho_values.append(
            {'t': float(t), 'rho': rho_value, 'T': T_best}
        )
        report.envelope.append({
            't': float(t), 'lo': lo, 'hi': hi,
            'phi': float(f(np.array([t]))[0])
        })
    return report
