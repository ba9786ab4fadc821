#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides the exceptions raised by the tauberkit modules.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""


class TauberError(Exception):
    """Base class of all the tauberkit errors."""


class InvalidInputError(TauberError, ValueError):
    """Parameters outside their admissible range."""


class DomainViolationError(TauberError):
    """A function violates a standing hypothesis (sign or monotonicity)."""


class CannotCertifyError(TauberError):
    """A requested certificate cannot be computed from the given data."""


class DivergenceRiskError(TauberError):
    """An improper integral cannot be shown to converge at this point."""


class OutOfRegionError(TauberError):
    """The evaluation point lies outside the admissible half-plane."""


class ModelInconsistencyError(TauberError):
    """A singularity model contradicts a property of real decay functions."""


class HypothesisViolationError(TauberError):
    """A checker was called outside the regime it is valid for."""


class ConsistencyFailureError(TauberError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = values


class AccuracyFailureError(TauberError):
    """
    The requested tolerance was not reached.

    Parameters
    ----------
    message : str
        Description of the failure.
    best_estimate : complex or float
        The best value obtained before giving up.
    error : float
        The estimated absolute error of best_estimate.

    """

    def __init__(self, message, best_estimate=None, error=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error = error


class ReclassifySuggestion(TauberError):
    """
    Difference quotients of F grow when approaching the singularity.

    The function is most likely continuous-only at z = mu and should not be
    treated as holomorphic there.
    """

    def __init__(self, message, quotients=None):
        super().__init__(message)
        self.quotients = quotients
