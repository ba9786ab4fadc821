#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides utility functions used by other tauberkit modules.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import os
import sys
import multiprocessing
from multiprocessing.pool import ThreadPool

import numpy as np
from scipy import optimize

from .errors import InvalidInputError


THREADS_ENV = 'TAUBERKIT_THREADS'

# Additive recurrence constants of the generalized golden ratio in two
# dimensions (root of x**3 = x + 1).
_PLASTIC = 1.32471795724474602596
_R2_ALPHA = (1 / _PLASTIC, 1 / _PLASTIC**2)


def get_pbar(partial, total=None, wid=32, common_char='\u2588',
             upper_char='\u2584', lower_char='\u2580'):
    """
    Return a nice text/unicode progress bar showing partial and total progress.

    Parameters
    ----------
    partial : float
        Partial progress expressed as decimal value.
    total : float, optional
        Total progress expresses as decimal value.
        If it is not provided or it is None, than
        partial progress will be shown as total progress.
    wid : int , optional
        Width in charachters of the progress bar.
        The default is 32.

    Returns
    -------
    pbar : str
        A unicode progress bar.

    """
    wid -= 2
    prog = int((wid)*partial)
    if total is None:
        total_prog = prog
        common_prog = prog
    else:
        total_prog = int((wid)*total)
        common_prog = min(total_prog, prog)
    pbar_full = common_char*common_prog
    pbar_full += upper_char*(total_prog - common_prog)
    pbar_full += lower_char*(prog - common_prog)
    return (f"\u2595{{:<{wid}}}\u258F").format(pbar_full)


def show_progress(progress, label=''):
    """Write a progress bar on stderr."""
    sys.stderr.write(f"\r{label}{get_pbar(progress)} {progress:.2%}\r")
    sys.stderr.flush()


def nannmad(x, scale=1.48206, axis=None):
    """
    Compute the MAD of an array.

    Compute the Median Absolute Deviation of an array ignoring NaNs.

    Parameters
    ----------
    x : np.ndarray
        The input array.
    scale : float, optional
        A costant scale factor that depends on the distributuion.
        See https://en.wikipedia.org/wiki/Median_absolute_deviation.
        The default is 1.4826.
    axis : int or None
        The axis along which to compute the MAD.
        The default is None.

    Returns
    -------
    nmad
        The NMAD value.

    """
    x = np.ma.array(x, mask=np.isnan(x))
    x_bar = np.ma.median(x, axis=axis)
    mad = np.ma.median(np.ma.abs(x - x_bar), axis=axis)
    return scale*mad


def get_threads(threads=None):
    """
    Get the number of worker threads to use.

    Parameters
    ----------
    threads : int or None, optional
        Explicit number of threads. If None, the value of the environment
        variable TAUBERKIT_THREADS is used. A value of 0 means automatic
        selection. The default is None.

    Raises
    ------
    InvalidInputError
        If the number of threads is negative or not an integer.

    Returns
    -------
    n_threads : int
        The number of threads, always at least 1.

    """
    if threads is None:
        env_val = os.environ.get(THREADS_ENV, '0').strip() or '0'
        try:
            threads = int(env_val)
        except ValueError:
            raise InvalidInputError(
                f"{THREADS_ENV} must be an integer, got '{env_val}'"
            )
    if threads < 0:
        raise InvalidInputError("The number of threads cannot be negative")
    if threads == 0:
        threads = multiprocessing.cpu_count() // 4
    return max(1, threads)


def parallel_map(func, items, threads=None, label=None):
    """
    Apply a function to every item using a pool of threads.

    Results are returned in the same order of the input items, so the
    output does not depend on the number of threads.

    Parameters
    ----------
    func : callable
        The function to apply.
    items : iterable
        The inputs.
    threads : int or None, optional
        Number of threads, see get_threads. The default is None.
    label : str or None, optional
        If not None, show a progress bar with this label on stderr.
        The default is None.

    Returns
    -------
    results : list
        The list of func(item) for each item.

    """
    items = list(items)
    n_items = len(items)
    n_threads = get_threads(threads)

    if n_threads == 1 or n_items <= 1:
        results = []
        for k, item in enumerate(items):
            results.append(func(item))
            if label is not None:
                show_progress((k + 1) / n_items, label)
        if label is not None:
            print("", file=sys.stderr)
        return results

    jobs = {}
    with ThreadPool(n_threads) as my_pool:
        for k, item in enumerate(items):
            jobs[k] = my_pool.apply_async(func, (item, ))

        results = []
        for k in range(n_items):
            results.append(jobs[k].get())
            if label is not None:
                show_progress((k + 1) / n_items, label)
    if label is not None:
        print("", file=sys.stderr)
    return results


def parse_range(text):
    """
    Parse an integer range in the form 'k0:k1' (both ends included).

    Parameters
    ----------
    text : str
        The string to parse.

    Raises
    ------
    InvalidInputError
        If the string is malformed or k1 < k0.

    Returns
    -------
    k_values : numpy.ndarray
        The integers from k0 to k1.

    """
    try:
        k0, k1 = (int(x) for x in text.split(':'))
    except ValueError:
        raise InvalidInputError(f"Invalid range '{text}', expected 'k0:k1'")
    if k1 < k0:
        raise InvalidInputError(f"Invalid range '{text}': k1 < k0")
    return np.arange(k0, k1 + 1)


def sigma_sequence(k_values):
    """Return the dyadic sequence 2**-k for the given values of k."""
    return 2.0 ** -np.asarray(k_values, dtype=float)


def parse_grid(text):
    """
    Parse a log-spaced grid in the form 'lo:hi:n'.

    Parameters
    ----------
    text : str
        The string to parse.

    Raises
    ------
    InvalidInputError
        If the string is malformed, if lo <= 0, hi < lo or n < 1.

    Returns
    -------
    grid : numpy.ndarray
        n log-spaced values from lo to hi.

    """
    try:
        lo, hi, n = text.split(':')
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise InvalidInputError(f"Invalid grid '{text}', expected 'lo:hi:n'")
    if lo <= 0 or hi < lo or n < 1:
        raise InvalidInputError(
            f"Invalid grid '{text}': need 0 < lo <= hi and n >= 1"
        )
    return np.geomspace(lo, hi, n)


def parse_window(text):
    """Parse a window in the form 'lo:hi' and return it as a 2-tuple."""
    try:
        lo, hi = (float(x) for x in text.split(':'))
    except ValueError:
        raise InvalidInputError(f"Invalid window '{text}', expected 'lo:hi'")
    if not hi > lo:
        raise InvalidInputError(f"Invalid window '{text}': hi <= lo")
    return lo, hi


def parse_params(items):
    """
    Parse a list of 'key=value' strings into a dictionary of floats.

    Parameters
    ----------
    items : list of str or None
        The strings to parse.

    Raises
    ------
    InvalidInputError
        If an item is not in the form key=value or the value is not a number.

    Returns
    -------
    params : dict

    """
    params = {}
    for item in items or []:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise InvalidInputError(
                f"Invalid parameter '{item}', expected 'key=value'"
            )
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InvalidInputError(f"Parameter '{key}' is not a number")
    return params


def strip_points(n_points, re_range, im_range):
    """
    Generate deterministic quasi-random points in a rectangle.

    The points are taken from the additive recurrence based on the
    generalized golden ratio, so no random generator is involved.

    Parameters
    ----------
    n_points : int
        Number of points.
    re_range : 2-tuple of float
        Range of the real parts.
    im_range : 2-tuple of float
        Range of the imaginary parts.

    Returns
    -------
    z : numpy.ndarray of complex
        The points.

    """
    k = np.arange(1, n_points + 1)
    u = np.mod(0.5 + k * _R2_ALPHA[0], 1.0)
    v = np.mod(0.5 + k * _R2_ALPHA[1], 1.0)
    re_part = re_range[0] + u * (re_range[1] - re_range[0])
    im_part = im_range[0] + v * (im_range[1] - im_range[0])
    return re_part + 1j * im_part


def strip_grid(re_range, im_range, n_re=5, n_im=5):
    """Return a regular n_re x n_im grid of complex points, flattened."""
    re_part = np.linspace(re_range[0], re_range[1], n_re)
    im_part = np.linspace(im_range[0], im_range[1], n_im)
    re_mesh, im_mesh = np.meshgrid(re_part, im_part)
    return (re_mesh + 1j * im_mesh).ravel()


def grid_sup(func, lo, hi, n_points=512, refine=True):
    """
    Compute the supremum of a real function on an interval.

    The function is evaluated on a regular grid and, optionally, the maximum
    is refined by a bounded scalar optimization in the two cells adjacent to
    the best grid point.

    Parameters
    ----------
    func : callable
        A vectorized real function.
    lo : float
        Lower end of the interval.
    hi : float
        Upper end of the interval.
    n_points : int, optional
        Number of grid points. The default is 512.
    refine : bool, optional
        Whether to refine the grid maximum. The default is True.

    Returns
    -------
    sup_val : float
        The supremum estimate.
    arg_sup : float
        The point where it is attained.

    """
    if hi <= lo:
        x_grid = np.array([lo])
    else:
        x_grid = np.linspace(lo, hi, n_points)
    values = np.asarray(func(x_grid), dtype=float)
    if not np.all(np.isfinite(values)):
        k = int(np.argmax(~np.isfinite(values)))
        return np.inf, float(x_grid[k])

    k = int(np.argmax(values))
    sup_val, arg_sup = float(values[k]), float(x_grid[k])

    if refine and len(x_grid) > 2:
        a = x_grid[max(k - 1, 0)]
        b = x_grid[min(k + 1, len(x_grid) - 1)]
        res = optimize.minimize_scalar(
            lambda x: -float(np.asarray(func(np.array([x])))[0]),
            bounds=(a, b),
            method='bounded',
            options={'xatol': 1e-10 * max(1.0, abs(b - a))}
        )
        if res.success and -res.fun > sup_val:
            sup_val, arg_sup = float(-res.fun), float(res.x)
    return sup_val, arg_sup
