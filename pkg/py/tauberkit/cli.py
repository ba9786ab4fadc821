#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
TAUBERKIT - TAUBERian toolKIT.

This module provides the command line interface of tauberkit.

Exit codes are 0 when every check passes, 1 when a check fails or a
computation cannot reach its accuracy, 2 on usage or input errors.

Copyright (C) 2023  Maurizio D'Addona <mauritiusdadd@gmail.com>
"""
import sys
import json
import argparse
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from astropy.table import Table, vstack

from . import __version__
from . import corpus
from .errors import TauberError, InvalidInputError, DomainViolationError
from .errors import OutOfRegionError, HypothesisViolationError
from .errors import ReclassifySuggestion, AccuracyFailureError
from .model import DecayFunction, Verdict
from .engine import EngineConfig, eta, rho, envelope, lipschitz_margin
from .engine import check_loglim, check_dk, check_bounded_H
from .estimator import fit_decay_law, verification_report
from .specialfn import tabulate
from .utils import parse_range, parse_grid, parse_window, parse_params
from .utils import sigma_sequence, parallel_map


SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

INPUT_ERRORS = (
    InvalidInputError, DomainViolationError, OutOfRegionError,
    HypothesisViolationError, OSError
)

CONDITIONS = ('loglim', 'dk', 'bounded_H', 'lipschitz')


def _float_list(text):
    try:
        return [float(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"'{text}' is not a comma separated list of numbers"
        )


def __argshandler(options=None):
    """
    Parse the arguments given by the user.

    Returns
    -------
    args: Namespace
        A Namespace containing the parsed arguments. For more information see
        the python documentation of the argparse module.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--format', metavar='FORMAT', type=str, default='json',
        choices=['json', 'csv'],
        help='Output format, either "json" or "csv". The default is json.'
    )
    common.add_argument(
        '--out', metavar='OUT_FILE', type=str, default=None,
        help='Write the output to OUT_FILE instead of the standard output.'
    )
    common.add_argument(
        '--threads', metavar='N', type=int, default=None,
        help='Number of worker threads. If not given, the environment '
        'variable TAUBERKIT_THREADS is used; 0 means automatic selection.'
    )
    common.add_argument(
        '--quiet', action='store_true', default=False,
        help='Do not show progress bars.'
    )

    exemplar = argparse.ArgumentParser(add_help=False)
    exemplar.add_argument(
        '--exemplar', metavar='NAME', type=str, default='shifted_gamma',
        help='The corpus exemplar to use. Can be one of '
        f'{", ".join(corpus.names())} or "counterexample" (only for the '
        'loglim check). The default is shifted_gamma.'
    )
    exemplar.add_argument(
        '--param', metavar='KEY=VALUE', type=str, action='append',
        default=None,
        help='Override a parameter of the exemplar, e.g. --param mu=2. Can '
        'be repeated.'
    )

    parser = argparse.ArgumentParser(
        prog='tauberkit',
        description='Numerical toolkit for the Tauberian analysis of '
        'exponentially decaying functions.'
    )
    parser.add_argument(
        '--version', action='version', version=f'%(prog)s {__version__}'
    )
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    p_verify = subparsers.add_parser(
        'verify-corpus', parents=[common],
        help='Verify the invariants of the corpus exemplars.'
    )
    p_verify.add_argument(
        '--exemplar', metavar='NAME', type=str, action='append',
        default=None,
        help='Restrict the verification to this exemplar. Can be repeated.'
    )

    p_analyze = subparsers.add_parser(
        'analyze', parents=[common],
        help='Fit an asymptotic law to sampled data and verify it.'
    )
    p_analyze.add_argument(
        '--input', metavar='CSV_FILE', type=str, required=True,
        help='A CSV file with header "t,phi".'
    )
    p_analyze.add_argument(
        '--window', metavar='LO:HI', type=str, default=None,
        help='The fit window. The default is the last 90%% of the samples, '
        'starting not before t = 1.'
    )
    p_analyze.add_argument(
        '--corrections', metavar='P1,P2,...', type=_float_list,
        default=[1.0, 2.0],
        help='Powers of the correction terms t**-p of the fit. The default '
        'is 1,2.'
    )
    p_analyze.add_argument(
        '--mu-hint', metavar='MU', type=float, default=None,
        help='Known decay rate used to extend the samples.'
    )
    p_analyze.add_argument(
        '--tol', metavar='TOL', type=float, default=0.02,
        help='Tolerance on the final ratio phi/phi_hat. The default is 0.02.'
    )
    p_analyze.add_argument(
        '--eta-T', metavar='T1,T2,...', type=_float_list, default=[1, 10],
        help='Values of T of the eta table. The default is 1,10.'
    )
    p_analyze.add_argument(
        '--rho-t', metavar='T1,T2,...', type=_float_list, default=None,
        help='Values of t where rho and the envelope of phi are computed. '
        'By default they are not computed.'
    )
    p_analyze.add_argument(
        '--T-grid', metavar='LO:HI:N', type=str, default=None,
        help='Log-spaced grid of T for rho. The default is 40 points from '
        '32(a+1) to 1e6.'
    )

    p_check = subparsers.add_parser(
        'check', parents=[common, exemplar],
        help='Check a hypothesis on the singularity model of an exemplar.'
    )
    p_check.add_argument(
        '--condition', metavar='CONDITION', type=str, default='loglim',
        choices=CONDITIONS,
        help=f'The condition to check, one of {", ".join(CONDITIONS)}. The '
        'default is loglim.'
    )
    p_check.add_argument(
        '--T', metavar='T', type=float, default=5.0,
        help='Half height of the strip. The default is 5.'
    )
    p_check.add_argument(
        '--sigma-seq', metavar='K0:K1', type=str, default='2:20',
        help='Use sigma = 2**-k for k from K0 to K1. The default is 2:20.'
    )

    p_eta = subparsers.add_parser(
        'eta-scan', parents=[common, exemplar],
        help='Tabulate the eta error term of an exemplar.'
    )
    p_eta.add_argument(
        '--sigma-seq', metavar='K0:K1', type=str, default='2:14',
        help='Use sigma = 2**-k for k from K0 to K1. The default is 2:14.'
    )
    p_eta.add_argument(
        '--T', metavar='T1,T2,...', type=_float_list, default=[1, 10, 64],
        help='Values of T. The default is 1,10,64.'
    )

    p_rho = subparsers.add_parser(
        'rho', parents=[common, exemplar],
        help='Compute rho(t) and the envelope of phi for an exemplar.'
    )
    p_rho.add_argument(
        '--t', metavar='T1,T2,...', type=_float_list, default=[50, 100, 200],
        help='Values of t. The default is 50,100,200.'
    )
    p_rho.add_argument(
        '--T-grid', metavar='LO:HI:N', type=str, default=None,
        help='Log-spaced grid of T. The default is 40 points from 32(a+1) '
        'to 1e6.'
    )
    p_rho.add_argument(
        '--envelope-constant', metavar='C', type=float, default=1.0,
        help='The constant of the envelope band. The default is 1.'
    )

    p_special = subparsers.add_parser(
        'specialfn', parents=[common],
        help='Tabulate g_j, h_j and the bounds of h_j.'
    )
    p_special.add_argument(
        '--j', metavar='J1,J2,...', type=_float_list,
        default=[0.5, 1, 1.5, 2, 3],
        help='Values of j. The default is 0.5,1,1.5,2,3.'
    )
    p_special.add_argument(
        '--T', metavar='T1,T2,...', type=_float_list, default=[1, 10, 64],
        help='Values of T. The default is 1,10,64.'
    )
    p_special.add_argument(
        '--sigma-seq', metavar='K0:K1', type=str, default='2:12',
        help='Use sigma = 2**-k for k from K0 to K1. The default is 2:12.'
    )

    p_corpus = subparsers.add_parser(
        'corpus', parents=[common, exemplar],
        help='List the corpus or dump the samples of an exemplar.'
    )
    p_corpus.add_argument(
        'action', metavar='ACTION', type=str, choices=['list', 'dump'],
        help='Either "list" or "dump".'
    )
    p_corpus.add_argument(
        '--t-grid', metavar='LO:HI:N', type=str, default=None,
        help='Sampling grid of "dump", uniform from LO to HI. The default is '
        '2000 points from 0 to 80/mu.'
    )

    args = None
    if options is None:
        args = parser.parse_args()
    else:
        args = parser.parse_args(options)

    if args.threads is not None and args.threads < 0:
        parser.error("--threads cannot be negative")

    return args


@dataclass
class RunConfig:
    """
    Validated settings of a single run.

    Grids and parameters are parsed once, before any computation, so that
    malformed values are reported as input errors.
    """

    command: str
    fmt: str = 'json'
    out: Optional[str] = None
    threads: Optional[int] = None
    quiet: bool = False
    input: Optional[str] = None
    tol: float = 0.02
    window: Optional[tuple] = None
    sigmas: Optional[np.ndarray] = None
    T_grid: Optional[np.ndarray] = None
    t_grid: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args):
        """Build a RunConfig from the namespace returned by argparse."""
        def opt(name):
            return getattr(args, name, None)

        run = cls(
            command=args.command, fmt=args.format, out=args.out,
            threads=args.threads, quiet=args.quiet, input=opt('input'),
            params=parse_params(opt('param'))
        )
        if opt('tol') is not None:
            if not args.tol > 0:
                raise InvalidInputError("--tol must be positive")
            run.tol = args.tol
        if opt('window') is not None:
            run.window = parse_window(args.window)
        if opt('sigma_seq') is not None:
            run.sigmas = sigma_sequence(parse_range(args.sigma_seq))
        if opt('T_grid') is not None:
            run.T_grid = parse_grid(args.T_grid)
        if opt('t_grid') is not None:
            lo, hi, n = _uniform_grid(args.t_grid)
            run.t_grid = np.linspace(lo, hi, n)
        return run

    def label(self, text):
        """Return the progress bar label, None when running quietly."""
        return None if self.quiet else text

    def engine_config(self, **kwargs):
        return EngineConfig(threads=self.threads, **kwargs)


def _exemplar(args, run):
    return corpus.get(args.exemplar, **run.params)


def write_output(payload, table, fmt='json', out=None):
    """
    Write the result of a command.

    JSON output is the payload with sorted keys and a schema version; CSV
    output is the table.
    """
    if fmt == 'csv':
        if out is None:
            table.write(sys.stdout, format='ascii.csv')
        else:
            table.write(out, format='ascii.csv', overwrite=True)
        return
    payload = dict(payload, schema_version=SCHEMA_VERSION)
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)
    if out is None:
        print(text)
    else:
        with open(out, 'w') as f_out:
            f_out.write(text + '\n')


def cmd_verify_corpus(args, run):
    names = args.exemplar or corpus.names()
    exemplars = [corpus.get(name) for name in names]
    tables = parallel_map(
        lambda ex: corpus.verify(ex, EngineConfig(threads=1)),
        exemplars, run.threads, run.label('verify-corpus ')
    )
    table = vstack(tables)
    payload = {
        'command': 'verify-corpus',
        'checks': [
            {
                'exemplar': str(row['exemplar']),
                'check': str(row['check']),
                'passed': bool(row['passed']),
                'value': float(row['value']),
            }
            for row in table
        ],
        'passed': bool(np.all(table['passed'])),
    }
    return payload, table, payload['passed']


def _default_window(f):
    t_last = float(f.samples[0][-1])
    return max(1.0, 0.1 * t_last), t_last


def cmd_analyze(args, run):
    f = DecayFunction.from_csv(run.input, mu_hint=args.mu_hint)
    window = run.window or _default_window(f)
    fit = fit_decay_law(f, window, tuple(args.corrections))
    payload = {'command': 'analyze', 'fit': fit.to_dict()}
    if fit.law is None:
        payload['verification'] = None
        table = Table(
            names=['t', 'phi', 'phi_hat', 'ratio'], dtype=[float] * 4
        )
        return payload, table, False
    cfg = run.engine_config(T_grid=run.T_grid)
    report = verification_report(
        f, fit.law, cfg, t_grid=np.geomspace(window[0], window[1], 20),
        eta_T=tuple(args.eta_T), rho_t=tuple(args.rho_t or ()),
        tol=run.tol
    )
    payload['verification'] = report.to_dict()
    passed = report.passed and not fit.inconclusive
    return payload, report.to_table(), passed


def cmd_check(args, run):
    cfg = run.engine_config(condition_sigma_sequence=run.sigmas)
    if args.exemplar == 'counterexample':
        params = run.params
        unknown = set(params) - {'mu', 'j'}
        if unknown:
            raise InvalidInputError(
                f"Unknown parameters: {', '.join(sorted(unknown))}"
            )
        if args.condition != 'loglim':
            raise InvalidInputError(
                "The counterexample supports only the loglim condition"
            )
        model = corpus.counterexample_model(
            params.get('mu', 1.0), params.get('j', 1.0)
        )
        report = check_loglim(model, args.T, cfg)
    else:
        ex = _exemplar(args, run)
        if args.condition == 'loglim':
            report = check_loglim(ex.model, args.T, cfg)
        elif args.condition == 'dk':
            report = check_dk(ex.f, ex.law, args.T, cfg)
        elif args.condition == 'bounded_H':
            report = check_bounded_H(ex.f, ex.law, args.T, cfg)
        else:
            return _check_lipschitz(ex, args)
    payload = {'command': 'check', 'report': report.to_dict()}
    return payload, report.to_table(), report.passed


def _check_lipschitz(ex, args):
    beta = ex.model.mu / 2
    try:
        value = lipschitz_margin(ex.model, beta, args.T)
        verdict, quotients = Verdict.PASS, []
    except ReclassifySuggestion as exc:
        print(f"WARNING: {exc}", file=sys.stderr)
        value, verdict = np.inf, Verdict.FAIL
        quotients = [float(q) for q in exc.quotients]
    payload = {
        'command': 'check',
        'report': {
            'condition': 'lipschitz', 'verdict': verdict.value,
            'value': float(value), 'quotients': quotients,
            'region': {'beta': beta, 'mu': ex.model.mu, 'T': args.T},
        },
    }
    table = Table(rows=[(float(value), verdict.value)],
                  names=['lipschitz', 'verdict'])
    return payload, table, verdict == Verdict.PASS


def _finite_or_none(value):
    return float(value) if np.isfinite(value) else None


def _warn_failures(failures):
    for failure in failures:
        print(f"WARNING: {failure['error']}", file=sys.stderr)


def cmd_eta_scan(args, run):
    ex = _exemplar(args, run)
    cfg = run.engine_config(sigma_sequence=run.sigmas)
    cfg = cfg.resolve(ex.f, ex.law.mu)
    pairs = [(s, T) for T in args.T for s in cfg.sigma_sequence]

    def eta_row(pair):
        sigma, T = pair
        row = {'sigma': float(sigma), 'T': float(T)}
        try:
            row['eta'] = eta(ex.f, ex.law, cfg, sigma, T)
        except AccuracyFailureError as exc:
            row['eta'] = None
            row['error'] = f"eta({sigma:g}, {T:g}): {exc}"
        return row

    rows = parallel_map(eta_row, pairs, run.threads, run.label('eta '))
    failures = [row for row in rows if 'error' in row]
    _warn_failures(failures)
    table = Table(
        rows=[
            (row['sigma'], row['T'],
             np.nan if row['eta'] is None else row['eta'])
            for row in rows
        ],
        names=['sigma', 'T', 'eta']
    )
    payload = {
        'command': 'eta-scan',
        'exemplar': ex.to_dict(),
        'a': float(cfg.a),
        'eta': rows,
    }
    return payload, table, not failures


def cmd_rho(args, run):
    ex = _exemplar(args, run)
    kwargs = {'envelope_constant': args.envelope_constant}
    if run.T_grid is not None:
        kwargs['T_grid'] = run.T_grid
    cfg = run.engine_config(**kwargs).resolve(ex.f, ex.law.mu)
    rows, entries = [], []
    for t in args.t:
        phi = float(ex.f(np.array([t]))[0])
        try:
            rho_value, T_best = rho(ex.f, ex.law, cfg, t)
        except AccuracyFailureError as exc:
            rows.append((t, np.nan, np.nan, np.nan, phi, np.nan))
            entries.append({'error': f"rho({t:g}): {exc}"})
            continue
        lo, hi = envelope(ex.f, ex.law, cfg, t, rho_value)
        rows.append((t, rho_value, T_best, lo, phi, hi))
        entries.append({})
    table = Table(rows=rows, names=['t', 'rho', 'T', 'lo', 'phi', 'hi'])
    for row, entry in zip(table, entries):
        entry.update({
            name: _finite_or_none(row[name]) for name in table.colnames
        })
    failures = [entry for entry in entries if 'error' in entry]
    _warn_failures(failures)
    payload = {
        'command': 'rho',
        'exemplar': ex.to_dict(),
        'a': float(cfg.a),
        'rho': entries,
    }
    return payload, table, not failures


def cmd_specialfn(args, run):
    table = tabulate(run.sigmas, args.j, args.T)
    payload = {
        'command': 'specialfn',
        'rows': [
            {name: float(row[name]) for name in table.colnames}
            for row in table
        ],
    }
    return payload, table, True


def cmd_corpus(args, run):
    if args.action == 'list':
        exemplars = corpus.registry()
        table = Table(
            rows=[
                (name, ex.law.D, ex.law.j, ex.law.mu, ex.model.f_class.value)
                for name, ex in exemplars.items()
            ],
            names=['name', 'D', 'j', 'mu', 'f_class']
        )
        payload = {
            'command': 'corpus',
            'exemplars': [ex.to_dict() for ex in exemplars.values()],
        }
        return payload, table, True

    ex = _exemplar(args, run)
    t_grid = run.t_grid
    if t_grid is None:
        t_grid = np.linspace(0, 80 / ex.law.mu, 2000)
    table = corpus.sample_table(ex, t_grid)
    payload = {
        'command': 'corpus',
        'exemplar': ex.to_dict(),
        't': [float(x) for x in table['t']],
        'phi': [float(x) for x in table['phi']],
    }
    return payload, table, True


def _uniform_grid(text):
    try:
        lo, hi, n = text.split(':')
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise InvalidInputError(f"Invalid grid '{text}', expected 'lo:hi:n'")
    if lo < 0 or hi <= lo or n < 2:
        raise InvalidInputError(
            f"Invalid grid '{text}': need 0 <= lo < hi and n >= 2"
        )
    return lo, hi, n


COMMANDS = {
    'verify-corpus': cmd_verify_corpus,
    'analyze': cmd_analyze,
    'check': cmd_check,
    'eta-scan': cmd_eta_scan,
    'rho': cmd_rho,
    'specialfn': cmd_specialfn,
    'corpus': cmd_corpus,
}


def tauberkit(options=None):
    """
    Run the main program.

    Parameters
    ----------
    options : list of str or None, optional
        The command line arguments. If None, sys.argv is used.

    Returns
    -------
    int
        The exit code.

    """
    args = __argshandler(options)
    try:
        run = RunConfig.from_args(args)
        payload, table, passed = COMMANDS[run.command](args, run)
        write_output(payload, table, run.fmt, run.out)
    except INPUT_ERRORS as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TauberError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK if passed else EXIT_FAILED


def main():
    sys.exit(tauberkit())


if __name__ == '__main__':
    main()
