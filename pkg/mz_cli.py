#!/usr/bin/env python3
"""
MZ CLI - command-line front end for nets, constants, Chebyshev fits and
discretization experiments.

Every artifact carries the command, its parameters, the seed, a timestamp and
schema_version. Exit codes: 0 success, 1 a checked inequality failed, 2 usage,
precondition or I/O errors.
"""

import sys
import math
import logging
import argparse
from datetime import datetime
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

import mz_settings
from cheb_approx import (
    fit_tensor_cheb, measure_sup_error, approx_error_bound, series_to_dict,
    convergence_rate_experiment,
)
from chebyshev_core import gamma0, tau0, alpha_of, COMPACT_KINDS
from discretization_verify import (
    parse_q, d_exponent, c1_bound, c2_bound, delta_star, verify_sup_inequality,
    upper_mz_experiment, lower_mz_experiment, cube_mz_experiment, necessity_witness,
    mz_report_rows, CUBE_MZ_FAMILIES,
)
from efet_models import EfetModel, Sinc, SincPower, ShiftedSinc
from geometry_nets import (
    PointSet, Window, covering_check, min_pairwise_separation, packing_multiplicity,
    greedy_thin, disjoint_partition, lattice_net, remove_within,
)
from mz_errors import MZError, InequalityViolation, TrialFailedError, DomainError
from report_export import export_report, write_artifact

logger = logging.getLogger('MZCli')

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

MODEL_KINDS = ('sinc', 'sinc-power', 'shifted-sinc')
RATE_COLUMNS = ['n', 'error', 'rate', 'relative_error', 'local_rate']

POSITIVE_PARAMS = ('delta', 'delta1', 'sigma', 'tau', 'b', 'h', 'spacing', 'c_mq', 'c2')
COUNT_PARAMS = ('m', 'N', 'trials', 'c', 'resolution', 'max_depth')
METADATA_SUFFIX = '.meta.json'
MODE_REQUIRED = {
    ('mz-verify', 'sup'): ('delta',),
    ('mz-verify', 'lower'): ('delta',),
    ('mz-verify', 'upper'): ('delta1',),
}


@dataclass
class CliConfig:
    """One parsed invocation: subcommand, paths, output format, seed and numeric parameters"""
    subcommand: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    output_format: str = 'json'
    seed: Optional[int] = None
    parameters: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'CliConfig':
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ('func', 'command', 'verbose')}
        return cls(
            subcommand=args.command,
            input_path=params.get('input'),
            output_path=params.get('out'),
            output_format=params.get('format') or 'json',
            seed=params.get('seed'),
            parameters=params,
        )

    def validate(self):
        for name in POSITIVE_PARAMS:
            value = self.parameters.get(name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise DomainError(f"--{name.replace('_', '-')} must be positive and finite, got {value}")
        for name in COUNT_PARAMS:
            value = self.parameters.get(name)
            if value is not None and value < 1:
                raise DomainError(f"--{name.replace('_', '-')} must be at least 1, got {value}")
        q = self.parameters.get('q')
        if q is not None and q < 1:
            raise DomainError(f"--q must be in [1, inf], got {q}")
        alpha = self.parameters.get('alpha')
        if alpha is not None and alpha < 1:
            raise DomainError(f"--alpha must be at least 1, got {alpha}")
        mode = self.parameters.get('mode')
        for name in MODE_REQUIRED.get((self.subcommand, mode), ()):
            if self.parameters.get(name) is None:
                raise DomainError(f"{self.subcommand} --mode {mode} requires --{name}")


def parse_range(text: str) -> List[int]:
    """'a:b:step' (inclusive of b when reached), 'a,b,c' or a single integer"""
    text = text.strip()
    if ':' in text:
        parts = [int(p) for p in text.split(':')]
        if len(parts) not in (2, 3):
            raise argparse.ArgumentTypeError(f"range must be a:b or a:b:step, got {text}")
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"empty range: {text}")
        return list(range(start, stop + 1, step))
    try:
        return [int(p) for p in text.split(',') if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer range: {text}")


def _q_arg(text: str) -> float:
    try:
        return parse_q(text)
    except MZError as e:
        raise argparse.ArgumentTypeError(str(e))


def _load_points(path: str) -> PointSet:
    return PointSet.from_csv(mz_settings.resolve_input_path(path))


def _window_from_args(args, ps: Optional[PointSet], m: int) -> Window:
    if getattr(args, 'window_half', None) is not None:
        center = args.window_center if args.window_center else [0.0] * m
        return Window(center, args.window_half)
    if ps is None:
        raise DomainError("a window half side is required when no point set is given")
    return Window.around(ps)


def _build_model(kind: str, sigma: float, m: int, q: float, gamma: Optional[int] = None,
                 shift: Optional[Sequence[float]] = None) -> EfetModel:
    if kind == 'sinc':
        return Sinc(sigma, m)
    if kind == 'sinc-power':
        return SincPower(sigma, gamma, m) if gamma else SincPower.for_exponent(sigma, m, q)
    if kind == 'shifted-sinc':
        return ShiftedSinc(sigma, shift if shift else [0.0] * m)
    raise DomainError(f"unknown model: {kind}")


def _truncated(value: float, decimals: int = 4) -> str:
    """Leading digits of a positive constant, cut rather than rounded"""
    scale = 10 ** decimals
    return f"{math.floor(value * scale) / scale:.{decimals}f}"


def _artifact(command: str, args: argparse.Namespace, result: Dict[str, Any]) -> Dict[str, Any]:
    config = CliConfig.from_args(args)
    return {
        'command': command,
        'parameters': config.parameters,
        'seed': config.seed,
        'generated_at': datetime.now().isoformat(timespec='seconds'),
        'result': result,
    }


def metadata_path(out: str) -> str:
    """JSON sidecar next to a CSV artifact"""
    return f"{out}{METADATA_SUFFIX}"


def _write_metadata(out: str, payload: Dict[str, Any]):
    """CSV carries no header metadata; command, parameters, seed and schema_version go alongside"""
    path = write_artifact(export_report(payload, 'json'), metadata_path(out))
    print(f"💾 Metadata saved to: {path}")


def _emit(args: argparse.Namespace, payload: Dict[str, Any], columns: Optional[List[str]] = None,
          rows: Optional[List[Dict[str, Any]]] = None):
    if not getattr(args, 'out', None):
        return
    fmt = getattr(args, 'format', 'json')
    text = export_report({'rows': rows or []} if fmt == "csv" else payload, fmt, columns)
    path = write_artifact(text, args.out)
    print(f"💾 Saved to: {path}")
    if fmt == "csv":
        _write_metadata(args.out, payload)


def _require(holds: bool, message: str, details: Optional[Dict[str, Any]] = None):
    if not holds:
        raise InequalityViolation(message, details)


def cmd_net_check(args) -> Dict[str, Any]:
    ps = _load_points(args.input)
    result: Dict[str, Any] = {'points': len(ps), 'dim': ps.dim}
    if len(ps) > 1:
        result['separation'] = min_pairwise_separation(ps)
    if args.delta1 is not None:
        result['multiplicity'] = packing_multiplicity(ps, args.delta1)
    if args.delta is not None:
        window = _window_from_args(args, ps, ps.dim)
        result['coverage'] = covering_check(ps, args.delta, window, args.max_depth).to_dict()
        result['window'] = window.to_dict()

    print(f"✅ Checked {len(ps)} points in dimension {ps.dim}")
    for key in ('separation', 'multiplicity'):
        if key in result:
            print(f"📊 {key}: {result[key]}")
    if 'coverage' in result:
        print(f"📊 coverage at delta={args.delta}: {result['coverage']['state']}")
    _emit(args, _artifact('net-check', args, result))
    return result


def cmd_net_thin(args) -> Dict[str, Any]:
    ps = _load_points(args.input)
    thinned = greedy_thin(ps, args.delta)

    separation = min_pairwise_separation(thinned) if len(thinned) > 1 else math.inf
    reach = float(cdist(ps.points, thinned.points, metric='chebyshev').min(axis=1).max())
    _require(separation >= args.delta, f"thinned separation {separation} below delta {args.delta}")
    _require(reach < args.delta, f"an input point lies {reach} from every kept point")

    print(f"✅ Kept {len(thinned)} of {len(ps)} points at delta={args.delta}")
    print(f"📊 separation {separation:.6g}, covering reach {reach:.6g}")
    result = {'points_in': len(ps), 'points_out': len(thinned), 'separation': separation, 'reach': reach}
    if args.out:
        path = write_artifact(thinned.to_csv(), args.out)
        print(f"💾 Saved to: {path}")
        _write_metadata(args.out, _artifact('net-thin', args, result))
    return result


def cmd_net_partition(args) -> Dict[str, Any]:
    ps = _load_points(args.input)
    bins = disjoint_partition(ps, args.h, args.n_bound)
    result = {'bins': bins, 'bin_count': len(bins), 'points': len(ps)}
    print(f"✅ {len(ps)} cubes in {len(bins)} disjoint bin(s) (bound {args.n_bound + 1})")
    _emit(args, _artifact('net-partition', args, result))
    return result


def cmd_constants(args) -> Dict[str, Any]:
    c_mq = args.c_mq if args.c_mq is not None else mz_settings.DEFAULT_C_MQ
    result: Dict[str, Any] = {'d': d_exponent(args.m, args.q)}
    if args.delta1 is not None:
        result['C1'] = c1_bound(args.delta1, args.sigma, args.m, args.q, args.n_mult, c_mq)
    if args.delta is not None:
        result['C2'] = c2_bound(args.delta, args.sigma, args.m, args.q, c_mq)
        result['C3'] = 1.0 - args.m * args.delta * args.sigma
    if args.delta1 is not None:
        c2 = args.c2 if args.c2 is not None else result.get('C2')
        if c2 is not None:
            result['delta_star'] = delta_star(args.delta1, args.sigma, args.m, args.q,
                                              args.n_mult, c2, c_mq)
    for key, value in result.items():
        print(f"📊 {key} = {value:.10g}")
    _emit(args, _artifact('constants', args, result))
    return result


def cmd_gamma0(args) -> Dict[str, Any]:
    alpha = args.alpha if args.kind is None else alpha_of(args.kind, args.param).alpha
    value = gamma0(alpha)
    print(f"gamma0({alpha:.6g}) = {_truncated(value)}")
    result = {'alpha': alpha, 'gamma0': value}
    _emit(args, _artifact('gamma0', args, result))
    return result


def cmd_tau0(args) -> Dict[str, Any]:
    value = tau0(args.b)
    print(f"tau0({args.b:.6g}) = {_truncated(value)}")
    result = {'b': args.b, 'tau0': value}
    _emit(args, _artifact('tau0', args, result))
    return result


def cmd_cheb_fit(args) -> Dict[str, Any]:
    sigma = args.sigma
    if args.function == 'exp':
        f = lambda p: np.exp(sigma * p.sum(axis=1))
    else:
        f = Sinc(sigma, args.m).evaluate
    series = fit_tensor_cheb(f, args.b, args.n, args.m, sigma=sigma)
    error = measure_sup_error(f, series)
    result: Dict[str, Any] = {'series': series_to_dict(series), 'sup_error': error}

    tau = args.n / (args.m * args.b * sigma)
    result['tau'] = tau
    if args.function == 'exp' and tau > gamma0(1.0):
        bound = math.exp(approx_error_bound(1.0, args.m, args.n, tau))
        result['certified_bound'] = bound
        _require(error <= bound, f"sup error {error:.6g} exceeds certified bound {bound:.6g}",
                 {'sup_error': error, 'bound': bound})
        print(f"📊 certified bound {bound:.6e}")
    print(f"✅ Degree {args.n} fit on Q^{args.m}_{args.b}: sup error {error:.6e}")
    _emit(args, _artifact('cheb-fit', args, result))
    return result


def cmd_rate_experiment(args) -> Dict[str, Any]:
    rows = convergence_rate_experiment(args.sigma, args.tau, args.n)
    last = rows[-1]
    print(f"✅ {len(rows)} degree(s); last local rate {last['local_rate']:.6f}, rate {last['rate']:.6f}")
    _emit(args, _artifact('rate-experiment', args, {'rows': rows}), RATE_COLUMNS, rows)
    return {'rows': rows}


def _verify_net(args, m: int) -> PointSet:
    if args.input:
        return _load_points(args.input)
    if args.spacing is None or args.extent is None:
        raise DomainError("either --in or both --spacing and --extent are required")
    offset = [args.offset] * m if args.offset is not None else None
    return lattice_net(m, args.spacing, Window.cube(m, args.extent), offset)


def cmd_mz_verify(args) -> Dict[str, Any]:
    m = args.m
    model = _build_model(args.model, args.sigma, m, args.q, args.gamma, args.shift)
    net = _verify_net(args, m)
    window = _window_from_args(args, net, m)

    if args.mode == 'sup':
        report = verify_sup_inequality(model, net, args.delta, args.sigma, m, window, args.resolution)
    elif args.mode == 'upper':
        report = upper_mz_experiment(model, net, args.delta1, args.sigma, m, args.q, args.c_mq,
                                     window, args.resolution)
    else:
        report = lower_mz_experiment(model, net, args.delta, args.sigma, m, args.q, args.c_mq,
                                     window, args.resolution)

    rows = mz_report_rows(report)
    for row in rows[:2]:
        print(f"📊 {row['param']}: measured {row['measured']} theoretical {row['theoretical']}")
    _emit(args, _artifact('mz-verify', args, report.to_dict()), ['param', 'measured', 'theoretical'], rows)
    _require(report.holds, f"{args.mode} inequality violated", report.to_dict())
    print(f"✅ {args.mode} inequality holds")
    return report.to_dict()


def cmd_cube_mz(args) -> Dict[str, Any]:
    report = cube_mz_experiment(args.N, args.b, args.m, args.gamma, args.c, args.trials,
                                args.seed, args.family)
    print(f"📊 max factor {report['max_factor']:.6f} over {args.trials} trial(s), "
          f"{report['knot_count']} knots")
    _emit(args, _artifact('cube-mz', args, report))
    _require(report['holds'], f"max factor {report['max_factor']:.6f} exceeds 1 + gamma",
             {'max_factor': report['max_factor']})
    print("✅ factor within 1 + gamma")
    return report


def cmd_witness(args) -> Dict[str, Any]:
    m = args.m
    net = _verify_net(args, m)
    if args.hole is not None:
        net = remove_within(net, [0.0] * m, args.hole)
    window = _window_from_args(args, net, m)
    found = necessity_witness(net, args.delta, args.sigma, args.c3, window)
    if found is None:
        result: Dict[str, Any] = {'witness': None}
        print("✅ Net covers the window; no witness")
    else:
        model, ratio = found
        result = {'witness': model.to_dict(), 'ratio': ratio, 'bound': 1.0 / (args.delta * args.sigma)}
        print(f"📊 witness at {model.shift.tolist()}, net ratio {ratio:.6g} < C3 = {args.c3}")
        _require(ratio <= result['bound'] * (1 + 1e-9), "witness ratio exceeds 1/(delta sigma)", result)
    _emit(args, _artifact('witness', args, result))
    return result


def _add_window_args(p: argparse.ArgumentParser):
    p.add_argument('--window-half', type=float, help='Half side of the window (default: around the points)')
    p.add_argument('--window-center', type=float, nargs='+', help='Window center coordinates')


def _add_net_source_args(p: argparse.ArgumentParser):
    p.add_argument('--in', dest='input', help='Headerless CSV of points')
    p.add_argument('--spacing', type=float, help='Lattice spacing when no CSV is given')
    p.add_argument('--extent', type=float, help='Lattice window half side')
    p.add_argument('--offset', type=float, help='Lattice offset on every axis')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mz_cli.py',
        description="Discretization toolkit - nets, constants, Chebyshev fits and MZ experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Threshold oversampling ratio
  python3 mz_cli.py gamma0 --alpha 1

  # Thin a point set to a delta-packing
  python3 mz_cli.py net-thin --in pts.csv --delta 0.5 --out thin.csv

  # Convergence rate table
  python3 mz_cli.py rate-experiment --sigma 1 --tau 2 --n 20:40:4 --out rate.csv
        """
    )
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    p = subparsers.add_parser('net-check', help='Separation, multiplicity and covering of a point set')
    p.add_argument('--in', dest='input', required=True, help='Headerless CSV of points')
    p.add_argument('--delta', type=float, help='Covering radius to certify')
    p.add_argument('--delta1', type=float, help='Packing parameter for the multiplicity')
    p.add_argument('--max-depth', type=int, help='Subdivision depth limit')
    _add_window_args(p)
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_net_check, format='json')

    p = subparsers.add_parser('net-thin', help='Greedy thinning to a delta-packing')
    p.add_argument('--in', dest='input', required=True, help='Headerless CSV of points')
    p.add_argument('--delta', type=float, required=True)
    p.add_argument('--out', help='CSV path for the kept points')
    p.set_defaults(func=cmd_net_thin)

    p = subparsers.add_parser('net-partition', help='Partition cubes into disjoint bins')
    p.add_argument('--in', dest='input', required=True, help='Headerless CSV of cube centers')
    p.add_argument('--h', type=float, required=True, help='Cube half side')
    p.add_argument('--n-bound', type=int, required=True, help='Intersection bound N')
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_net_partition, format='json')

    p = subparsers.add_parser('constants', help='C1, C2, C3, d and delta*')
    p.add_argument('--sigma', type=float, required=True)
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--q', type=_q_arg, required=True)
    p.add_argument('--delta', type=float)
    p.add_argument('--delta1', type=float)
    p.add_argument('--n-mult', type=int, default=0, help='Packing multiplicity N')
    p.add_argument('--c2', type=float, help='C2 used for delta* (default: the computed bound)')
    p.add_argument('--c-mq', type=float, help='Unspecified constant C(m,q)')
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_constants, format='json')

    p = subparsers.add_parser('gamma0', help='Threshold oversampling ratio for a given alpha')
    p.add_argument('--alpha', type=float, default=1.0)
    p.add_argument('--kind', choices=COMPACT_KINDS, help='Compute alpha for a symmetric compact')
    p.add_argument('--param', type=float, help='Ellipse parameter or disk radius')
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_gamma0, format='json')

    p = subparsers.add_parser('tau0', help='Root of G(., b)')
    p.add_argument('--b', type=float, required=True)
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_tau0, format='json')

    p = subparsers.add_parser('cheb-fit', help='Tensor Chebyshev fit with a certified bound')
    p.add_argument('--function', choices=['exp', 'sinc'], default='exp')
    p.add_argument('--sigma', type=float, required=True)
    p.add_argument('--b', type=float, default=1.0)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_cheb_fit, format='json')

    p = subparsers.add_parser('rate-experiment', help='Measured error rate of partial sums of e^(sigma w)')
    p.add_argument('--sigma', type=float, required=True)
    p.add_argument('--tau', type=float, required=True)
    p.add_argument('--n', type=parse_range, required=True, help='Degrees as a:b:step')
    p.add_argument('--format', choices=['json', 'csv'], default='csv')
    p.add_argument('--out', help='Output path')
    p.set_defaults(func=cmd_rate_experiment)

    p = subparsers.add_parser('mz-verify', help='Upper, lower or sup discretization check')
    p.add_argument('--mode', choices=['upper', 'lower', 'sup'], required=True)
    p.add_argument('--model', choices=MODEL_KINDS, default='sinc')
    p.add_argument('--sigma', type=float, required=True)
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--q', type=_q_arg, default=2.0)
    p.add_argument('--gamma', type=int, help='SincPower exponent (default floor(m/q)+1)')
    p.add_argument('--shift', type=float, nargs='+', help='ShiftedSinc center')
    p.add_argument('--delta', type=float)
    p.add_argument('--delta1', type=float)
    p.add_argument('--c-mq', type=float)
    p.add_argument('--resolution', type=int, help='Grid points per axis')
    _add_net_source_args(p)
    _add_window_args(p)
    p.add_argument('--format', choices=['json', 'csv'], default='json')
    p.add_argument('--out', help='Output path')
    p.set_defaults(func=cmd_mz_verify)

    p = subparsers.add_parser('cube-mz', help='Exponential polynomials on tensor knot sets')
    p.add_argument('--N', type=int, required=True)
    p.add_argument('--b', type=float, default=1.0)
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--gamma', type=float, default=0.5, help='Allowed excess factor')
    p.add_argument('--c', type=int, default=4, help='Grid factor')
    p.add_argument('--trials', type=int, default=200)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--family', choices=CUBE_MZ_FAMILIES, default='complex')
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_cube_mz, format='json')

    p = subparsers.add_parser('witness', help='Shifted-sinc witness for an uncovered window')
    p.add_argument('--delta', type=float, required=True)
    p.add_argument('--sigma', type=float, required=True)
    p.add_argument('--c3', type=float, required=True)
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--hole', type=float, help='Remove lattice points within this half side of 0')
    _add_net_source_args(p)
    _add_window_args(p)
    p.add_argument('--out', help='JSON report path')
    p.set_defaults(func=cmd_witness, format='json')

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    mz_settings.configure_logging(args.verbose)
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    try:
        CliConfig.from_args(args).validate()
        args.func(args)
        return EXIT_OK
    except InequalityViolation as e:
        print(f"❌ Inequality violated: {e}")
        logger.warning(f"{args.command}: {e} {e.details}")
        return EXIT_VIOLATION
    except (ValueError, OSError, TrialFailedError) as e:
        print(f"❌ Error: {str(e)}")
        logger.error(f"CLI Error: {str(e)}", exc_info=True)
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
