"""
Command line entry point ``conetrace``.

Exit codes: 0 success, 1 numerical failure, 2 invalid input, 3 search budget exceeded, 64 usage error.
"""
import argparse
import csv
import json
import logging
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from conetrace import defaults
from conetrace.bands import optimal_band
from conetrace.builders import load_surface
from conetrace.cache import EnumerationCache
from conetrace.diffraction import circle_link_spectrum, diffraction_coefficient_closed, diffraction_coefficient_modesum
from conetrace.enumeration import dlspec, enumerate_closed_chains
from conetrace.exceptions import BudgetExceeded, ConetraceError, GeometricSingularity, InvalidInputError
from conetrace.objects.documents import CompareResult
from conetrace.objects.manifest import RunManifest
from conetrace.spectral import compare_with_prediction, detect_peaks, load_frequencies, smoothed_trace
from conetrace.trace_formula import assemble_symbol, numeric_symbol_transform, predict_singularities

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64


def tool_version() -> str:
    try:
        return version('conetrace')
    except PackageNotFoundError:
        return '0+unknown'


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(value):
    v = float(value)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return v


def _positive_int(value):
    v = int(value)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return v


def _add_enumeration_args(parser, length_required=True):
    parser.add_argument('--max-length', type=_positive_float, required=length_required,
                        help="length bound L_max of the closed chains")
    parser.add_argument('--max-diffractions', type=_positive_int, default=None,
                        help="bound k_max on the number of diffractions (default: none)")
    parser.add_argument('--node-budget', type=_positive_int, default=defaults.NODE_BUDGET)
    parser.add_argument('--workers', type=_positive_int, default=None, help="worker processes of the search")
    parser.add_argument('--no-cache', action='store_true', help="do not read or write the enumeration cache")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='conetrace',
                            description="Diffractive wave-trace predictions for flat surfaces with cone points.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {tool_version()}")
    parser.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('geodesics', help="enumerate closed diffractive geodesics")
    p.add_argument('--surface', required=True)
    _add_enumeration_args(p)
    p.add_argument('--out')

    p = sub.add_parser('dlspec', help="diffractive length spectrum")
    p.add_argument('--surface', required=True)
    _add_enumeration_args(p)
    p.add_argument('--out')

    p = sub.add_parser('diffract', help="diffraction coefficient of a circle link")
    p.add_argument('--alpha', type=_positive_float, required=True, help="cone angle")
    p.add_argument('--theta-in', type=float, required=True)
    p.add_argument('--theta-out', type=float, required=True)
    p.add_argument('--mode-sum', action='store_true', help="Abel damped mode sum instead of the closed form")
    p.add_argument('--modes', type=_positive_int, default=None, help="mode truncation K of the mode sum")
    p.add_argument('--out')

    p = sub.add_parser('trace', help="predicted wave-trace singularities")
    p.add_argument('--surface', required=True)
    _add_enumeration_args(p)
    p.add_argument('--series-csv', help="CSV of the numeric symbol transform around every prediction")
    p.add_argument('--series-window', type=_positive_float, default=0.5)
    p.add_argument('--series-points', type=_positive_int, default=201)
    p.add_argument('--taper', type=float, default=1e-3)
    p.add_argument('--out')

    p = sub.add_parser('compare', help="compare a smoothed spectral trace with the length spectrum")
    p.add_argument('--surface', required=True)
    p.add_argument('--eigs', required=True, help="frequency file, one frequency per line")
    p.add_argument('--sigma', type=_positive_float, help="smoothing width, required")
    p.add_argument('--tmax', type=_positive_float, help="end of the time window, required")
    p.add_argument('--tmin', type=float, default=0.5)
    p.add_argument('--step', type=_positive_float, default=None, help="time step (default: sigma / 4)")
    p.add_argument('--prominence', type=_positive_float, default=defaults.PEAK_PROMINENCE)
    p.add_argument('--tol', type=float, default=None, help="matching tolerance (default: sigma)")
    p.add_argument('--trace-csv', help="CSV of the smoothed trace")
    _add_enumeration_args(p, length_required=False)
    p.add_argument('--out')

    p = sub.add_parser('bands', help="resonance band report")
    p.add_argument('--surface', required=True)
    p.add_argument('--epsilon', type=_positive_float, default=0.1)
    p.add_argument('--dimension', type=int, default=None)
    p.add_argument('--out')
    return parser


def _cache(args):
    return None if getattr(args, 'no_cache', False) else EnumerationCache()


def _enumeration_kwargs(args) -> dict:
    return dict(node_budget=args.node_budget, workers=args.workers, cache=_cache(args))


def _enumeration_parameters(args) -> dict:
    return {'max_length': args.max_length, 'max_diffractions': args.max_diffractions,
            'node_budget': args.node_budget}


def _dump(models):
    return [m.model_dump(mode='json') for m in models]


def cmd_geodesics(args):
    graph = load_surface(args.surface)
    chains = enumerate_closed_chains(graph, args.max_length, args.max_diffractions, **_enumeration_kwargs(args))
    manifest = RunManifest.for_files('geodesics', {'surface': args.surface}, _enumeration_parameters(args),
                                     tool_version())
    return manifest, _dump(chains)


def cmd_dlspec(args):
    graph = load_surface(args.surface)
    entries = dlspec(graph, args.max_length, args.max_diffractions, **_enumeration_kwargs(args))
    manifest = RunManifest.for_files('dlspec', {'surface': args.surface}, _enumeration_parameters(args),
                                     tool_version())
    return manifest, _dump(entries)


def cmd_diffract(args):
    if args.mode_sum:
        spectrum = circle_link_spectrum(args.alpha, args.theta_in, args.theta_out, modes=args.modes)
        coefficient = diffraction_coefficient_modesum(spectrum)
    else:
        coefficient = diffraction_coefficient_closed(args.alpha, args.theta_in, args.theta_out)
    manifest = RunManifest(command='diffract', tool_version=tool_version(),
                           parameters={'alpha': args.alpha, 'theta_in': args.theta_in, 'theta_out': args.theta_out,
                                       'mode_sum': args.mode_sum, 'modes': args.modes})
    return manifest, coefficient.model_dump(mode='json')


def _write_series(args, graph, chains, path, manifest_id):
    """Numeric transform of every strictly diffractive chain with a non-vanishing symbol."""
    rows = []
    for chain in chains:
        if chain.geometric:
            continue
        try:
            coefficients = [diffraction_coefficient_closed(tr.circumference, tr.theta_in, tr.theta_out)
                            for tr in chain.transitions]
        except GeometricSingularity:
            continue
        symbol = assemble_symbol(chain, graph.dimension, coefficients)
        if symbol.vanishing:
            continue
        t = chain.length + args.series_window * np.linspace(-1, 1, args.series_points)
        rows.append((chain.id, numeric_symbol_transform(symbol, t, taper=args.taper)))

    with open(path, 'w', newline='') as csvfile:
        csvfile.write(f"# manifest_id: {manifest_id}\n")
        writer = csv.writer(csvfile)
        writer.writerow(['chain', 't', 're', 'im', 'abs'])
        for chain_id, series in rows:
            for t, v in zip(series.t, series.values):
                writer.writerow([chain_id] + [defaults.CSV_FLOAT_FORMAT % x for x in (t, v.real, v.imag, abs(v))])
    log.debug(f"Wrote {len(rows)} transform series to {path}")
    return path


def cmd_trace(args):
    graph = load_surface(args.surface)
    chains = enumerate_closed_chains(graph, args.max_length, args.max_diffractions, **_enumeration_kwargs(args))
    predictions = predict_singularities(graph, args.max_length, chains=chains)
    parameters = _enumeration_parameters(args)
    manifest = RunManifest.for_files('trace', {'surface': args.surface}, parameters, tool_version())
    if args.series_csv:
        manifest.add(_write_series(args, graph, chains, args.series_csv, manifest.manifest_id))
    return manifest, _dump(predictions)


def cmd_compare(args):
    graph = load_surface(args.surface)
    freqs = load_frequencies(args.eigs)
    if args.sigma is None or args.tmax is None:
        raise InvalidInputError("compare needs --sigma and --tmax")
    step = args.step or args.sigma / 4
    tol = args.sigma if args.tol is None else args.tol
    if args.tmin >= args.tmax:
        raise InvalidInputError(f"tmin {args.tmin} must be smaller than tmax {args.tmax}")
    max_length = args.max_length or args.tmax

    t_grid = np.arange(args.tmin, args.tmax + step / 2, step)
    trace = smoothed_trace(freqs, args.sigma, t_grid)
    peaks = detect_peaks(trace, prominence=args.prominence)
    entries = dlspec(graph, max_length, args.max_diffractions, **_enumeration_kwargs(args))
    report = compare_with_prediction(peaks, entries, tol)

    parameters = {'sigma': args.sigma, 'tmin': args.tmin, 'tmax': args.tmax, 'step': step,
                  'prominence': args.prominence, 'tol': tol, 'max_length': max_length,
                  'max_diffractions': args.max_diffractions, 'node_budget': args.node_budget}
    manifest = RunManifest.for_files('compare', {'surface': args.surface, 'eigs': args.eigs}, parameters,
                                     tool_version())
    if args.trace_csv:
        manifest.add(trace.to_csv(args.trace_csv, manifest_id=manifest.manifest_id))
    result = CompareResult(sigma=args.sigma, t_min=args.tmin, t_max=args.tmax, step=step,
                           frequency_count=len(freqs), frequency_max=freqs.max, peaks=peaks,
                           predictions=entries, report=report)
    return manifest, result.model_dump(mode='json')


def cmd_bands(args):
    graph = load_surface(args.surface)
    report = optimal_band(graph, n=args.dimension, epsilon=args.epsilon)
    manifest = RunManifest.for_files('bands', {'surface': args.surface},
                                     {'epsilon': args.epsilon, 'dimension': args.dimension}, tool_version())
    return manifest, report.model_dump(mode='json')


COMMANDS = {
    'geodesics': cmd_geodesics,
    'dlspec': cmd_dlspec,
    'diffract': cmd_diffract,
    'trace': cmd_trace,
    'compare': cmd_compare,
    'bands': cmd_bands,
}


def run(argv=None) -> int:
    """
    Run one command and return its exit code.

    :param argv: Arguments without the program name.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')

    try:
        manifest, result = COMMANDS[args.command](args)
    except BudgetExceeded as e:
        log.error(str(e))
        return EXIT_BUDGET
    except (InvalidInputError, GeometricSingularity, FileNotFoundError) as e:
        log.error(str(e))
        return EXIT_INVALID
    except ConetraceError as e:
        log.error(str(e))
        return EXIT_FAILURE

    manifest.start()
    if args.out:
        manifest.write_output(args.out, result)
        manifest.finish()
        manifest.write(args.out)
    else:
        manifest.finish()
        sys.stdout.write(json.dumps({'manifest_id': manifest.manifest_id, 'result': result},
                                    sort_keys=True, indent=defaults.JSON_INDENT) + '\n')
    return EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))
