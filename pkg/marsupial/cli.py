# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Command line front end.

Exit status is 0 on success, 1 for invalid input (scene, configuration,
files, arguments), 2 when a target cannot be reached and 3 for anything
unexpected.  Errors are also written to stderr as one JSON object.
"""

import argparse
import io
import json
import logging
import os
import sys
from dataclasses import asdict

from marsupial.baseline import rrt_star_plan
from marsupial.config import ConfigDatabase
from marsupial.errors import ConfigError, MarsupialError, NoCandidates, SceneError, Unreachable
from marsupial.export import plane_view, top_view
from marsupial.geometry import load_scene, scene_from_dict, scene_to_dict
from marsupial.planner import maspa_plan, plan_document, plan_from_dict, plan_sequential
from marsupial.scenario import aggregate, benchmark_grid, build_realistic, random_scenario, spec_from_dict, write_csv

logger = logging.getLogger("marsupial")

LOGGING_LEVELS = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'CRITICAL': logging.CRITICAL,
    'NONE': None,
}

EXIT_OK, EXIT_INPUT, EXIT_UNREACHABLE, EXIT_INTERNAL = 0, 1, 2, 3


class NullLoggingHandler(logging.Handler):
    """
    Attach this handler to your logger to disable all logging.
    """
    def emit(self, record):
        pass


def set_up_logging(logger, level, should_be_quiet):
    """
    Sets up logging for marsupial.

    :param logger:
        The logger object to update.
    :param level:
        Logging level specified at command line.
    :param should_be_quiet:
        Boolean value for the -q option.
    :return:
        logging level ``int`` or None
    """
    for handler in list(logger.handlers):
        if getattr(handler, "_marsupial_cli", False):
            logger.removeHandler(handler)

    logging_level = LOGGING_LEVELS.get(level)
    if should_be_quiet or logging_level is None:
        logging_handler = NullLoggingHandler()
    else:
        logger.setLevel(logging_level)
        logging_handler = logging.StreamHandler(sys.stderr)
        logging_handler.setLevel(logging_level)
        logging_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s:%(name)s:%(levelname)s: %(message)s"
                )
            )
    logging_handler._marsupial_cli = True
    logger.addHandler(logging_handler)
    return logging_level


class _ArgumentError(MarsupialError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message, context=self.prog)


def _int_list(text):
    """
    >>> _int_list("4,8,16")
    [4, 8, 16]
    """
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated integers, got %r" % text)


def _seed_range(text):
    """
    >>> _seed_range("3..5")
    [3, 4, 5]
    >>> _seed_range("7")
    [7]
    """
    try:
        if ".." in text:
            first, last = text.split("..", 1)
            return list(range(int(first), int(last) + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError("expected A..B or a single seed, got %r" % text)


def _name_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def parse_command_line(argv):
    """
    Parses the command line and returns a ``Namespace`` object
    containing options and their values.

    :return:
        A ``Namespace`` object containing options and their values.
    """
    from marsupial import __version__

    parser = _Parser(prog="marsupial", description=__doc__.split("\n")[0])
    parser.add_argument('-v',
                        '--version',
                        action='version',
                        version='%(prog)s ' + __version__,
                        help="Show version number and exit.")
    parser.add_argument('-q',
                        '--quiet',
                        dest='should_be_quiet',
                        action='store_true',
                        default=False,
                        help="Disables verbose logging")
    parser.add_argument('-L',
                        '--log-level',
                        '--logging-level',
                        dest='logging_level',
                        choices=list(LOGGING_LEVELS),
                        default='INFO',
                        help="Logging level.")
    parser.add_argument('-c',
                        '--config',
                        metavar="PATH",
                        dest='config_files',
                        default=[],
                        action='append',
                        help="YAML configuration merged over the bundled defaults; may be repeated.")
    parser.add_argument('-P',
                        '--print-config',
                        dest='should_print_config',
                        action='store_true',
                        default=False,
                        help='Display the merged configuration and exit.')
    parser.add_argument('-f',
                        '--force',
                        dest='should_force_overwrite',
                        action='store_true',
                        default=False,
                        help='Force overwrite existing output file.')
    parser.add_argument('--threads',
                        type=int,
                        default=None,
                        help='Worker threads for half-planes and benchmark cells (default: all cores).')

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')

    plan = commands.add_parser('plan', help='Plan ground and aerial paths for a scene.')
    plan.add_argument('scene_filename', metavar='SCENE_FILE')
    plan.add_argument('--p', type=int, default=None, help='Vertical planes per target.')
    plan.add_argument('--q', type=int, default=None, help='Candidates per half-plane.')
    plan.add_argument('--c', type=int, default=None, help='Catenary lengths per candidate.')
    plan.add_argument('--mode', choices=['taut', 'catenary'], default=None)
    plan.add_argument('--no-pva', dest='use_pva', action='store_false', default=None,
                      help='Sample the whole take-off line without visibility filtering.')
    plan.add_argument('--refine', type=int, default=None,
                      help='Extra half-planes on each side of the winning one (0 disables).')
    plan.add_argument('--target', type=int, default=None, help='Plan only this target index.')
    plan.add_argument('-o', '--out', dest='output_filename', default=None,
                      help='Output plan file (default STDOUT)')

    gen = commands.add_parser('gen', help='Generate a random scene.')
    gen.add_argument('--seed', type=int, required=True)
    gen.add_argument('--spec', dest='spec_filename', default=None, help='Scenario spec JSON.')
    gen.add_argument('--realistic', choices=['s1_fireplace', 's2_balconies'], default=None,
                     help='Write a hand-built scene instead.')
    gen.add_argument('-o', '--out', dest='output_filename', default=None)

    bench = commands.add_parser('bench', help='Run the benchmark grid.')
    bench.add_argument('--seeds', type=_seed_range, required=True, help='A..B inclusive.')
    bench.add_argument('--p-set', type=_int_list, default=None)
    bench.add_argument('--q-set', type=_int_list, default=None)
    bench.add_argument('--planners', type=_name_list, default=None,
                       help='Comma separated: maspa, maspa-minus, rrt.')
    bench.add_argument('--scenario', choices=['s1_fireplace', 's2_balconies'], default=None)
    bench.add_argument('--budget', type=float, default=None, help='Sampling planner budget (s).')
    bench.add_argument('--max-iterations', type=int, default=None)
    bench.add_argument('-o', '--out', dest='output_filename', default=None)

    rrt = commands.add_parser('rrt', help='Plan with the sampling-based comparison planner.')
    rrt.add_argument('scene_filename', metavar='SCENE_FILE')
    rrt.add_argument('--budget', type=float, default=None)
    rrt.add_argument('--seed', type=int, default=None)
    rrt.add_argument('--max-iterations', type=int, default=None)
    rrt.add_argument('--target', type=int, default=0)
    rrt.add_argument('-o', '--out', dest='output_filename', default=None)

    export = commands.add_parser('export', help='Draw a scene or plan as SVG.')
    export.add_argument('input_filename', metavar='PLAN_OR_SCENE_FILE')
    export.add_argument('--svg', dest='output_filename', required=True)
    export.add_argument('--view', default='top', help='top or plane:k')
    export.add_argument('--target', type=int, default=0)

    args = parser.parse_args(argv)
    if args.command is None and not args.should_print_config:
        parser.error("a command is required")
    return args


#---- output helpers

def _write(args, text):
    output_filename = args.output_filename
    if output_filename is None:
        sys.stdout.write(text)
        return
    if os.path.exists(output_filename) and not args.should_force_overwrite:
        raise ConfigError("File `%s` exists - cannot overwrite. (Use -f to force overwrite.)" % output_filename)
    with open(output_filename, 'w', encoding='utf-8', newline='') as output_file:
        output_file.write(text)


def _dump(doc):
    return json.dumps(doc, indent=2) + "\n"


def _read_json(filename):
    try:
        with open(filename, 'r', encoding='utf-8') as input_file:
            return json.load(input_file)
    except ValueError as ex:
        raise SceneError("not valid JSON: %s" % ex, context=filename)
    except OSError as ex:
        raise SceneError("cannot read file: %s" % ex.strerror, context=filename)


def _load_scene(filename):
    if not os.path.exists(filename):
        raise SceneError("no such file", context=filename)
    return load_scene(filename)


#---- commands

def do_plan(args, db):
    scene = _load_scene(args.scene_filename)
    params = db.planner_params(p=args.p, q=args.q, c=args.c, mode=args.mode, use_pva=args.use_pva,
                               refine=args.refine)
    if args.target is None:
        plans = plan_sequential(scene, params, threads=args.threads)
    else:
        if not 0 <= args.target < len(scene.targets):
            raise SceneError("target index %d out of range" % args.target, context=args.scene_filename)
        plans = [maspa_plan(scene, args.target, params, threads=args.threads)]
    _write(args, _dump(plan_document(scene, plans, params)))


def do_gen(args, db):
    if args.realistic:
        scene = build_realistic(args.realistic)
    else:
        spec = db.scenario_spec(seed=args.seed)
        if args.spec_filename:
            overrides = _read_json(args.spec_filename)
            if not isinstance(overrides, dict):
                raise ConfigError("scenario spec must be an object", context=args.spec_filename)
            overrides.setdefault('seed', args.seed)
            spec = spec_from_dict(dict(asdict(spec), **overrides))
        scene = random_scenario(spec)
    _write(args, _dump(scene_to_dict(scene)))


def do_bench(args, db):
    settings = db.section('benchmark')
    rrt = db.rrt_params(budget_s=args.budget, max_iterations=args.max_iterations)
    planner = db.planner_params()
    records = benchmark_grid(
        args.seeds,
        args.p_set or settings['p_set'],
        args.q_set or settings['q_set'],
        args.planners or settings['planners'],
        spec=db.scenario_spec(),
        realistic=args.scenario,
        c=planner.c,
        mode=planner.mode,
        rrt=rrt,
        threads=args.threads,
    )
    for row in aggregate(records):
        logger.info("%s p=%d q=%d n=%d: TL %.2f +/- %.2f m, ET %.3f +/- %.3f s", *row)

    buffer = io.StringIO()
    write_csv(records, buffer)
    _write(args, buffer.getvalue())


def do_rrt(args, db):
    scene = _load_scene(args.scene_filename)
    if not 0 <= args.target < len(scene.targets):
        raise SceneError("target index %d out of range" % args.target, context=args.scene_filename)
    params = db.rrt_params(budget_s=args.budget, seed=args.seed, max_iterations=args.max_iterations)
    plan = rrt_star_plan(scene, args.target, params)
    _write(args, _dump(plan_document(scene, [plan])))


def _export_samples(db) -> int:
    samples = db.section("export").get("samples")
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 2:
        raise ConfigError("export samples must be an integer of at least 2, got %r" % (samples,))
    return samples


def _beam_size(doc, db) -> int:
    """``p`` the plan was made with, the configured one for bare scenes."""
    params = doc.get("params") if isinstance(doc, dict) else None
    if isinstance(params, dict) and isinstance(params.get("p"), int):
        return params["p"]
    return db.planner_params().p


def do_export(args, db):
    doc = _read_json(args.input_filename)
    samples = _export_samples(db)
    if isinstance(doc, dict) and 'plans' in doc:
        scene, plans = plan_from_dict(doc)
    else:
        scene, plans = scene_from_dict(doc), []
    if args.view == 'top':
        svg = top_view(scene, plans, samples)
    elif args.view.startswith('plane:'):
        try:
            k = int(args.view.split(':', 1)[1])
        except ValueError:
            raise ConfigError("view must be top or plane:k, got %r" % args.view)
        if not 0 <= args.target < len(scene.targets):
            raise SceneError("target index %d out of range" % args.target, context=args.input_filename)
        start = scene.start
        for plan in plans:
            if plan.target_index == args.target:
                start = plan.ground_path[0]
        try:
            svg = plane_view(scene, args.target, k, _beam_size(doc, db), plans, start, samples)
        except ValueError as ex:
            raise ConfigError(str(ex))
    else:
        raise ConfigError("view must be top or plane:k, got %r" % args.view)
    _write(args, svg)


COMMANDS = {
    'plan': do_plan,
    'gen': do_gen,
    'bench': do_bench,
    'rrt': do_rrt,
    'export': do_export,
}


def _report(ex, logging_level):
    if logging_level == logging.DEBUG:
        import traceback
        traceback.print_exc(file=sys.stderr)
    if isinstance(ex, MarsupialError):
        record = ex.to_dict()
    else:
        record = {"error": ex.__class__.__name__, "message": str(ex), "context": None}
    sys.stderr.write(json.dumps(record) + "\n")


def run(argv=None):
    """
    Runs one command line and returns the exit status.

    :param argv:
        Arguments without the program name, ``sys.argv[1:]`` when omitted.
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_command_line(argv)
    except _ArgumentError as ex:
        _report(ex, None)
        return EXIT_INPUT
    except SystemExit as ex:
        # --help and --version
        return ex.code or EXIT_OK

    logging_level = set_up_logging(logger, args.logging_level, args.should_be_quiet)
    try:
        db = ConfigDatabase()
        for config_file in args.config_files:
            db.add_config_file(config_file)
        if args.should_print_config:
            sys.stdout.write(db.dump())
            if args.command is None:
                return EXIT_OK
        COMMANDS[args.command](args, db)
    except (Unreachable, NoCandidates) as ex:
        _report(ex, logging_level)
        return EXIT_UNREACHABLE
    except (MarsupialError, OSError) as ex:
        _report(ex, logging_level)
        return EXIT_INPUT
    except Exception as ex:
        _report(ex, logging.DEBUG)
        return EXIT_INTERNAL
    return EXIT_OK


def main():
    """
    Entry-point function.
    """
    sys.exit(run())
