"""Command-line entry point for the MB engine."""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from .config import get_config, EngineConfig, ExitCode, Tier
from .config.constants import LITERATURE_SERIES_FILE, CORPUS_FILE
from .errors import (
    ClassMismatch, CodecError, ExprError, MBHFError, NonConvergent, NotationError, QuadratureError, SeriesError,
    StepFailed,
)
from .expr import configure_equality
from .models import SeriesBlock
from .notation import (
    SeedRegistry, apply_path, apply_path_with_ledger, build_map, default_seeds, parse_path, print_path,
)
from .quadrature import mb_quad
from .series import NamedSeriesRegistry, block_eval_detailed, default_registry, horn_eval
from .storage import FileManager, ReportWriter, codec
from .storage.file_manager import data_path, write_json
from .storage.report_writer import corpus_table, identities_table, ledger_table, map_table, points_table
from .verify import IdentityChecker, load_corpus

logger = logging.getLogger(__name__)


def parse_assignments(text: Optional[str]) -> Dict[str, complex]:
    """
    Parse "a=0.31,b'=0.57,x=0.1+0.2j" into a mapping of complex values.

    Raises:
        CodecError: an entry is not of the form name=number
    """
    values = {}
    if not text:
        return values
    for item in text.split(','):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition('=')
        if not sep or not name.strip():
            raise CodecError(f"expected name=value, got {item!r}")
        try:
            values[name.strip()] = complex(value.strip().replace(' ', ''))
        except ValueError:
            raise CodecError(f"{name.strip()}: {value.strip()!r} is not a number")
    return values


def _format_complex(value: complex) -> str:
    value = complex(value)
    if value.imag == 0:
        return f"{value.real:.12g}"
    return f"{value.real:.12g}{value.imag:+.12g}j"


def _load_registry(args) -> NamedSeriesRegistry:
    registry = default_registry()
    if getattr(args, 'literature', False):
        registry.load_file(str(data_path(LITERATURE_SERIES_FILE)), validate=not args.no_validate)
    for path in getattr(args, 'definitions', None) or []:
        registry.load_file(path, validate=not args.no_validate, seed_lookup=default_seeds().get)
    return registry


def _seed_and_path(args, file_manager: FileManager):
    """The seed registry and path a transform or quad command works on."""
    seeds = default_seeds()
    label = args.seed
    if args.input:
        # the input file becomes the only seed; --path then lists steps only
        label = args.seed or 'input'
        seeds = SeedRegistry()
        seeds.register(label, codec.read_integral(file_manager.resolve_input(args.input)))
    text = args.path
    if text and label and '-' not in text and text not in seeds:
        text = f"{label}-{text}"
    text = text or label
    if not text:
        raise CodecError("give --seed, --path or --input")
    path = parse_path(text, seeds)
    if label and seeds.canonical_name(label) != seeds.canonical_name(path.seed):
        raise ClassMismatch(f"path {text} does not start from seed {label}")
    return seeds, path


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_transform(args, config: EngineConfig, file_manager: FileManager, writer: ReportWriter) -> int:
    seeds, path = _seed_and_path(args, file_manager)
    try:
        integral, ledger = apply_path_with_ledger(path, seeds)
    except StepFailed as e:
        logger.error(f"transform failed at step {e.index} ({e.label}): {e}")
        return ExitCode.USAGE
    print(writer.render(ledger_table(ledger)))
    label = print_path(path)
    output = file_manager.output_path(args.output or f"{label}.json")
    document = codec.integral_to_document(integral)
    document['path'] = label
    document['ledger'] = [entry.to_dict() for entry in ledger]
    write_json(output, document)
    print(f"{label}: {integral.nvars}-fold integral written to {output}")
    return ExitCode.OK


def cmd_eval(args, config: EngineConfig, file_manager: FileManager, writer: ReportWriter) -> int:
    registry = _load_registry(args)
    params, point = parse_assignments(args.params), parse_assignments(args.point)
    tol = args.tol or config.series_tol
    if args.fn:
        series = registry.get(args.fn).template
        result = horn_eval(series, params, point, tol, args.max_shells or config.series_max_shells(series.nindices))
    elif args.series:
        doc = codec.read_series(file_manager.resolve_input(args.series))
        block = doc if isinstance(doc, SeriesBlock) else SeriesBlock(doc)
        maxN = args.max_shells or config.series_max_shells(len(block.series.args))
        result = block_eval_detailed(block, params, point, tol, maxN, registry)
    else:
        raise CodecError("give --fn or --series")
    print(f"value: {_format_complex(result.value)}")
    print(f"tail estimate: {result.tail_estimate:.3e}")
    print(f"shells: {result.shells}")
    if not result.converged:
        raise NonConvergent(f"series not converged after {result.shells} shells")
    return ExitCode.OK


def cmd_quad(args, config: EngineConfig, file_manager: FileManager, writer: ReportWriter) -> int:
    seeds, path = _seed_and_path(args, file_manager)
    integral = apply_path(path, seeds)
    T, _ = config.quad_defaults(integral.nvars)
    result = mb_quad(integral, parse_assignments(args.params), parse_assignments(args.point),
                     T=args.T or T, h=args.h or config.quad_step(integral.nvars),
                     delta=args.delta or config.quad_delta, threads=config.worker_count(),
                     deterministic=config.deterministic)
    print(f"value: {_format_complex(result.value)}")
    print(f"error estimate: {result.error_estimate:.3e}")
    if result.contour is not None:
        print(f"contour: {', '.join(f'{r:.4f}' for r in result.contour.real_parts)} "
              f"(T={result.T}, h={result.h:.4f}, {result.refinements} halvings)")
    return ExitCode.OK


def cmd_map(args, config: EngineConfig, file_manager: FileManager, writer: ReportWriter) -> int:
    depth = config.map_depth if args.depth is None else args.depth
    tmap = build_map(args.seed, depth, threads=config.worker_count())
    print(writer.render(map_table(tmap)))
    stem = f"map_{args.seed}_{depth}"
    output = file_manager.output_path(args.output or f"{stem}.json")
    write_json(output, tmap.to_dict())
    if args.dot:
        dot_path = file_manager.output_path(f"{stem}.dot")
        with open(dot_path, 'w', encoding='utf-8') as f:
            f.write(tmap.to_dot())
        logger.info(f"Wrote {dot_path}")
    print(f"{len(tmap.nodes)} nodes, {len(tmap.edges)} edges written to {output}")
    return ExitCode.OK


def _selected_tiers(args) -> List[Tier]:
    return [Tier(t) for t in args.tier] if args.tier else []


def cmd_verify(args, config: EngineConfig, file_manager: FileManager, writer: ReportWriter) -> int:
    identities = load_corpus(file_manager.resolve_input(args.corpus))
    checker = IdentityChecker(_load_registry(args), default_seeds(), config)
    report = checker.run_corpus(identities, _selected_tiers(args), args.id)

    print(writer.render(corpus_table(report)))
    output = file_manager.output_path(args.output or "verify-report.json")
    write_json(output, codec.report_document(report, corpus=args.corpus))
    if args.csv:
        writer.write_csv(corpus_table(report), "verify-identities.csv")
        writer.write_csv(points_table(report), "verify-points.csv")

    if report.count('fail') or report.count('error'):
        return ExitCode.VERIFICATION_FAILED
    if report.count('nonconvergent'):
        return ExitCode.NON_CONVERGENT
    return ExitCode.OK


def cmd_corpus_list(args, config: EngineConfig, file_manager: FileManager, writer: ReportWriter) -> int:
    identities = load_corpus(file_manager.resolve_input(args.corpus))
    tiers = _selected_tiers(args)
    table = identities_table(i for i in identities if not tiers or i.tier in tiers)
    print(writer.render(table))
    if args.csv:
        writer.write_csv(table, "corpus.csv")
    return ExitCode.OK


COMMANDS = {
    'transform': cmd_transform,
    'eval': cmd_eval,
    'quad': cmd_quad,
    'map': cmd_map,
    'verify': cmd_verify,
    'corpus-list': cmd_corpus_list,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Mellin-Barnes linear transformations of hypergeometric functions')
    parser.add_argument('--threads', type=int, help='Worker threads (default: MBHF_THREADS or all cores)')
    parser.add_argument('--deterministic', action=argparse.BooleanOptionalAction, default=None,
                        help='Fixed reduction orders for bit-stable output (default: on)')
    parser.add_argument('--random-seed', type=int, help='Seed of the randomized expression-equality checks')
    parser.add_argument('--output-dir', type=str, help='Directory for written files (default: mbhf_output)')
    parser.add_argument('--log-level', type=str, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level (default: MBHF_LOG_LEVEL or INFO)')
    sub = parser.add_subparsers(dest='command', required=True)

    def add_source(p):
        p.add_argument('--seed', type=str, help='Seed name, e.g. F_1 or H_C')
        p.add_argument('--path', type=str, help='Transformation path, e.g. F_1-2aE1aE')
        p.add_argument('--input', type=str, help='mb-integral.v1 file to start from instead of a seed')

    def add_registry(p):
        p.add_argument('--literature', action='store_true', help='Also load the shipped literature definitions')
        p.add_argument('--definitions', action='append', help='Extra named-series.v1 file (repeatable)')
        p.add_argument('--no-validate', action='store_true', help='Register extra definitions without quadrature checks')

    p = sub.add_parser('transform', help='Apply a transformation path and write the integral')
    add_source(p)
    p.add_argument('--output', type=str, help='Output file (default: <path>.json in the output directory)')

    p = sub.add_parser('eval', help='Sum a named series or a series file')
    p.add_argument('--fn', type=str, help='Registered series name, e.g. 2F1, F1, H_C')
    p.add_argument('--series', type=str, help='horn-series.v1 or series-block.v1 file')
    p.add_argument('--params', type=str, help='Parameters, e.g. a=1,b=1,c=2')
    p.add_argument('--point', type=str, help='Point, e.g. z=0.5')
    p.add_argument('--tol', type=float, help='Relative shell tolerance')
    p.add_argument('--max-shells', type=int, help='Largest shell summed')
    add_registry(p)

    p = sub.add_parser('quad', help='Integrate an MB integral numerically')
    add_source(p)
    p.add_argument('--params', type=str, help='Parameters, e.g. a=0.31,b=0.43,c=2.11')
    p.add_argument('--point', type=str, help='Point, e.g. x=-0.2,y=-0.15')
    p.add_argument('--T', type=float, help='Truncation of each imaginary part')
    p.add_argument('--h', type=float, help='Quadrature step')
    p.add_argument('--delta', type=float, help='Minimal contour margin')

    p = sub.add_parser('map', help='Build the transformation map of a seed')
    p.add_argument('--seed', type=str, required=True, help='Seed name')
    p.add_argument('--depth', type=int, help='Number of steps from the seed (default: MBHF_MAP_DEPTH or 4)')
    p.add_argument('--output', type=str, help='Output file (default: map_<seed>_<depth>.json)')
    p.add_argument('--dot', action='store_true', help='Also write a Graphviz file')

    tiers = [t.value for t in Tier]
    p = sub.add_parser('verify', help='Check the identities of a corpus')
    p.add_argument('--corpus', type=str, default=CORPUS_FILE, help='Corpus file (default: the shipped corpus)')
    p.add_argument('--tier', action='append', choices=tiers, help='Only identities of this tier (repeatable)')
    p.add_argument('--id', action='append', help='Only this identity (repeatable)')
    p.add_argument('--output', type=str, help='Report file (default: verify-report.json)')
    p.add_argument('--csv', action='store_true', help='Also write the report tables as CSV')
    add_registry(p)

    p = sub.add_parser('corpus-list', help='List the identities of a corpus')
    p.add_argument('--corpus', type=str, default=CORPUS_FILE, help='Corpus file (default: the shipped corpus)')
    p.add_argument('--tier', action='append', choices=tiers, help='Only identities of this tier (repeatable)')
    p.add_argument('--csv', action='store_true', help='Also write the table as CSV')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the MB engine."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return ExitCode.OK if e.code == 0 else ExitCode.USAGE

    config = get_config()
    if args.log_level:
        config.log_level = args.log_level
        logging.getLogger().setLevel(args.log_level)
    if args.threads:
        config.threads = args.threads
    if args.deterministic is not None:
        config.deterministic = args.deterministic
    if args.random_seed is not None:
        config.equality_seed = args.random_seed
    if args.output_dir:
        config.output_dir = args.output_dir
    configure_equality(config.equality_samples, config.equality_seed)

    file_manager = FileManager(config.output_dir)
    writer = ReportWriter(file_manager)
    try:
        return int(COMMANDS[args.command](args, config, file_manager, writer))
    except NonConvergent as e:
        logger.error(f"{args.command}: {e}")
        return ExitCode.NON_CONVERGENT
    except (CodecError, ExprError, NotationError, SeriesError) as e:
        logger.error(f"{args.command}: {type(e).__name__}: {e}")
        return ExitCode.USAGE
    except QuadratureError as e:
        logger.error(f"{args.command}: {type(e).__name__}: {e}")
        return ExitCode.NON_CONVERGENT
    except MBHFError as e:
        logger.error(f"{args.command}: {type(e).__name__}: {e}")
        return ExitCode.VERIFICATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
