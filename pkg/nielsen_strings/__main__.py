import argparse
import logging
import sys

from nielsen_strings import SolverSettings, __version__
from nielsen_strings.actor import solve_with_deadline
from nielsen_strings.bench import run_bench
from nielsen_strings.errors import ParseError, SettingsError
from nielsen_strings.graph import SAT
from nielsen_strings.oracle import brute_force
from nielsen_strings.smtlib import format_model, parse_file
from nielsen_strings.terms import alphabet_of

logger = logging.getLogger(__name__)

EXIT_VERDICT = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2

#: Boolean settings that have a command line switch to turn them off.
ABLATIONS = ("dedup", "parikh", "look_ahead", "decompose", "power_introduction")


def _solver_flags(parser):
    parser.add_argument("--timeout", type=int, metavar="S")
    parser.add_argument("--max-depth", type=int, metavar="N")
    parser.add_argument("--max-nodes", type=int, metavar="N")
    parser.add_argument("--probe-bound", type=int, metavar="N")
    parser.add_argument("--max-pattern-len", type=int, metavar="N")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--max-chain-length", type=int, metavar="N")
    for name in ABLATIONS:
        parser.add_argument(
            f"--no-{name.replace('_', '-')}",
            dest=name,
            action="store_false",
            default=None,
        )
    parser.add_argument("--strategy", choices=("iterdeep", "bfs"))
    parser.add_argument("--config", metavar="INI")
    parser.add_argument("-v", "--verbose", action="count", default=0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nielsen-strings",
        description="Decide word equations with Nielsen transformations.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    solve = commands.add_parser("solve", help="solve one SMT-LIB file")
    solve.add_argument("file")
    _solver_flags(solve)
    solve.add_argument("--dump-dot", metavar="PATH")
    solve.add_argument("--stats", action="store_true")
    solve.add_argument("--model", action="store_true")

    bench = commands.add_parser("bench", help="solve every file under DIR")
    bench.add_argument("directory", metavar="DIR")
    _solver_flags(bench)
    bench.add_argument("--csv", metavar="PATH")
    bench.add_argument("--jobs", type=int, default=1, metavar="N")
    bench.add_argument("--oracle-len", type=int, metavar="N")

    # Registered without help, so it stays out of the listing.
    oracle = commands.add_parser("oracle")
    oracle.add_argument("file")
    oracle.add_argument("--max-len", type=int, default=4, metavar="N")
    oracle.add_argument("--alphabet", metavar="CHARS")
    oracle.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _settings(args):
    overrides = {
        "timeout": args.timeout,
        "max_depth": args.max_depth,
        "max_nodes": args.max_nodes,
        "probe_bound": args.probe_bound,
        "max_pattern_len": args.max_pattern_len,
        "max_chain_length": args.max_chain_length,
        "seed": args.seed,
        "strategy": args.strategy,
    }
    overrides.update((name, getattr(args, name)) for name in ABLATIONS)
    return SolverSettings().load(args.config, overrides)


def _solve(args, out):
    config = _settings(args)
    problem = parse_file(args.file)
    outcome = solve_with_deadline(
        problem, config, keep_graph=bool(args.dump_dot)
    )
    result = outcome.result
    print(result.verdict, file=out)
    if result.verdict == SAT and (args.model or problem.wants_model):
        print("(", file=out)
        for line in format_model(result.model, problem.variables):
            print(f"  {line}", file=out)
        print(")", file=out)
    if args.stats:
        for line in outcome.statistics.lines():
            print(line, file=out)
    if args.dump_dot and outcome.graph is not None:
        with open(args.dump_dot, "w", encoding="utf-8") as handle:
            for line in outcome.graph.to_dot():
                handle.write(line + "\n")
    return EXIT_VERDICT


def _bench(args, out):
    config = _settings(args)
    report = run_bench(
        args.directory, config, jobs=args.jobs, oracle_len=args.oracle_len
    )
    for row in report.rows:
        print(f"{row.file} {row.verdict} {row.time_ms}", file=out)
    for line in report.table():
        print(line, file=out)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as handle:
            report.write_csv(handle)
    return EXIT_VERDICT


def _oracle(args, out):
    problem = parse_file(args.file)
    alphabet = args.alphabet or alphabet_of(problem.assertions)
    result = brute_force(problem.assertions, args.max_len, alphabet)
    print(result, file=out)
    if result.sat:
        print("(", file=out)
        for line in format_model(result.model, problem.variables):
            print(f"  {line}", file=out)
        print(")", file=out)
    return EXIT_VERDICT


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(
        level=level, format="%(levelname)-8s %(name)s: %(message)s"
    )
    command = {"solve": _solve, "bench": _bench, "oracle": _oracle}
    source = getattr(args, "file", None) or getattr(args, "directory", "")
    try:
        return command[args.command](args, out)
    except ParseError as exc:
        print(exc.describe(source), file=sys.stderr)
        return EXIT_INPUT
    except SettingsError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:
        logger.exception(f"Internal error while running {args.command}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
