"""Benchmark runs over a directory tree of ``.smt2`` files.

Each file is solved in its own actor. The track of a file is the name of
the directory containing it.
"""

import collections
import csv
import functools
import logging
import pathlib
import time
from dataclasses import dataclass
from multiprocessing.pool import ThreadPool
from typing import Tuple

from nielsen_strings.actor import solve_with_deadline
from nielsen_strings.errors import ParseError, UnsupportedFeatureError
from nielsen_strings.graph import SAT, UNKNOWN, UNSAT
from nielsen_strings.models import BenchRow
from nielsen_strings.oracle import brute_force
from nielsen_strings.smtlib import parse_file
from nielsen_strings.terms import alphabet_of

logger = logging.getLogger(__name__)

CSV_FIELDS = ("file", "verdict", "time_ms", "nodes")


def discover(directory):
    return sorted(pathlib.Path(directory).rglob("*.smt2"))


def cross_check(problem, max_len):
    """Look for a bounded model of an instance reported unsat."""
    bounded = brute_force(
        problem.assertions, max_len, alphabet_of(problem.assertions)
    )
    if bounded.sat:
        logger.error(
            f"{problem.source}: unsat contradicted by bounded model "
            f"{bounded.model.strings}"
        )
        return "contradicted"
    return "agrees"


def run_file(path, config, oracle_len=None):
    """Solve one file. A sat answer whose model fails verification
    raises ``ModelVerificationError``."""
    path = pathlib.Path(path)
    track = path.parent.name
    started = time.monotonic()
    try:
        problem = parse_file(path)
    except UnsupportedFeatureError as exc:
        logger.warning(exc.describe(str(path)))
        return BenchRow(
            file=str(path), track=track, verdict=UNKNOWN, reason="unsupported"
        )
    except ParseError as exc:
        logger.error(exc.describe(str(path)))
        return BenchRow(
            file=str(path), track=track, verdict=UNKNOWN, reason="parse-error"
        )

    outcome = solve_with_deadline(problem, config)
    result = outcome.result
    if result.verdict == SAT:
        result.model.verify(problem.assertions)
    oracle = None
    if oracle_len is not None and result.verdict == UNSAT:
        oracle = cross_check(problem, oracle_len)
    elapsed = int((time.monotonic() - started) * 1000)
    logger.info(f"{path}: {result.verdict} in {elapsed} ms")
    return BenchRow(
        file=str(path),
        track=track,
        verdict=result.verdict,
        time_ms=elapsed,
        nodes=outcome.statistics.nodes_created,
        reason=result.reason,
        oracle=oracle,
    )


@dataclass(frozen=True)
class TrackSummary:
    track: str
    files: int
    sat: int
    unsat: int
    unknown: int
    time_ms: int

    @property
    def solved(self):
        return self.sat + self.unsat


@dataclass(frozen=True)
class BenchReport:
    rows: Tuple[BenchRow, ...] = ()

    @property
    def contradictions(self):
        return [row for row in self.rows if row.oracle == "contradicted"]

    def tracks(self):
        grouped = collections.defaultdict(list)
        for row in self.rows:
            grouped[row.track].append(row)
        for track in sorted(grouped):
            rows = grouped[track]
            verdicts = collections.Counter(row.verdict for row in rows)
            yield TrackSummary(
                track,
                len(rows),
                verdicts[SAT],
                verdicts[UNSAT],
                verdicts[UNKNOWN],
                sum(row.time_ms for row in rows),
            )

    def table(self):
        yield (
            f"{'track':<20} {'files':>6} {'sat':>6} {'unsat':>6} "
            f"{'unknown':>8} {'solved':>7} {'time_ms':>9}"
        )
        for s in self.tracks():
            yield (
                f"{s.track:<20} {s.files:>6} {s.sat:>6} {s.unsat:>6} "
                f"{s.unknown:>8} {s.solved:>7} {s.time_ms:>9}"
            )

    def write_csv(self, handle):
        writer = csv.writer(handle)
        writer.writerow(CSV_FIELDS)
        for row in self.rows:
            writer.writerow([row.file, row.verdict, row.time_ms, row.nodes])


def run_bench(directory, config, jobs=1, oracle_len=None):
    paths = discover(directory)
    logger.info(f"Running {len(paths)} file(s) from {directory}")
    if not paths:
        return BenchReport()
    run = functools.partial(run_file, config=config, oracle_len=oracle_len)
    pool = ThreadPool(processes=jobs)
    try:
        rows = pool.map(run, paths)
    finally:
        pool.close()
    return BenchReport(tuple(rows))
