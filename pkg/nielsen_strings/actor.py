import logging
import threading
import time
from dataclasses import dataclass
from typing import Optional

import pykka

from nielsen_strings.graph import UNKNOWN, NielsenGraph, Result
from nielsen_strings.models import Statistics

logger = logging.getLogger(__name__)

#: Seconds a caller waits beyond the search deadline before giving up.
GRACE = 2.0


@dataclass(frozen=True)
class SolveOutcome:
    result: Result
    statistics: Statistics
    graph: Optional[NielsenGraph] = None


class SolverActor(pykka.ThreadingActor):
    """Runs one search at a time; ``cancelled`` stops it from outside."""

    use_daemon_thread = True

    def __init__(self, config, cancelled=None):
        super().__init__()
        self.config = config
        self.cancelled = cancelled or threading.Event()

    def on_start(self):
        logger.debug(f"{self.actor_urn} ready")

    def solve(self, problem, keep_graph=False):
        graph = NielsenGraph(
            problem.assertions, self.config, cancelled=self.cancelled
        )
        result = graph.solve()
        statistics = Statistics.from_counter(graph.stats, result.reason)
        return SolveOutcome(result, statistics, graph if keep_graph else None)


def solve_with_deadline(problem, config, keep_graph=False):
    """Solve ``problem`` in a fresh actor, waiting at most the configured
    timeout plus ``GRACE`` seconds."""
    timeout = config["nielsen"]["timeout"]
    cancelled = threading.Event()
    ref = SolverActor.start(config, cancelled)
    started = time.monotonic()
    try:
        future = ref.proxy().solve(problem, keep_graph)
        return future.get(timeout=timeout + GRACE)
    except pykka.Timeout:
        cancelled.set()
        elapsed = int((time.monotonic() - started) * 1000)
        logger.warning(f"{problem.source}: no answer after {elapsed} ms")
        statistics = Statistics(wall_time_ms=elapsed, reason="timeout")
        return SolveOutcome(Result(UNKNOWN, reason="timeout"), statistics)
    finally:
        ref.stop(block=False)
