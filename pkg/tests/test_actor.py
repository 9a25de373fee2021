import time
import unittest
from unittest import mock

from nielsen_strings.actor import SolverActor, solve_with_deadline
from nielsen_strings.graph import SAT, UNKNOWN, Result
from nielsen_strings.smtlib import parse_file

from tests import path_to_fixture, settings


def problem():
    return parse_file(path_to_fixture("regressions/track01/xx_yb.smt2"))


class SolverActorTest(unittest.TestCase):
    def test_solve_in_actor(self):
        ref = SolverActor.start(settings())
        try:
            outcome = ref.proxy().solve(problem(), keep_graph=True).get()
        finally:
            ref.stop()

        assert outcome.result.verdict == SAT
        assert outcome.statistics.nodes_created >= 1
        assert outcome.graph is not None

    def test_graph_is_dropped_by_default(self):
        outcome = solve_with_deadline(problem(), settings())

        assert outcome.result.verdict == SAT
        assert outcome.graph is None
        assert ("prefix-run", 1) in outcome.statistics.rules


class DeadlineTest(unittest.TestCase):
    @mock.patch("nielsen_strings.actor.GRACE", 0)
    @mock.patch("nielsen_strings.actor.NielsenGraph")
    def test_unresponsive_search(self, graph_class):
        def slow_solve():
            time.sleep(1.5)
            return Result(SAT)

        graph_class.return_value.solve.side_effect = slow_solve

        with self.assertLogs("nielsen_strings.actor", level="WARNING"):
            outcome = solve_with_deadline(problem(), settings(timeout=1))

        assert outcome.result.verdict == UNKNOWN
        assert outcome.result.reason == "timeout"
        assert outcome.statistics.reason == "timeout"


class DaemonThreadTest(unittest.TestCase):
    def test_actor_does_not_keep_the_process_alive(self):
        assert SolverActor.use_daemon_thread is True
