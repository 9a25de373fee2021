import io
import os
import tempfile
import unittest
from unittest import mock

from nielsen_strings.__main__ import (
    EXIT_INPUT,
    EXIT_INTERNAL,
    EXIT_VERDICT,
    build_parser,
    main,
)

from tests import path_to_fixture

XX_YB = str(path_to_fixture("regressions/track01/xx_yb.smt2"))
XAY_YBX = str(path_to_fixture("regressions/track01/xay_ybx.smt2"))


class CliTest(unittest.TestCase):
    def run_main(self, *argv):
        out = io.StringIO()
        code = main(list(argv), out=out)
        return code, out.getvalue().splitlines()

    def test_solve_prints_model_when_asked_for(self):
        code, lines = self.run_main("solve", XX_YB)

        assert code == EXIT_VERDICT
        assert lines == [
            "sat",
            "(",
            '  (define-fun x () String "b")',
            '  (define-fun y () String "b")',
            ")",
        ]

    def test_ablation_flags(self):
        args = build_parser().parse_args(
            ["solve", XAY_YBX, "--no-parikh", "--no-look-ahead"]
        )

        assert args.parikh is False
        assert args.look_ahead is False
        assert args.dedup is None
        assert args.power_introduction is None

    def test_solve_without_parikh_filter(self):
        code, lines = self.run_main(
            "solve", XAY_YBX, "--no-parikh", "--stats", "--timeout", "2"
        )

        assert code == EXIT_VERDICT
        assert lines[0] != "sat"
        assert "parikh-refutations: 0" in lines

    def test_solve_unsat_with_stats(self):
        code, lines = self.run_main("solve", XAY_YBX, "--stats")

        assert code == EXIT_VERDICT
        assert lines[0] == "unsat"
        assert "nodes-expanded: 0" in lines
        assert "parikh-refutations: 1" in lines

    def test_model_flag(self):
        code, lines = self.run_main(
            "solve", str(path_to_fixture("empty.smt2")), "--model"
        )

        assert lines == ["sat", "(", '  (define-fun x () String "")', ")"]

    def test_dump_dot(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "graph.dot")

            code, _ = self.run_main("solve", XX_YB, "--dump-dot", path)

            with open(path, encoding="utf-8") as handle:
                assert handle.readline() == "digraph nielsen {\n"
        assert code == EXIT_VERDICT

    def test_parse_error(self):
        code, lines = self.run_main(
            "solve", str(path_to_fixture("malformed.smt2"))
        )

        assert code == EXIT_INPUT
        assert lines == []

    def test_missing_file(self):
        code, _ = self.run_main("solve", "/nonexistent/file.smt2")

        assert code == EXIT_INPUT

    def test_bad_setting(self):
        code, _ = self.run_main("solve", XX_YB, "--max-depth", "0")

        assert code == EXIT_INPUT

    def test_missing_settings_file(self):
        code, _ = self.run_main("solve", XX_YB, "--config", "/nonexistent")

        assert code == EXIT_INPUT

    def test_internal_error(self):
        with mock.patch(
            "nielsen_strings.__main__.solve_with_deadline",
            side_effect=RuntimeError("boom"),
        ):
            code, _ = self.run_main("solve", XX_YB)

        assert code == EXIT_INTERNAL

    def test_bench_writes_csv(self):
        directory = str(path_to_fixture("regressions/track01"))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "out.csv")

            code, lines = self.run_main(
                "bench", directory, "--csv", path, "--timeout", "5"
            )

            with open(path, encoding="utf-8") as handle:
                rows = handle.read().splitlines()
        assert code == EXIT_VERDICT
        assert rows[0] == "file,verdict,time_ms,nodes"
        assert len(rows) == 5
        assert lines[-1].split()[:4] == ["track01", "4", "1", "3"]

    def test_oracle(self):
        code, lines = self.run_main("oracle", XAY_YBX, "--max-len", "2")

        assert code == EXIT_VERDICT
        assert lines == ["unsat (length <= 2)"]

    def test_oracle_is_not_listed(self):
        assert "oracle" not in build_parser().format_help()
