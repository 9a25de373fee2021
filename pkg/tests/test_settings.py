import os
import tempfile
import unittest

from nielsen_strings import SolverSettings, default_settings
from nielsen_strings.errors import SettingsError


class SolverSettingsTest(unittest.TestCase):
    def test_get_default_config(self):
        config = SolverSettings().get_default_config()

        assert "[nielsen]" in config
        assert "timeout = 10" in config
        assert "strategy = iterdeep" in config

    def test_get_config_schema(self):
        schema = SolverSettings().get_config_schema()

        assert "max_depth" in schema
        assert "probe_bound" in schema
        assert "parikh" in schema

    def test_defaults(self):
        settings = default_settings()["nielsen"]

        assert settings["timeout"] == 10
        assert settings["max_depth"] == 64
        assert settings["max_nodes"] == 100000
        assert settings["dedup"] is True
        assert settings["strategy"] == "iterdeep"

    def test_overrides(self):
        settings = default_settings(
            timeout=3, dedup=False, strategy="bfs", seed=None
        )["nielsen"]

        assert settings["timeout"] == 3
        assert settings["dedup"] is False
        assert settings["strategy"] == "bfs"
        assert settings["seed"] == 0

    def test_bad_value(self):
        with self.assertRaises(SettingsError) as context:
            default_settings(max_depth=0)

        assert context.exception.message.startswith("nielsen/max_depth: ")

    def test_bad_choice(self):
        with self.assertRaises(SettingsError):
            default_settings(strategy="dfs")

    def test_chain_length_needed_for_powers(self):
        with self.assertRaises(SettingsError):
            default_settings(max_chain_length=0)

        settings = default_settings(
            max_chain_length=0, power_introduction=False
        )
        assert settings["nielsen"]["max_chain_length"] == 0


class SettingsFileTest(unittest.TestCase):
    def setUp(self):
        handle, self.path = tempfile.mkstemp(suffix=".ini")
        os.close(handle)

    def tearDown(self):
        os.remove(self.path)

    def write(self, text):
        with open(self.path, "w", encoding="utf-8") as handle:
            handle.write(text)

    def test_file_then_overrides(self):
        self.write("[nielsen]\ntimeout = 7\nmax_nodes = 50\n")

        settings = SolverSettings().load(self.path, {"max_nodes": 20})

        assert settings["nielsen"]["timeout"] == 7
        assert settings["nielsen"]["max_nodes"] == 20

    def test_missing_file(self):
        with self.assertRaises(SettingsError) as context:
            SolverSettings().load(self.path + ".missing")

        assert "not found" in context.exception.message

    def test_malformed_file(self):
        self.write("timeout = 7\n")

        with self.assertRaises(SettingsError):
            SolverSettings().load(self.path)
