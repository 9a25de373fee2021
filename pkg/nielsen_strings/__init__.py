import configparser
import pathlib

import pkg_resources

from mopidy import config

from nielsen_strings.errors import SettingsError

__version__ = pkg_resources.get_distribution("Nielsen-Strings").version

STRATEGIES = ("iterdeep", "bfs")

MAX_PROBE_BOUND = 1024


class SolverSettings:
    """The ``[nielsen]`` settings section: defaults, schema and loading."""

    dist_name = "Nielsen-Strings"
    ext_name = "nielsen"
    version = __version__

    def get_default_config(self):
        return config.read(pathlib.Path(__file__).parent / "ext.conf")

    def get_config_schema(self):
        schema = config.ConfigSchema(self.ext_name)
        schema["timeout"] = config.Integer(minimum=1)
        schema["max_depth"] = config.Integer(minimum=1)
        schema["max_nodes"] = config.Integer(minimum=1)
        schema["probe_bound"] = config.Integer(
            minimum=0, maximum=MAX_PROBE_BOUND
        )
        schema["max_pattern_len"] = config.Integer(minimum=1)
        schema["max_chain_length"] = config.Integer(minimum=0)
        schema["dedup"] = config.Boolean()
        schema["strategy"] = config.String(choices=STRATEGIES)
        schema["seed"] = config.Integer(minimum=0)
        schema["look_ahead"] = config.Boolean()
        schema["decompose"] = config.Boolean()
        schema["power_introduction"] = config.Boolean()
        schema["parikh"] = config.Boolean()
        return schema

    def validate_config(self, config):
        settings = config[self.ext_name]
        if settings["power_introduction"] and not settings["max_chain_length"]:
            raise SettingsError(
                "nielsen/max_chain_length: must be positive while "
                "power_introduction is enabled"
            )

    def load(self, path=None, overrides=None):
        """Defaults, then the INI file at ``path``, then ``overrides``.

        Returns ``{"nielsen": {...}}`` with deserialized values.
        """
        parser = configparser.RawConfigParser()
        parser.read_string(self.get_default_config())
        if path is not None:
            path = pathlib.Path(path)
            if not path.is_file():
                raise SettingsError(f"Settings file {path} not found")
            try:
                parser.read(path, encoding="utf-8")
            except configparser.Error as exc:
                raise SettingsError(f"{path}: {exc}") from exc

        values = dict(parser.items(self.ext_name))
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if isinstance(value, bool):
                value = "true" if value else "false"
            values[key] = str(value)

        result, errors = self.get_config_schema().deserialize(values)
        if errors:
            key, message = next(iter(errors.items()))
            raise SettingsError(f"{self.ext_name}/{key}: {message}")

        settings = {self.ext_name: result}
        self.validate_config(settings)
        return settings


def default_settings(**overrides):
    return SolverSettings().load(overrides=overrides)
