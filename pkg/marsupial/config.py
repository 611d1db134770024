# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Layered YAML configuration.

The bundled ``defaults.yaml`` is always loaded first; every file given with
``-c/--config`` is merged on top of it, key by key inside each section.
"""

import logging
from dataclasses import fields
from importlib import resources

import yaml

from marsupial.baseline import RrtParams
from marsupial.errors import ConfigError
from marsupial.planner import PlannerParams
from marsupial.scenario import ScenarioSpec

logger = logging.getLogger("marsupial.config")

SECTIONS = ("planner", "rrt", "scenario", "benchmark", "export")
SUPPORTED_VERSIONS = (1.0,)

test_config_yaml = """
version: 1.0
planner:
  p: 4
  mode: taut
"""

test_config = yaml.safe_load(test_config_yaml)


def default_config_text():
    return resources.files("marsupial").joinpath("defaults.yaml").read_text(encoding="utf-8")


class ConfigDatabase(object):
    """
    Merged configuration sections.

    :param config_file:
        Optional user file merged over the bundled defaults.
    """

    def __init__(self, config_file=None):
        self._sections = {name: {} for name in SECTIONS}
        self._test_config = test_config
        self.add_config(yaml.safe_load(default_config_text()), "defaults.yaml")
        if config_file:
            self.add_config_file(config_file)

    def add_config_file(self, config_filename):
        """
        Parses a YAML file and merges it into the database.

        :param config_filename:
            The path to the configuration file.
        """
        try:
            with open(config_filename, "r") as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as ex:
            raise ConfigError("not valid YAML: %s" % ex, context=str(config_filename))
        except OSError as ex:
            raise ConfigError("cannot read file: %s" % ex.strerror, context=str(config_filename))
        self.add_config(config, config_filename)

    def add_config(self, config, config_filename):
        """
        Merges a configuration mapping.

        :param config:
            The configuration dictionary.
        :param config_filename:
            Name reported in errors.

        Usage:
            >>> db = ConfigDatabase()
            >>> db.add_config(db._test_config, 'test_config.yaml')
            >>> db.planner_params().p, db.planner_params().q, db.planner_params().mode
            (4, 30, 'taut')
            >>> db.add_config({'version': 1.0, 'planes': {}}, 'bad.yaml')
            Traceback (most recent call last):
                ...
            marsupial.errors.ConfigError: bad.yaml: unknown section(s): planes
        """
        config_filename = str(config_filename)
        if not isinstance(config, dict):
            raise ConfigError("configuration must be a mapping", context=config_filename)
        version = config.get("version")
        if version not in SUPPORTED_VERSIONS:
            raise ConfigError("unsupported configuration version %r" % (version,), context=config_filename)
        unknown = sorted(set(config) - set(SECTIONS) - {"version"})
        if unknown:
            raise ConfigError("unknown section(s): %s" % ", ".join(unknown), context=config_filename)
        for name in SECTIONS:
            values = config.get(name) or {}
            if not isinstance(values, dict):
                raise ConfigError("section %s must be a mapping" % name, context=config_filename)
            if self._sections[name]:
                extra = sorted(set(values) - set(self._sections[name]))
                if extra:
                    raise ConfigError("unknown key(s) in %s: %s" % (name, ", ".join(extra)),
                                      context=config_filename)
            self._sections[name].update(values)
        logger.debug("configuration merged from %s", config_filename)

    def section(self, name):
        try:
            return dict(self._sections[name])
        except KeyError:
            raise ConfigError("no configuration section %r" % (name,))

    def _build(self, cls, name, **overrides):
        values = self.section(name)
        values.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in fields(cls)}
        try:
            return cls(**{k: v for k, v in values.items() if k in known})
        except (TypeError, ValueError) as ex:
            raise ConfigError("invalid %s settings: %s" % (name, ex))

    def planner_params(self, **overrides) -> PlannerParams:
        return self._build(PlannerParams, "planner", **overrides)

    def rrt_params(self, **overrides) -> RrtParams:
        return self._build(RrtParams, "rrt", **overrides)

    def scenario_spec(self, seed=0, **overrides) -> ScenarioSpec:
        return self._build(ScenarioSpec, "scenario", seed=seed, **overrides)

    def dump(self):
        """YAML text of the merged configuration."""
        doc = {"version": SUPPORTED_VERSIONS[-1]}
        doc.update(self._sections)
        return yaml.safe_dump(doc, default_flow_style=False, sort_keys=False)
