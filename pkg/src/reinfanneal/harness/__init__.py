"""Configuration, seeded sweeps, figure presets and CSV output."""

from reinfanneal.harness.config import ConfigError, LearnSpec, SweepSpec, load_config, parse_config
from reinfanneal.harness.presets import FIGURE_IDS, reproduce
from reinfanneal.harness.records import RUN_FIELDS, SCHEMA_VERSION, SchemaError, read_csv, write_csv
from reinfanneal.harness.summarize import summarize
from reinfanneal.harness.sweep import run_sweep, write_outputs

__all__ = [
    "ConfigError", "LearnSpec", "SweepSpec", "load_config", "parse_config", "FIGURE_IDS", "reproduce",
    "RUN_FIELDS", "SCHEMA_VERSION", "SchemaError", "read_csv", "write_csv", "summarize", "run_sweep",
    "write_outputs",
]
