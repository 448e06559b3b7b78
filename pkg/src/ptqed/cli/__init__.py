"""Command-line interface: configuration, experiments and result tables."""

from .config import ConfigError, RunConfig, dump_config, load_config, parse_config
from .table import ResultTable, emit

__all__ = ["ConfigError", "ResultTable", "RunConfig", "dump_config", "emit", "load_config", "parse_config"]
