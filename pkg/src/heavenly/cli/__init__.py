"""Configuration, verification suites, numeric oracle and reporting."""

from .config import ConfigError, RunConfig, load_config, parse_config
from .oracle import ConditioningWarning, numeric_ricci_oracle
from .report import Report, emit_report, run_suites

__all__ = [
    "ConditioningWarning",
    "ConfigError",
    "Report",
    "RunConfig",
    "emit_report",
    "load_config",
    "numeric_ricci_oracle",
    "parse_config",
    "run_suites",
]
