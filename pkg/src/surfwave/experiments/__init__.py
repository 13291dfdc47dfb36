"""Config-driven gel-thickness by frequency study."""

from .config import ConfigError, SweepConfig, load_config
from .outputs import emit_outputs, read_sweep_csv
from .sweep import ComparisonReport, LevelComparison, SweepResult, SweepRow, compare_levels, run_sweep

__all__ = [
    "ComparisonReport", "ConfigError", "LevelComparison", "SweepConfig", "SweepResult", "SweepRow",
    "compare_levels", "emit_outputs", "load_config", "read_sweep_csv", "run_sweep",
]
