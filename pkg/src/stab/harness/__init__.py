from .config import (ANSATZ_CHOICES, KEYS, ConfigError, ExperimentConfig, apply_env, defaults,
                     load_config, parse_config)
from .experiments import CONVERGENCE, EXPERIMENTS, convergence_study, run_experiment
from .report import SCHEMA_VERSION, ReportDoc, read_report, write_report

__all__ = [
    "ANSATZ_CHOICES", "KEYS", "ConfigError", "ExperimentConfig", "apply_env", "defaults",
    "load_config", "parse_config",
    "CONVERGENCE", "EXPERIMENTS", "convergence_study", "run_experiment",
    "SCHEMA_VERSION", "ReportDoc", "read_report", "write_report",
]
