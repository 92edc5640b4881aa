"""Experiment orchestration: sweeps, stability verdicts, config files and CSV."""
from .configfile import ExperimentConfig, dump_config, load_config, parse_config
from .csvio import emit_csv, read_csv, render_csv
from .stability import QUEUE_CAP, SLOPE_TOL, StabilityVerdict, detect_stability
from .sweep import PolicySpec, SweepResult, derive_seed, load_grid, parse_policies, sweep

__all__ = [
    "ExperimentConfig", "dump_config", "load_config", "parse_config", "emit_csv", "read_csv", "render_csv",
    "QUEUE_CAP", "SLOPE_TOL", "StabilityVerdict", "detect_stability", "PolicySpec", "SweepResult",
    "derive_seed", "load_grid", "parse_policies", "sweep",
]
