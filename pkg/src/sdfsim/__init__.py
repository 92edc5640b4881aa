"""Queue-aware probing and Max-Weight scheduling on a wireless downlink.

Simulates three CSI acquisition policies (free oracle, full probing, and
selective dynamic feedback), the closed-form expansion results for the
selective policy, and a sweep harness for empirical stability frontiers.
"""
from .engine import TimeSeries, run
from .model import (ConfigError, SystemConfig, ValidatedConfig, discrete_config, jakes_config,
                    validate_config)

__version__ = "0.1.0"

__all__ = ["ConfigError", "SystemConfig", "ValidatedConfig", "TimeSeries", "discrete_config", "jakes_config",
           "run", "validate_config", "__version__"]
