"""Configuration, Monte Carlo driver, exact oracles, reports and CLI."""

from .config import SimConfig, load_config, parse_config
from .enumerate import ExactDetection, enumerate_detection
from .simulate import Metrics, Report, run_simulation, sweep
from .verify import verify_algebra

__all__ = [
    "SimConfig",
    "load_config",
    "parse_config",
    "ExactDetection",
    "enumerate_detection",
    "Metrics",
    "Report",
    "run_simulation",
    "sweep",
    "verify_algebra",
]
