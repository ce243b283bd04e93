"""Run configuration, metrics and CSV output for the benchmark problems."""

from ..config import RunConfig
from .metrics import MetricsRow, convergence_order, l1_error, l1_norm
from .suite import gains, read_errors, run_one, run_suite

__all__ = [
    "MetricsRow",
    "RunConfig",
    "convergence_order",
    "gains",
    "l1_error",
    "l1_norm",
    "read_errors",
    "run_one",
    "run_suite",
]
