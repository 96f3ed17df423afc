"""Property-based test generation for UI-event-driven apps.

Traces script interactions, generators denote sets of traces, a driver
runs traces against an oracle, and a simulated device supplies one.
"""

from .combinators import (
    gorilla, interruptible_seq, monkey, optional, preserves, relevant_monkey,
)
from .coordinator import (
    ResetPolicy, RunReport, SuiteConfig, SuiteSummary, render_report, replay, run_suite,
)
from .denote import TooLarge, Unbounded, denotes, enumerate_traces
from .driver import DriverConfig, RunResult, StepBudgetExceeded, run, step
from .gen import sample, split_seed
from .sim import DeviceState, load_fixture, load_model
from .trace import normalize, render

__version__ = "0.1.0"

__all__ = [
    "gorilla", "interruptible_seq", "monkey", "optional", "preserves", "relevant_monkey",
    "ResetPolicy", "RunReport", "SuiteConfig", "SuiteSummary", "render_report", "replay",
    "run_suite", "TooLarge", "Unbounded", "denotes", "enumerate_traces",
    "DriverConfig", "RunResult", "StepBudgetExceeded", "run", "step",
    "sample", "split_seed", "DeviceState", "load_fixture", "load_model",
    "normalize", "render",
]
