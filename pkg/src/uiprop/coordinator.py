"""Running a sampled test suite against fresh simulated devices.

Each sample ``i`` gets its own seed, derived from the suite seed with
:func:`~uiprop.gen.split_seed`, which fixes both the sampled trace and the
driver's wildcard choices.  Reports come back ordered by index, so the
output does not depend on how many workers ran the suite.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import os
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from .driver import DriverConfig, RunResult, run
from .gen import Gen, sample, split_seed
from .sim import AppModel, DeviceState
from .trace import (
    SILENT, Assert, Block, Crash, CrashReport, Fail, Prop, Seq, Succ, Then, Trace,
    Try, atoms, is_concrete, render, render_exec, seq, to_data, from_data,
)

__all__ = [
    "ResetPolicy", "SuiteConfig", "RunReport", "SuiteSummary",
    "run_suite", "run_one", "render_report", "format_summary",
    "WildcardInReplay", "exec_to_trace", "reproduction", "replay", "summarize",
]


class ResetPolicy(enum.Enum):
    REINSTALL = "reinstall"
    KEEP = "keep"


@dataclass(frozen=True)
class SuiteConfig:
    samples: int = 100
    seed: int = 0
    pool_size: int = field(default_factory=lambda: os.cpu_count() or 1)
    reset_policy: ResetPolicy = ResetPolicy.REINSTALL
    property: Prop | None = None
    driver: DriverConfig = DriverConfig()

    def __post_init__(self) -> None:
        if self.samples < 1 or self.pool_size < 1:
            raise ValueError("samples and pool_size must be >= 1")
        object.__setattr__(self, "reset_policy", ResetPolicy(self.reset_policy))


@dataclass(frozen=True)
class RunReport:
    index: int
    sample_seed: int
    outcome: object
    exec: tuple
    steps: int
    trace: Trace
    events: int = 0

    def to_json(self) -> str:
        return json.dumps({
            "index": self.index, "sample_seed": self.sample_seed,
            "outcome": to_data(self.outcome), "exec": to_data(self.exec),
            "steps": self.steps, "events": self.events, "trace": to_data(self.trace),
        }, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "RunReport":
        d = json.loads(line)
        return cls(d["index"], d["sample_seed"], from_data(d["outcome"]),
                   tuple(from_data(d["exec"])), d["steps"], from_data(d["trace"]),
                   d.get("events", 0))


@dataclass(frozen=True)
class SuiteSummary:
    passed: int
    crashed: int
    failed: int
    blocked: int
    first_failure: RunReport | None = None

    @property
    def total(self) -> int:
        return self.passed + self.crashed + self.failed + self.blocked

    @property
    def ok(self) -> bool:
        return self.crashed == 0 and self.failed == 0


def _aborted(exc: Exception, device: DeviceState) -> CrashReport:
    frames = tuple(f"at {f.name} ({os.path.basename(f.filename)}:{f.lineno})"
                   for f in traceback.extract_tb(exc.__traceback__)[-4:])
    return CrashReport(f"{type(exc).__name__}: {exc}", device.screen,
                       frames or ("at run",), device.applied_events)


def run_one(index: int, g: Gen, model: AppModel, cfg: SuiteConfig,
            device: DeviceState | None = None) -> RunReport:
    """Sample and run test ``index`` of a suite."""
    seed = split_seed(cfg.seed, index)
    trace = sample(g, seed)
    script = trace if cfg.property is None else Seq(trace, Assert(cfg.property))
    device = device if device is not None else DeviceState(model)
    drv = dataclasses.replace(cfg.driver, rng_seed=seed)
    try:
        result = run(script, device, drv)
    except Exception as exc:  # reported, not raised: one bad run must not sink the suite
        return RunReport(index, seed, Crash(_aborted(exc, device)),
                         getattr(exc, "partial_exec", ()) or (SILENT,),
                         getattr(exc, "partial_steps", 0), trace)
    return RunReport(index, seed, result.outcome, result.exec, result.steps, trace,
                     result.events_attempted)


def run_suite(g: Gen, model: AppModel, cfg: SuiteConfig,
              only_index: int | None = None) -> tuple:
    """Run the suite; returns ``(SuiteSummary, [RunReport, ...])`` ordered by index."""
    indices = [only_index] if only_index is not None else list(range(cfg.samples))
    if cfg.reset_policy is ResetPolicy.KEEP:
        # one long-lived device per pool slot, running its indices in order
        slots: dict = {}
        for i in indices:
            slots.setdefault(i % cfg.pool_size, []).append(i)

        def work(batch):
            device = DeviceState(model)
            return [run_one(i, g, model, cfg, device) for i in batch]
        jobs = list(slots.values())
    else:
        def work(batch):
            return [run_one(i, g, model, cfg) for i in batch]
        jobs = [[i] for i in indices]

    if cfg.pool_size == 1 or len(jobs) == 1:
        done = [work(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.pool_size) as pool:
            done = list(pool.map(work, jobs))
    reports = sorted((r for batch in done for r in batch), key=lambda r: r.index)
    return summarize(reports), reports


def summarize(reports) -> SuiteSummary:
    counts = {Succ: 0, Crash: 0, Fail: 0, Block: 0}
    first = None
    for r in reports:
        counts[type(r.outcome)] += 1
        if first is None and isinstance(r.outcome, (Crash, Fail)):
            first = r
    return SuiteSummary(counts[Succ], counts[Crash], counts[Fail], counts[Block], first)


def render_report(r, names: Mapping[int, str] | None = None) -> str:
    """Human-readable report for a :class:`RunReport` or a driver ``RunResult``."""
    after = render_exec(r.exec, names)
    o = r.outcome
    if isinstance(o, Crash):
        frames = "\n".join(o.report.frames)
        return f"Crashed after: {after}\nStack trace: {o.report.message}\n{frames}"
    if isinstance(o, Fail):
        return f"Failed assert {render(o.prop, names)} after: {after}"
    if isinstance(o, Block):
        return f"Blocked after: {after}"
    return f"OK after: {after}"


def format_summary(s: SuiteSummary) -> str:
    return (f"passed={s.passed} crashed={s.crashed} failed={s.failed} "
            f"blocked={s.blocked} total={s.total}")


# --- replay -----------------------------------------------------------------


class WildcardInReplay(ValueError):
    """A replayed trace still contains ``*``."""


def exec_to_trace(exec_trace) -> Trace:
    return seq([o for o in exec_trace if o is not SILENT])


def reproduction(r) -> Trace:
    """Concrete trace that re-creates a report's outcome on a fresh device.

    The executed events, plus the failed assertion for a failure or the
    event that could not be applied for a block.
    """
    parts = [o for o in r.exec if o is not SILENT]
    if isinstance(r.outcome, Fail):
        parts.append(Assert(r.outcome.prop))
    elif isinstance(r.outcome, Block):
        parts.append(r.outcome.event)
    return seq(parts)


def replay(t, model: AppModel, cfg: DriverConfig = DriverConfig(), *,
           allow_wildcards: bool = False) -> RunResult:
    """Run a concrete trace (or an executed trace) once on a fresh device."""
    if isinstance(t, (list, tuple)):
        t = exec_to_trace(t)
    stack = [] if allow_wildcards else [t]
    while stack:
        node = stack.pop()
        for a in atoms(node):
            if isinstance(a, (Try, Then)):
                stack.append(a.body)
            elif not isinstance(a, Assert) and not is_concrete(a):
                raise WildcardInReplay(f"{render(a)} has a wildcard")
    return run(t, DeviceState(model), cfg)
