"""Small-step and big-step interpreter for UI traces.

The interpreter talks to the app only through :class:`Oracle`.  Background
work is drained deterministically by ``settle()``, which the driver calls
before every sequencing step, every property check and at the end of a
trace, so an applied event is always followed by a settle point.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Protocol, Union

from .trace import (
    SILENT, Assert, Block, Crash, CrashReport, Device, Fail, Prop, Seq, Succ,
    Then, Trace, Try, Unit, UNIT, UiEvent, is_concrete, substitute_wildcard,
)

__all__ = [
    "Oracle", "DriverConfig", "RunResult", "Continue", "Done",
    "StepBudgetExceeded", "RULES", "step", "run",
]

RULES = (
    "Enabled", "Block-1", "Inferred", "Block-2",
    "Seq-1", "Seq-2", "Seq-3",
    "Assert-Pass", "Assert-Fail",
    "Try-1", "Try-2", "Try-3",
    "Qualified", "Unqualified", "No-Op", "Crash",
    "Trans", "End",
)

SUSPENDING = (Device.ClickHome, Device.ClickMenu, Device.Settings)


class StepBudgetExceeded(RuntimeError):
    """The run (or one settle) did not finish within its budget."""


class Oracle(Protocol):
    """What a backend must provide for the driver to run traces on it.

    ``try_apply`` only ever sees concrete events.  Once ``settle`` has
    reported a crash it must keep reporting the same crash.
    """

    def try_apply(self, event: UiEvent) -> bool: ...

    def settle(self, budget: int) -> CrashReport | None: ...

    def holds(self, prop: Prop) -> bool: ...

    def enumerate_candidates(self, event: UiEvent) -> list: ...

    def ensure_foreground(self) -> bool: ...


@dataclass(frozen=True)
class DriverConfig:
    max_steps: int = 10_000
    rng_seed: int = 0
    mutate_budget: int = 1_000
    log_calls: bool = False

    def __post_init__(self) -> None:
        if self.max_steps <= 0 or self.mutate_budget <= 0:
            raise ValueError("max_steps and mutate_budget must be positive")


@dataclass(frozen=True)
class Continue:
    trace: Trace
    executed: object


@dataclass(frozen=True)
class Done:
    outcome: object
    executed: object


Step = Union[Continue, Done]


@dataclass
class RunResult:
    outcome: object
    exec: tuple
    steps: int
    rules: Counter = field(default_factory=Counter, compare=False)
    calls: list | None = field(default=None, compare=False)

    @property
    def events_attempted(self) -> int:
        """UI events the driver tried to apply, blocked ones included."""
        return sum(self.rules[r] for r in ("Enabled", "Block-1", "Inferred", "Block-2"))


class _Logged:
    """Oracle wrapper recording every call and its result."""

    def __init__(self, inner: Oracle) -> None:
        self.inner = inner
        self.calls: list = []

    def __getattr__(self, name):
        method = getattr(self.inner, name)

        def call(*args):
            result = method(*args)
            self.calls.append((name, args, result))
            return result

        return call


def _fire(fired: Counter | None, rule: str) -> None:
    if fired is not None:
        fired[rule] += 1


def _apply(event: UiEvent, oracle: Oracle) -> bool:
    if not oracle.try_apply(event):
        return False
    if event in SUSPENDING:
        oracle.ensure_foreground()
    return True


def step(t: Trace, oracle: Oracle, rng: random.Random, *,
         budget: int = 1_000, fired: Counter | None = None) -> Step:
    """Take one transition from ``t``; ``fired`` collects the rule names used."""
    if isinstance(t, Unit):
        report = oracle.settle(budget)
        if report is not None:
            _fire(fired, "Crash")
            return Done(Crash(report), SILENT)
        _fire(fired, "No-Op")
        return Done(Succ(), SILENT)

    if isinstance(t, Seq):
        if isinstance(t.first, Unit):
            report = oracle.settle(budget)
            if report is not None:
                _fire(fired, "Crash")
                return Done(Crash(report), SILENT)
            _fire(fired, "Seq-2")
            return Continue(t.rest, SILENT)
        inner = step(t.first, oracle, rng, budget=budget, fired=fired)
        if isinstance(inner, Continue):
            _fire(fired, "Seq-1")
            return Continue(Seq(inner.trace, t.rest), inner.executed)
        # a non-unit prefix never finishes with succ
        assert not isinstance(inner.outcome, Succ)
        _fire(fired, "Seq-3")
        return inner

    if isinstance(t, Assert):
        report = oracle.settle(budget)
        if report is not None:
            _fire(fired, "Crash")
            return Done(Crash(report), SILENT)
        if oracle.holds(t.prop):
            _fire(fired, "Assert-Pass")
            return Continue(UNIT, SILENT)
        _fire(fired, "Assert-Fail")
        return Done(Fail(t.prop), SILENT)

    if isinstance(t, Try):
        inner = step(t.body, oracle, rng, budget=budget, fired=fired)
        if isinstance(inner, Continue):
            _fire(fired, "Try-1")
            return Continue(Try(inner.trace), inner.executed)
        if isinstance(inner.outcome, (Succ, Block)):
            _fire(fired, "Try-2")
            return Continue(UNIT, inner.executed)
        _fire(fired, "Try-3")
        return inner

    if isinstance(t, Then):
        report = oracle.settle(budget)
        if report is not None:
            _fire(fired, "Crash")
            return Done(Crash(report), SILENT)
        if oracle.holds(t.prop):
            _fire(fired, "Qualified")
            return Continue(t.body, SILENT)
        _fire(fired, "Unqualified")
        return Continue(UNIT, SILENT)

    # a single UI event
    if is_concrete(t):
        if _apply(t, oracle):
            _fire(fired, "Enabled")
            return Continue(UNIT, t)
        _fire(fired, "Block-1")
        return Done(Block(t), SILENT)

    candidates = list(oracle.enumerate_candidates(t))
    rng.shuffle(candidates)
    for ident in candidates:
        concrete = substitute_wildcard(t, ident)
        if _apply(concrete, oracle):
            _fire(fired, "Inferred")
            return Continue(UNIT, concrete)
    _fire(fired, "Block-2")
    return Done(Block(t), SILENT)


def run(t: Trace, oracle: Oracle, cfg: DriverConfig = DriverConfig()) -> RunResult:
    """Step ``t`` to an outcome, collecting the executed events in order."""
    logged = _Logged(oracle) if cfg.log_calls else None
    target = logged if logged is not None else oracle
    rng = random.Random(cfg.rng_seed)
    fired: Counter = Counter()
    executed = []
    steps = 0
    try:
        while True:
            if steps >= cfg.max_steps:
                raise StepBudgetExceeded(f"no outcome after {cfg.max_steps} steps")
            result = step(t, target, rng, budget=cfg.mutate_budget, fired=fired)
            steps += 1
            executed.append(result.executed)
            if isinstance(result, Done):
                fired["End"] += 1
                return RunResult(result.outcome, tuple(executed), steps, fired,
                                 logged.calls if logged is not None else None)
            fired["Trans"] += 1
            t = result.trace
    except Exception as exc:
        # keep what ran so far for whoever reports the failure
        exc.partial_exec = tuple(executed)
        exc.partial_steps = steps
        raise
