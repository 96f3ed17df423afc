"""Trace generators and seeded sampling.

A :class:`Gen` denotes a set of traces.  :func:`sample` draws one member
using a seeded ``random.Random``; choices are fair coin flips and
``RepeatG(n, g)`` picks its count uniformly from ``1..n``.

Argument generators (:class:`Const`, :class:`OneOf`, :class:`Choose`,
:class:`AlphaStr`, :class:`Pair`, :class:`Wild`) fill event arguments.
Plain values are accepted wherever an argument generator is expected and
are wrapped in :class:`Const`.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from typing import Any, Iterable, Union

from .trace import (
    UNIT, WILDCARD, Assert, Click, Device, LongClick, Num, Pinch, Prop, Seq,
    Skip, Sleep, Swipe, Text, Then, Trace, Try, Type, Wildcard, Xy, seq,
)

__all__ = [
    "ArgGen", "Const", "OneOf", "Choose", "AlphaStr", "Pair", "Wild", "Rect",
    "Unbounded",
    "Gen", "ClickG", "LongClickG", "TypeG", "SwipeG", "PinchG", "SleepG", "SkipG",
    "DeviceG", "SeqG", "ChoiceG", "TryG", "ThenG", "RepeatG", "AssertG", "UnitG",
    "SampleCfg", "sample", "split_seed", "choice", "sequence",
]

ENUM_WIDTH = 16
_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class Unbounded(ValueError):
    """The generator has an argument domain too large to list."""


# --- argument generators ---------------------------------------------------


class ArgGen:
    def draw(self, rng: random.Random) -> Any:
        raise NotImplementedError

    def contains(self, value: Any) -> bool:
        raise NotImplementedError

    def values(self) -> list:
        """Every value, in a fixed order; raises :class:`Unbounded` if too many."""
        raise NotImplementedError


@dataclass(frozen=True)
class Const(ArgGen):
    value: Any

    def draw(self, rng):
        return self.value

    def contains(self, value):
        return value == self.value

    def values(self):
        return [self.value]


@dataclass(frozen=True)
class OneOf(ArgGen):
    options: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "options", tuple(self.options))
        if not self.options:
            raise ValueError("oneOf needs at least one option")

    def draw(self, rng):
        return self.options[rng.randrange(len(self.options))]

    def contains(self, value):
        return value in self.options

    def values(self):
        return list(dict.fromkeys(self.options))


@dataclass(frozen=True)
class Choose(ArgGen):
    """Integers from ``lo`` to ``hi`` inclusive."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty range choose({self.lo},{self.hi})")

    def draw(self, rng):
        return rng.randint(self.lo, self.hi)

    def contains(self, value):
        return isinstance(value, int) and not isinstance(value, bool) and self.lo <= value <= self.hi

    def values(self):
        if self.hi - self.lo + 1 > ENUM_WIDTH:
            raise Unbounded(f"choose({self.lo},{self.hi}) spans more than {ENUM_WIDTH} values")
        return list(range(self.lo, self.hi + 1))


@dataclass(frozen=True)
class AlphaStr(ArgGen):
    """Lowercase ASCII strings of length ``0..max_len``."""

    max_len: int = 8

    def __post_init__(self) -> None:
        if self.max_len < 0:
            raise ValueError("max_len must be >= 0")

    def draw(self, rng):
        n = rng.randint(0, self.max_len)
        return "".join(rng.choice(string.ascii_lowercase) for _ in range(n))

    def contains(self, value):
        return (isinstance(value, str) and len(value) <= self.max_len
                and all(c in string.ascii_lowercase for c in value))

    def values(self):
        raise Unbounded("alphaStr has too many values to list")


@dataclass(frozen=True)
class Pair(ArgGen):
    """Screen points or deltas built from two integer generators."""

    x: ArgGen
    y: ArgGen

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _arg(self.x))
        object.__setattr__(self, "y", _arg(self.y))

    def draw(self, rng):
        return Xy(self.x.draw(rng), self.y.draw(rng))

    def contains(self, value):
        return isinstance(value, Xy) and self.x.contains(value.x) and self.y.contains(value.y)

    def values(self):
        return [Xy(a, b) for a in self.x.values() for b in self.y.values()]


@dataclass(frozen=True)
class Wild(ArgGen):
    """The ``*`` widget id."""

    def draw(self, rng):
        return WILDCARD

    def contains(self, value):
        return isinstance(value, Wildcard)

    def values(self):
        return [WILDCARD]


def Rect(x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> Pair:
    return Pair(Choose(x_lo, x_hi), Choose(y_lo, y_hi))


def _arg(v) -> ArgGen:
    if isinstance(v, ArgGen):
        return v
    if isinstance(v, Wildcard):
        return Wild()
    return Const(v)


# --- trace generators -------------------------------------------------------


class Gen:
    """Base of the generator tree; ``a >> b`` sequences and ``a | b`` chooses."""

    def __rshift__(self, other: "Gen") -> "SeqG":
        return SeqG(self, other)

    def __or__(self, other: "Gen") -> "ChoiceG":
        return ChoiceG(self, other)


def _args(obj, *names: str) -> None:
    for n in names:
        object.__setattr__(obj, n, _arg(getattr(obj, n)))


@dataclass(frozen=True)
class ClickG(Gen):
    target: ArgGen

    def __post_init__(self) -> None:
        _args(self, "target")


@dataclass(frozen=True)
class LongClickG(Gen):
    target: ArgGen

    def __post_init__(self) -> None:
        _args(self, "target")


@dataclass(frozen=True)
class TypeG(Gen):
    target: ArgGen
    text: ArgGen

    def __post_init__(self) -> None:
        _args(self, "target", "text")


@dataclass(frozen=True)
class SwipeG(Gen):
    target: ArgGen
    delta: ArgGen

    def __post_init__(self) -> None:
        _args(self, "target", "delta")


@dataclass(frozen=True)
class PinchG(Gen):
    start: ArgGen
    end: ArgGen

    def __post_init__(self) -> None:
        _args(self, "start", "end")


@dataclass(frozen=True)
class SleepG(Gen):
    ms: ArgGen

    def __post_init__(self) -> None:
        _args(self, "ms")
        lowest = {Const: lambda a: [a.value], OneOf: lambda a: a.options,
                  Choose: lambda a: [a.lo]}.get(type(self.ms))
        if lowest is not None and min(lowest(self.ms)) < 0:
            raise ValueError("sleep durations must be >= 0")


@dataclass(frozen=True)
class SkipG(Gen):
    pass


@dataclass(frozen=True)
class DeviceG(Gen):
    event: Device


@dataclass(frozen=True)
class SeqG(Gen):
    first: Gen
    rest: Gen


@dataclass(frozen=True)
class ChoiceG(Gen):
    left: Gen
    right: Gen


@dataclass(frozen=True)
class TryG(Gen):
    body: Gen


@dataclass(frozen=True)
class ThenG(Gen):
    prop: Prop
    body: Gen


@dataclass(frozen=True)
class RepeatG(Gen):
    n: int
    body: Gen

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("repeat bound must be >= 1")


@dataclass(frozen=True)
class AssertG(Gen):
    prop: Prop


@dataclass(frozen=True)
class UnitG(Gen):
    pass


EventGen = Union[ClickG, LongClickG, TypeG, SwipeG, PinchG, SleepG]
EVENT_GENS = {ClickG: Click, LongClickG: LongClick, TypeG: Type, SwipeG: Swipe,
              PinchG: Pinch, SleepG: Sleep}


def choice(*gens: Gen) -> Gen:
    """Right-nested choice, so ``choice(a, b, c)`` is ``a | (b | c)``."""
    if not gens:
        raise ValueError("choice of nothing")
    out = gens[-1]
    for g in reversed(gens[:-1]):
        out = ChoiceG(g, out)
    return out


def sequence(*gens: Gen) -> Gen:
    if not gens:
        return UnitG()
    out = gens[-1]
    for g in reversed(gens[:-1]):
        out = SeqG(g, out)
    return out


def event_args(g) -> list:
    """The argument generators of an event generator, in constructor order."""
    return [getattr(g, f) for f in g.__dataclass_fields__]


# --- sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class SampleCfg:
    rng_seed: int = 0


def split_seed(seed: int, index: int) -> int:
    """Seed for sample ``index`` of a suite (a splitmix64 step)."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def sample(g: Gen, cfg: SampleCfg | int | random.Random = 0) -> Trace:
    """Draw one trace from ``g``; a pure function of ``g`` and the seed."""
    if isinstance(cfg, random.Random):
        rng = cfg
    else:
        rng = random.Random(cfg.rng_seed if isinstance(cfg, SampleCfg) else cfg)
    return _sample(g, rng)


def _sample(g: Gen, rng: random.Random) -> Trace:
    ctor = EVENT_GENS.get(type(g))
    if ctor is not None:
        return ctor(*(a.draw(rng) for a in event_args(g)))
    if isinstance(g, SkipG):
        return Skip()
    if isinstance(g, DeviceG):
        return g.event
    if isinstance(g, UnitG):
        return UNIT
    if isinstance(g, AssertG):
        return Assert(g.prop)
    if isinstance(g, SeqG):
        first = _sample(g.first, rng)
        return Seq(first, _sample(g.rest, rng))
    if isinstance(g, ChoiceG):
        return _sample(g.left if rng.random() < 0.5 else g.right, rng)
    if isinstance(g, TryG):
        return Try(_sample(g.body, rng))
    if isinstance(g, ThenG):
        return Then(g.prop, _sample(g.body, rng))
    if isinstance(g, RepeatG):
        m = rng.randint(1, g.n)
        return seq([_sample(g.body, rng) for _ in range(m)])
    raise TypeError(f"not a generator: {g!r}")


def walk(g: Gen) -> Iterable[Gen]:
    """Every node of ``g``, parents before children."""
    stack = [g]
    while stack:
        node = stack.pop()
        yield node
        for child in ("first", "rest", "left", "right", "body"):
            sub = getattr(node, child, None)
            if isinstance(sub, Gen):
                stack.append(sub)


# convenience for building fixed ids in code
def ids(*values) -> OneOf:
    return OneOf(tuple(Num(v) if isinstance(v, int) else Text(v) if isinstance(v, str) else v
                       for v in values))
