"""UI traces, properties, executed traces and run outcomes.

Events double as trace atoms: ``Click(Num(3))`` is both a UI event and the
one-event trace that performs it.  Sequencing is right-associative and
``Unit`` is its identity, which :func:`normalize` uses to pick a canonical
shape for comparisons.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, fields, is_dataclass
from typing import Any, Iterator, Mapping, Sequence, Union

__all__ = [
    "Num", "Text", "Xy", "Named", "Wildcard", "WILDCARD",
    "Click", "LongClick", "Swipe", "Type", "Pinch", "Sleep", "Skip", "Device",
    "Pred", "Not", "Implies", "And", "Or",
    "Seq", "Assert", "Try", "Then", "Unit", "UNIT",
    "SILENT", "Succ", "Crash", "Fail", "Block", "CrashReport",
    "NoWildcard", "is_concrete", "substitute_wildcard", "normalize", "atoms",
    "seq", "render", "render_exec", "to_data", "from_data",
]


# --- identifiers -----------------------------------------------------------


@dataclass(frozen=True)
class Num:
    """Numeric widget id (the analog of an ``R.id`` constant)."""

    n: int


@dataclass(frozen=True)
class Text:
    """Widget addressed by its exact display text."""

    s: str


@dataclass(frozen=True)
class Xy:
    """A screen point, or a displacement when used as a swipe delta."""

    x: int
    y: int


@dataclass(frozen=True)
class Named:
    """Symbolic widget name (``#name``) not yet resolved against a model."""

    name: str


@dataclass(frozen=True)
class Wildcard:
    """The ``*`` id, filled in from the view hierarchy at run time."""


WILDCARD = Wildcard()

UiId = Union[Num, Text, Xy, Named]
IdSpec = Union[Num, Text, Xy, Named, Wildcard]


def _check_target(target: Any) -> None:
    if not isinstance(target, (Num, Text, Xy, Named, Wildcard)):
        raise TypeError(f"not a widget id: {target!r}")
    if isinstance(target, Xy) and (target.x < 0 or target.y < 0):
        raise ValueError(f"screen coordinates must be non-negative: {target!r}")


# --- events ----------------------------------------------------------------


@dataclass(frozen=True)
class Click:
    target: IdSpec

    def __post_init__(self) -> None:
        _check_target(self.target)


@dataclass(frozen=True)
class LongClick:
    target: IdSpec

    def __post_init__(self) -> None:
        _check_target(self.target)


@dataclass(frozen=True)
class Swipe:
    target: IdSpec
    delta: Xy

    def __post_init__(self) -> None:
        _check_target(self.target)
        if not isinstance(self.delta, Xy):
            raise TypeError("swipe delta must be an Xy")


@dataclass(frozen=True)
class Type:
    target: IdSpec
    text: str

    def __post_init__(self) -> None:
        _check_target(self.target)


@dataclass(frozen=True)
class Pinch:
    start: Xy
    end: Xy

    def __post_init__(self) -> None:
        _check_target(self.start)
        _check_target(self.end)


@dataclass(frozen=True)
class Sleep:
    ms: int

    def __post_init__(self) -> None:
        if self.ms < 0:
            raise ValueError("sleep duration must be >= 0")


@dataclass(frozen=True)
class Skip:
    pass


class Device(enum.Enum):
    """Device events; the first four (besides back) suspend or recreate the app."""

    ClickBack = "ClickBack"
    ClickHome = "ClickHome"
    ClickMenu = "ClickMenu"
    Settings = "Settings"
    Rotate = "Rotate"

    def __repr__(self) -> str:
        return f"Device.{self.name}"


AppEvent = Union[Click, LongClick, Swipe, Type, Pinch, Sleep, Skip]
UiEvent = Union[AppEvent, Device]
APP_EVENTS = (Click, LongClick, Swipe, Type, Pinch, Sleep, Skip)
TARGETED = (Click, LongClick, Swipe, Type)


# --- properties ------------------------------------------------------------

_PRED_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple = ()

    def __post_init__(self) -> None:
        if not _PRED_NAME.match(self.name):
            raise ValueError(f"bad predicate name {self.name!r}")
        object.__setattr__(self, "args", tuple(self.args))
        for a in self.args:
            if isinstance(a, bool) or not isinstance(a, (int, str, Named)):
                raise TypeError(f"predicate arguments are ints or strings, got {a!r}")


@dataclass(frozen=True)
class Not:
    p: Prop


@dataclass(frozen=True)
class Implies:
    lhs: Prop
    rhs: Prop


@dataclass(frozen=True)
class And:
    lhs: Prop
    rhs: Prop


@dataclass(frozen=True)
class Or:
    lhs: Prop
    rhs: Prop


Prop = Union[Pred, Not, Implies, And, Or]


# --- traces ----------------------------------------------------------------


@dataclass(frozen=True)
class Seq:
    first: Trace
    rest: Trace


@dataclass(frozen=True)
class Assert:
    prop: Prop


@dataclass(frozen=True)
class Try:
    body: Trace


@dataclass(frozen=True)
class Then:
    prop: Prop
    body: Trace


@dataclass(frozen=True)
class Unit:
    pass


UNIT = Unit()

Trace = Union[AppEvent, Device, Seq, Assert, Try, Then, Unit]


# --- results ---------------------------------------------------------------


class _Silent:
    """The unit executed event: a step that touched no widget."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "SILENT"

    def __reduce__(self):
        return (_Silent, ())


SILENT = _Silent()


@dataclass(frozen=True)
class CrashReport:
    message: str
    screen: str
    frames: tuple
    event_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "frames", tuple(self.frames))
        if not self.frames:
            raise ValueError("a crash report needs at least one frame")


@dataclass(frozen=True)
class Succ:
    pass


@dataclass(frozen=True)
class Crash:
    report: CrashReport


@dataclass(frozen=True)
class Fail:
    prop: Prop


@dataclass(frozen=True)
class Block:
    event: UiEvent


Outcome = Union[Succ, Crash, Fail, Block]


# --- operations ------------------------------------------------------------


class NoWildcard(ValueError):
    """Raised when substituting into an event that has no ``*``."""


def is_concrete(e: UiEvent) -> bool:
    """True iff no argument of ``e`` is the wildcard."""
    if isinstance(e, Device):
        return True
    return not (isinstance(e, TARGETED) and isinstance(e.target, Wildcard))


def substitute_wildcard(e: AppEvent, ident: UiId) -> AppEvent:
    if is_concrete(e):
        raise NoWildcard(f"{render(e)} has no wildcard")
    if isinstance(ident, Wildcard):
        raise TypeError("cannot substitute a wildcard for a wildcard")
    if isinstance(e, Click):
        return Click(ident)
    if isinstance(e, LongClick):
        return LongClick(ident)
    if isinstance(e, Swipe):
        return Swipe(ident, e.delta)
    return Type(ident, e.text)


def atoms(t: Trace) -> Iterator[Trace]:
    """Yield the non-unit, non-sequence leaves of ``t`` left to right."""
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Seq):
            stack.append(node.rest)
            stack.append(node.first)
        elif not isinstance(node, Unit):
            yield node


def seq(parts: Sequence[Trace]) -> Trace:
    """Right-nested sequence of ``parts``; ``Unit`` when empty."""
    out: Trace = UNIT
    for p in reversed(parts):
        out = p if isinstance(out, Unit) else Seq(p, out)
    return out


def normalize(t: Trace) -> Trace:
    """Canonical form modulo associativity and the unit laws of ``:>>``."""
    flat = []
    for a in atoms(t):
        if isinstance(a, Try):
            a = Try(normalize(a.body))
        elif isinstance(a, Then):
            a = Then(a.prop, normalize(a.body))
        flat.append(a)
    return seq(flat)


# --- rendering -------------------------------------------------------------

# Binding strength of the textual operators, loosest first.
_PROP_LEVEL = {Implies: 1, Or: 2, And: 3}
_PROP_OP = {Implies: "=>", Or: "\\/", And: "/\\"}


def _quote(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _render_id(i: IdSpec, names: Mapping[int, str] | None) -> str:
    if isinstance(i, Wildcard):
        return "*"
    if isinstance(i, Num):
        if names and i.n in names:
            return "#" + names[i.n]
        return str(i.n)
    if isinstance(i, Text):
        return _quote(i.s)
    if isinstance(i, Named):
        return "#" + i.name
    return f"({i.x},{i.y})"


def _render_arg(a, names) -> str:
    if isinstance(a, str):
        return _quote(a)
    if isinstance(a, Named):
        return "#" + a.name
    return str(a)


def _render_prop(p: Prop, names, level: int = 0) -> str:
    if isinstance(p, Pred):
        if not p.args:
            return p.name
        return f"{p.name}({','.join(_render_arg(a, names) for a in p.args)})"
    if isinstance(p, Not):
        return "!" + _render_prop(p.p, names, 4)
    mine = _PROP_LEVEL[type(p)]
    # right-associative: the left operand needs parens at equal strength
    text = (f"{_render_prop(p.lhs, names, mine + 1)} {_PROP_OP[type(p)]} "
            f"{_render_prop(p.rhs, names, mine)}")
    return f"({text})" if mine < level else text


def _render_event(e: UiEvent, names) -> str:
    if isinstance(e, Device):
        return e.value
    if isinstance(e, Skip):
        return "Skip"
    if isinstance(e, Sleep):
        return f"Sleep({e.ms})"
    if isinstance(e, Pinch):
        return f"Pinch(({e.start.x},{e.start.y}),({e.end.x},{e.end.y}))"
    head = f"{type(e).__name__}({_render_id(e.target, names)}"
    if isinstance(e, Type):
        return f"{head},{_quote(e.text)})"
    if isinstance(e, Swipe):
        return f"{head},({e.delta.x},{e.delta.y}))"
    return head + ")"


def _render_trace(t: Trace, names, level: int) -> str:
    # levels: 0 = then, 1 = sequence, 2 = postfix operand
    if isinstance(t, Seq):
        text = f"{_render_trace(t.first, names, 2)} :>> {_render_trace(t.rest, names, 1)}"
        return "{ " + text + " }" if level > 1 else text
    if isinstance(t, Then):
        text = f"{_render_prop(t.prop, names)} then {_render_trace(t.body, names, 0)}"
        return "{ " + text + " }" if level > 0 else text
    if isinstance(t, Assert):
        text = "assert " + _render_prop(t.prop, names)
        return "{ " + text + " }" if level > 2 else text
    if isinstance(t, Try):
        return _render_trace(t.body, names, 3) + "?"
    if isinstance(t, Unit):
        return "unit"
    return _render_event(t, names)


def render(x, names: Mapping[int, str] | None = None) -> str:
    """Render a trace, event, property or executed trace in script syntax.

    ``names`` maps numeric widget ids back to their ``#name`` spelling.
    """
    if isinstance(x, (Pred, Not, Implies, And, Or)):
        return _render_prop(x, names)
    if isinstance(x, (list, tuple)):
        return render_exec(x, names)
    return _render_trace(x, names, 0)


def render_exec(exec_trace: Sequence, names: Mapping[int, str] | None = None) -> str:
    return " :>> ".join(_render_event(o, names) for o in exec_trace if o is not SILENT)


# --- plain-data encoding (used by the jsonl report stream) ------------------

_CLASSES = {c.__name__: c for c in (
    Num, Text, Xy, Named, Wildcard, Click, LongClick, Swipe, Type, Pinch, Sleep, Skip,
    Pred, Not, Implies, And, Or, Seq, Assert, Try, Then, Unit,
    CrashReport, Succ, Crash, Fail, Block,
)}


def to_data(x) -> Any:
    """Encode a trace-language value as JSON-compatible data."""
    if x is SILENT:
        return {"t": "Silent"}
    if isinstance(x, Device):
        return {"t": "Device", "v": x.value}
    if is_dataclass(x):
        out = {"t": type(x).__name__}
        for f in fields(x):
            out[f.name] = to_data(getattr(x, f.name))
        return out
    if isinstance(x, (list, tuple)):
        return [to_data(v) for v in x]
    return x


def from_data(d) -> Any:
    if isinstance(d, list):
        return tuple(from_data(v) for v in d)
    if not isinstance(d, dict):
        return d
    tag = d["t"]
    if tag == "Silent":
        return SILENT
    if tag == "Device":
        return Device(d["v"])
    cls = _CLASSES[tag]
    return cls(**{k: from_data(v) for k, v in d.items() if k != "t"})
