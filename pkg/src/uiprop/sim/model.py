"""Static app models: screens, widgets, transition rules and lifecycle policy.

Models are JSON documents; see ``docs/model-schema.md`` for the format.
:func:`load_model` validates every cross reference up front so the
simulator never meets a dangling name at run time.
"""

from __future__ import annotations

import copy
import json
import os
import string
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping, Union

from .expr import FLAGS, Expr, ExprError, compile_expr, provably_disjoint

__all__ = [
    "SchemaError", "RefError", "AmbiguityError",
    "WidgetSpec", "ScreenSpec", "Rule", "Task", "AppModel",
    "GotoScreen", "SetVar", "SetText", "SetFlag", "CrashEffect", "Schedule",
    "AppendTyped", "If",
    "load_model", "fixture_names", "fixture_document", "load_fixture",
]

RULE_EVENTS = ("Click", "LongClick", "Type", "Swipe", "ClickBack")


class SchemaError(ValueError):
    """The document is missing a field or has one of the wrong type."""


class RefError(ValueError):
    """The document names a screen, widget, variable or task that does not exist."""


class AmbiguityError(ValueError):
    """Two transition rules can match the same event in the same state."""


# --- effects ---------------------------------------------------------------


@dataclass(frozen=True)
class GotoScreen:
    screen: str


@dataclass(frozen=True)
class SetVar:
    name: str
    value: Any = None
    add: int | None = None


@dataclass(frozen=True)
class SetText:
    widget: int
    template: str


@dataclass(frozen=True)
class SetFlag:
    widget: int
    flag: str
    value: bool


@dataclass(frozen=True)
class CrashEffect:
    message: str
    frames: tuple


@dataclass(frozen=True)
class Schedule:
    task: int


@dataclass(frozen=True)
class AppendTyped:
    widget: int


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()


Effect = Union[GotoScreen, SetVar, SetText, SetFlag, CrashEffect, Schedule, AppendTyped, If]


# --- model -----------------------------------------------------------------


@dataclass(frozen=True)
class WidgetSpec:
    id: int
    screen: str
    name: str | None
    text: str
    xy: tuple
    bounds: tuple
    flags: Mapping[str, bool]
    is_dialog: bool = False

    def contains(self, x: int, y: int) -> bool:
        (x0, y0), (w, h) = self.xy, self.bounds
        return x0 <= x < x0 + w and y0 <= y < y0 + h


@dataclass(frozen=True)
class ScreenSpec:
    name: str
    widgets: tuple


@dataclass(frozen=True)
class Rule:
    screen: str
    event: str
    target: int | None
    when: Expr | None
    effects: tuple


@dataclass(frozen=True)
class Task:
    delay_ms: int
    effects: tuple


@dataclass(frozen=True, eq=False)
class AppModel:
    name: str
    screens: Mapping[str, ScreenSpec]
    initial_screen: str
    variables: Mapping[str, Any]
    transitions: tuple
    predicates: Mapping[str, Expr]
    tasks: tuple = ()
    rotate_volatile: frozenset = frozenset()
    suspend_volatile: frozenset = frozenset()
    on_rotate: tuple = ()
    on_resume: tuple = ()
    idle_work: int = 1
    event_ms: int = 0
    widgets: Mapping[int, WidgetSpec] = field(default_factory=dict)
    names: Mapping[str, int] = field(default_factory=dict)

    @property
    def id_names(self) -> dict:
        """Numeric id -> ``#name`` spelling, for rendering reports."""
        return {i: n for n, i in self.names.items()}

    def rules_for(self, screen: str, event: str, target: int | None) -> list:
        return [r for r in self.transitions
                if r.screen == screen and r.event == event
                and (r.target is None or r.target == target)]


# --- loading ---------------------------------------------------------------


def _need(doc: Mapping, key: str, kind, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"{where}: {key!r} must be an integer")
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: {key!r} has the wrong type")
    return value


def _pair(value, where: str) -> tuple:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
        raise SchemaError(f"{where}: expected a pair of integers")
    return tuple(value)


class _Loader:
    def __init__(self, doc: Mapping) -> None:
        if not isinstance(doc, Mapping):
            raise SchemaError("model document must be a JSON object")
        self.doc = doc
        self.widgets: dict = {}
        self.names: dict = {}
        self.variables: dict = {}
        self.tasks_raw: list = []

    def widget(self, ref, where: str) -> int:
        if isinstance(ref, str) and ref in self.names:
            return self.names[ref]
        if isinstance(ref, int) and not isinstance(ref, bool) and ref in self.widgets:
            return ref
        raise RefError(f"{where}: unknown widget {ref!r}")

    def expr(self, src, where: str) -> Expr:
        if not isinstance(src, str):
            raise SchemaError(f"{where}: expression must be a string")
        try:
            return compile_expr(src, variables=self.variables, widgets=self.names,
                                widget_ids=self.widgets)
        except ExprError as e:
            raise RefError(f"{where}: {e}") from None

    def effects(self, items, where: str) -> tuple:
        if not isinstance(items, list):
            raise SchemaError(f"{where}: effects must be a list")
        return tuple(self.effect(e, f"{where}[{i}]") for i, e in enumerate(items))

    def effect(self, e, where: str) -> Effect:
        if not isinstance(e, Mapping):
            raise SchemaError(f"{where}: effect must be an object")
        if "goto" in e:
            if e["goto"] not in self.doc["screens"]:
                raise RefError(f"{where}: unknown screen {e['goto']!r}")
            return GotoScreen(e["goto"])
        if "set" in e:
            name = e["set"]
            if name not in self.variables:
                raise RefError(f"{where}: undeclared variable {name!r}")
            if "add" in e:
                return SetVar(name, add=_need(e, "add", int, where))
            if "value" not in e:
                raise SchemaError(f"{where}: 'set' needs 'value' or 'add'")
            return SetVar(name, value=e["value"])
        if "set_text" in e:
            template = _need(e, "template", str, where)
            for _, fname, _, _ in string.Formatter().parse(template):
                if fname and fname not in self.variables:
                    raise RefError(f"{where}: template names undeclared {fname!r}")
            return SetText(self.widget(e["set_text"], where), template)
        if "set_flag" in e:
            flag = _need(e, "flag", str, where)
            if flag not in FLAGS:
                raise SchemaError(f"{where}: unknown flag {flag!r}")
            return SetFlag(self.widget(e["set_flag"], where), flag,
                           bool(_need(e, "value", bool, where)))
        if "crash" in e:
            frames = e.get("frames") or [f"at {self.doc.get('name', 'app')}"]
            if not all(isinstance(f, str) for f in frames):
                raise SchemaError(f"{where}: frames must be strings")
            return CrashEffect(str(e["crash"]), tuple(frames))
        if "schedule" in e:
            task = _need(e, "schedule", int, where)
            if not 0 <= task < len(self.tasks_raw):
                raise RefError(f"{where}: unknown task {task}")
            return Schedule(task)
        if "append_typed" in e:
            return AppendTyped(self.widget(e["append_typed"], where))
        if "if" in e:
            return If(self.expr(e["if"], where),
                      self.effects(e.get("then", []), where + ".then"),
                      self.effects(e.get("else", []), where + ".else"))
        raise SchemaError(f"{where}: unknown effect {sorted(e)}")

    def load(self) -> AppModel:
        doc = self.doc
        name = doc.get("name", "app")
        screens_doc = _need(doc, "screens", Mapping, "model")
        initial = _need(doc, "initial_screen", str, "model")
        if initial not in screens_doc:
            raise RefError(f"model: initial_screen {initial!r} is not a screen")
        self.variables = dict(doc.get("variables", {}))
        for k, v in self.variables.items():
            if isinstance(v, bool):
                self.variables[k] = int(v)
            elif not isinstance(v, (int, str)):
                raise SchemaError(f"variables: {k!r} must be an integer or string")
        self.tasks_raw = list(doc.get("async_tasks", []))

        screens = {}
        for sname, sdoc in screens_doc.items():
            where = f"screens.{sname}"
            wlist = _need(sdoc, "widgets", list, where)
            specs = []
            for i, w in enumerate(wlist):
                wwhere = f"{where}.widgets[{i}]"
                wid = _need(w, "id", int, wwhere)
                if wid in self.widgets:
                    raise SchemaError(f"{wwhere}: duplicate widget id {wid}")
                bounds = _pair(w.get("bounds", [100, 100]), wwhere + ".bounds")
                if bounds[0] <= 0 or bounds[1] <= 0:
                    raise SchemaError(f"{wwhere}: bounds must be positive")
                flags = {f: bool(w.get(f, f in ("displayed", "enabled"))) for f in FLAGS}
                wname = w.get("name")
                if wname is not None:
                    if wname in self.names:
                        raise SchemaError(f"{wwhere}: duplicate widget name {wname!r}")
                    self.names[wname] = wid
                spec = WidgetSpec(wid, sname, wname, str(w.get("text", "")),
                                  _pair(w.get("xy", [0, 0]), wwhere + ".xy"), bounds,
                                  flags, bool(w.get("is_dialog", False)))
                self.widgets[wid] = spec
                specs.append(spec)
            screens[sname] = ScreenSpec(sname, tuple(specs))

        tasks = []
        for i, t in enumerate(self.tasks_raw):
            where = f"async_tasks[{i}]"
            delay = _need(t, "delay_ms", int, where)
            if delay < 0:
                raise SchemaError(f"{where}: delay_ms must be >= 0")
            tasks.append(Task(delay, self.effects(_need(t, "effects", list, where), where)))

        rules = []
        for i, r in enumerate(doc.get("transitions", [])):
            where = f"transitions[{i}]"
            screen = _need(r, "screen", str, where)
            if screen not in screens:
                raise RefError(f"{where}: unknown screen {screen!r}")
            event = _need(r, "on", str, where)
            if event not in RULE_EVENTS:
                raise SchemaError(f"{where}: cannot match on {event!r}")
            target = r.get("target")
            if target is not None:
                target = self.widget(target, where)
                if self.widgets[target].screen != screen:
                    raise RefError(f"{where}: widget {r['target']!r} is not on {screen!r}")
            when = self.expr(r["when"], where) if "when" in r else None
            rules.append(Rule(screen, event, target, when,
                              self.effects(r.get("effects", []), where)))
        _check_overlaps(rules)

        predicates = {}
        for pname, src in doc.get("predicates", {}).items():
            predicates[pname] = self.expr(src, f"predicates.{pname}")

        life = doc.get("lifecycle", {})
        volatile = {}
        for phase in ("rotate", "suspend"):
            refs = life.get(phase, {}).get("volatile", [])
            volatile[phase] = frozenset(self.widget(w, f"lifecycle.{phase}") for w in refs)

        idle_work = doc.get("idle_work", 1)
        event_ms = doc.get("event_ms", 0)
        if not isinstance(idle_work, int) or idle_work < 1:
            raise SchemaError("model: idle_work must be a positive integer")
        if not isinstance(event_ms, int) or event_ms < 0:
            raise SchemaError("model: event_ms must be a non-negative integer")

        return AppModel(
            name=name, screens=screens, initial_screen=initial,
            variables=self.variables, transitions=tuple(rules),
            predicates=predicates, tasks=tuple(tasks),
            rotate_volatile=volatile["rotate"], suspend_volatile=volatile["suspend"],
            on_rotate=self.effects(life.get("on_rotate", []), "lifecycle.on_rotate"),
            on_resume=self.effects(life.get("on_resume", []), "lifecycle.on_resume"),
            idle_work=idle_work, event_ms=event_ms,
            widgets=self.widgets, names=self.names,
        )


def _check_overlaps(rules: list) -> None:
    for i, a in enumerate(rules):
        for b in rules[i + 1:]:
            if a.screen != b.screen or a.event != b.event:
                continue
            if a.target is not None and b.target is not None and a.target != b.target:
                continue
            if a.when is not None and b.when is not None and provably_disjoint(a.when, b.when):
                continue
            raise AmbiguityError(
                f"rules on screen {a.screen!r} for {a.event} overlap "
                f"(guards {a.when and a.when.source!r} / {b.when and b.when.source!r})")


def load_model(source) -> AppModel:
    """Load a model from a mapping, a JSON string, or a path to a JSON file."""
    if isinstance(source, Mapping):
        doc = source
    elif isinstance(source, os.PathLike) or (
            isinstance(source, str) and not source.lstrip().startswith("{")):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.loads(source)
    return _Loader(doc).load()


# --- bundled fixtures ------------------------------------------------------

_FIXTURES = resources.files(__package__) / "fixtures"


def fixture_names() -> list:
    return sorted(p.name[:-5] for p in _FIXTURES.iterdir() if p.name.endswith(".json"))


def fixture_document(name: str) -> dict:
    """A fresh, mutable copy of a bundled model document."""
    return copy.deepcopy(json.loads((_FIXTURES / f"{name}.json").read_text("utf-8")))


def load_fixture(name: str) -> AppModel:
    return load_model(fixture_document(name))
