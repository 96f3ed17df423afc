"""A deterministic simulated device running one app model.

:class:`DeviceState` implements the driver's oracle protocol.  Applying an
event only *enqueues* the app's reaction; :meth:`DeviceState.settle` runs
the queue, so crashes and state changes become visible at settle points,
much like work posted to a UI thread.  Time is virtual: ``Sleep`` and
(optionally) every applied event advance ``clock_ms``, releasing scheduled
tasks whose due time has passed.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import Any

from ..driver import StepBudgetExceeded
from ..trace import (
    And, Click, CrashReport, Device, Implies, LongClick, Named, Not, Num, Or,
    Pinch, Pred, Skip, Sleep, Swipe, Text, Type, Wildcard, Xy,
)
from .model import (
    AmbiguityError, AppendTyped, AppModel, CrashEffect, GotoScreen, If,
    Schedule, SetFlag, SetText, SetVar, WidgetSpec,
)

__all__ = ["DeviceState", "UnknownPredicate", "CAPABILITY"]

CAPABILITY = {Click: "clickable", LongClick: "long_clickable",
              Type: "editable", Swipe: "scrollable"}
_KIND = {Click: "Click", LongClick: "LongClick", Type: "Type", Swipe: "Swipe"}
_SUSPEND = (Device.ClickHome, Device.ClickMenu, Device.Settings)
_MISS = object()


class UnknownPredicate(LookupError):
    """A property names a predicate the model does not define, or uses the wrong arity."""


def _defaults(spec: WidgetSpec) -> dict:
    return {"text": spec.text, **spec.flags}


class DeviceState:
    """Mutable device + app state for one run (or one pool slot under ``Keep``)."""

    def __init__(self, model: AppModel) -> None:
        self.model = model
        self.screen = model.initial_screen
        self.widgets = {wid: _defaults(w) for wid, w in model.widgets.items()}
        self.vars = dict(model.variables)
        self.clock_ms = 0
        self.orientation = "portrait"
        self.foreground = True
        self.pending: list = []          # heap of (due_ms, seq, task index)
        self.ready: deque = deque()      # (effect, typed text or None)
        self.crashed: CrashReport | None = None
        self.applied_events = 0
        self.visited = [self.screen]
        self._seq = 0

    # --- copying and inspection -------------------------------------------

    def copy(self) -> "DeviceState":
        other = DeviceState.__new__(DeviceState)
        other.__dict__.update(self.__dict__)
        other.widgets = {k: dict(v) for k, v in self.widgets.items()}
        other.vars = dict(self.vars)
        other.pending = list(self.pending)
        other.ready = deque(self.ready)
        other.visited = list(self.visited)
        return other

    def snapshot(self) -> dict:
        """JSON-compatible dump of everything that can change."""
        return {
            "screen": self.screen,
            "widgets": {str(k): v for k, v in sorted(self.widgets.items())},
            "vars": dict(sorted(self.vars.items())),
            "clock_ms": self.clock_ms,
            "orientation": self.orientation,
            "foreground": self.foreground,
            "pending": [list(p) for p in sorted(self.pending)],
            "ready": [repr(e) + "|" + repr(t) for e, t in self.ready],
            "crashed": None if self.crashed is None else repr(self.crashed),
            "applied_events": self.applied_events,
            "visited": list(self.visited),
        }

    def widget_value(self, wid: int, attr: str) -> Any:
        """Hook for model expressions: ``text(w)``, ``displayed(w)``, ..."""
        state = self.widgets[wid]
        if attr == "displayed":
            return int(self._shown(wid))
        value = state[attr]
        return int(value) if isinstance(value, bool) else value

    # --- view hierarchy ---------------------------------------------------

    def _shown(self, wid: int) -> bool:
        return self.model.widgets[wid].screen == self.screen and self.widgets[wid]["displayed"]

    def _on_screen(self) -> list:
        return [w.id for w in self.model.screens[self.screen].widgets if self._shown(w.id)]

    def _capable(self, wid: int, flag: str) -> bool:
        state = self.widgets[wid]
        return self._shown(wid) and state["enabled"] and state[flag]

    def _resolve(self, ident) -> Any:
        """Widget id for a concrete target, ``None`` if unresolvable, ``_MISS`` for dead space."""
        if isinstance(ident, Named):
            ident = Num(self.model.names[ident.name]) if ident.name in self.model.names else None
        if isinstance(ident, Num):
            return ident.n if ident.n in self.widgets and self._shown(ident.n) else None
        if isinstance(ident, Text):
            hits = [w for w in self._on_screen() if self.widgets[w]["text"] == ident.s]
            return hits[0] if len(hits) == 1 else None
        if isinstance(ident, Xy):
            hits = [self.model.widgets[w] for w in self._on_screen()
                    if self.model.widgets[w].contains(ident.x, ident.y)]
            if not hits:
                return _MISS
            return max(hits, key=lambda w: (w.is_dialog, w.id)).id
        return None

    def _matching(self, ident) -> list:
        """Widgets on screen that a predicate argument refers to."""
        if isinstance(ident, str):
            return [w for w in self._on_screen() if self.widgets[w]["text"] == ident]
        if isinstance(ident, Named):
            ident = self.model.names.get(ident.name)
        if isinstance(ident, int) and not isinstance(ident, bool) and ident in self.widgets:
            return [ident] if self._shown(ident) else []
        return []

    # --- oracle: events ---------------------------------------------------

    def _tick(self, ms: int) -> None:
        self.clock_ms += ms
        self._release()

    def _release(self) -> None:
        while self.pending and self.pending[0][0] <= self.clock_ms:
            _, _, task = heapq.heappop(self.pending)
            self._enqueue(self.model.tasks[task].effects)

    def _enqueue(self, effects, typed: str | None = None) -> None:
        self.ready.extend((e, typed) for e in effects)

    def _reset(self, volatile) -> None:
        for wid in volatile:
            spec = self.model.widgets[wid]
            if spec.screen == self.screen:
                self.widgets[wid] = _defaults(spec)

    def try_apply(self, event) -> bool:
        if self.crashed is not None:
            return False
        applied = self._apply(event)
        if applied:
            self.applied_events += 1
        return applied

    def _apply(self, event) -> bool:
        model = self.model
        if isinstance(event, Device):
            if event is Device.Rotate:
                self.orientation = "landscape" if self.orientation == "portrait" else "portrait"
                self._reset(model.rotate_volatile)
                self._enqueue(model.on_rotate)
            elif event in _SUSPEND:
                self.foreground = False
                self._reset(model.suspend_volatile)
            else:
                dialogs = [w for w in self._on_screen() if model.widgets[w].is_dialog]
                if dialogs:
                    for w in dialogs:
                        self.widgets[w]["displayed"] = False
                else:
                    rule = self._rule("ClickBack", None)
                    if rule is None:
                        return False
                    self._enqueue(rule.effects)
            self._tick(model.event_ms)
            return True
        if isinstance(event, Skip):
            return True
        if isinstance(event, Sleep):
            self._tick(event.ms)
            return True
        if not self.foreground:
            return False
        if isinstance(event, Pinch):
            self._tick(model.event_ms)
            return True
        if isinstance(event.target, Wildcard):
            raise ValueError("try_apply needs a concrete event")
        wid = self._resolve(event.target)
        if wid is None:
            return False
        if wid is not _MISS:
            if not self._capable(wid, CAPABILITY[type(event)]):
                return False
            rule = self._rule(_KIND[type(event)], wid)
            if isinstance(event, Type):
                self.ready.append((AppendTyped(wid), event.text))
            if rule is not None:
                self._enqueue(rule.effects)
        self._tick(model.event_ms)
        return True

    def _rule(self, kind: str, wid: int | None):
        live = [r for r in self.model.rules_for(self.screen, kind, wid)
                if r.when is None or r.when(self)]
        if len(live) > 1:
            raise AmbiguityError(f"{len(live)} rules match {kind} on {self.screen!r}")
        return live[0] if live else None

    def ensure_foreground(self) -> bool:
        """Resume the app if it was sent to the background; True if it was."""
        if self.foreground:
            return False
        self.foreground = True
        self._enqueue(self.model.on_resume)
        return True

    # --- oracle: settling -------------------------------------------------

    def settle(self, budget: int = 1_000) -> CrashReport | None:
        if self.crashed is not None:
            return self.crashed
        work = 0
        self._release()
        while self.ready:
            effect, typed = self.ready.popleft()
            work += self.model.idle_work
            if work > budget:
                raise StepBudgetExceeded(f"app did not go idle within {budget} work units")
            self._run(effect, typed)
            if self.crashed is not None:
                return self.crashed
            self._release()
        return None

    def _run(self, e, typed: str | None) -> None:
        if isinstance(e, GotoScreen):
            if e.screen != self.screen:
                self.screen = e.screen
                for w in self.model.screens[e.screen].widgets:
                    self.widgets[w.id] = _defaults(w)
                self.visited.append(e.screen)
        elif isinstance(e, SetVar):
            self.vars[e.name] = e.value if e.add is None else self.vars[e.name] + e.add
        elif isinstance(e, SetText):
            self.widgets[e.widget]["text"] = e.template.format(**self.vars)
        elif isinstance(e, SetFlag):
            self.widgets[e.widget][e.flag] = e.value
        elif isinstance(e, AppendTyped):
            self.widgets[e.widget]["text"] += typed or ""
        elif isinstance(e, Schedule):
            task = self.model.tasks[e.task]
            self._seq += 1
            heapq.heappush(self.pending, (self.clock_ms + task.delay_ms, self._seq, e.task))
        elif isinstance(e, If):
            branch = e.then if e.cond(self) else e.orelse
            self.ready.extendleft((b, typed) for b in reversed(branch))
        elif isinstance(e, CrashEffect):
            self.crashed = CrashReport(e.message, self.screen, e.frames, self.applied_events)
        else:  # pragma: no cover - the loader only builds the kinds above
            raise TypeError(f"unknown effect {e!r}")

    # --- oracle: properties and hierarchy ---------------------------------

    def holds(self, prop) -> bool:
        if isinstance(prop, Not):
            return not self.holds(prop.p)
        if isinstance(prop, And):
            return self.holds(prop.lhs) and self.holds(prop.rhs)
        if isinstance(prop, Or):
            return self.holds(prop.lhs) or self.holds(prop.rhs)
        if isinstance(prop, Implies):
            return not self.holds(prop.lhs) or self.holds(prop.rhs)
        if isinstance(prop, Pred):
            return self._pred(prop)
        raise TypeError(f"not a property: {prop!r}")

    def _pred(self, p: Pred) -> bool:
        args = p.args
        builtin = {"isDisplayed": "displayed", "isClickable": "clickable",
                   "isEnabled": "enabled"}
        if p.name in builtin and len(args) == 1:
            flag = builtin[p.name]
            return any(self.widgets[w][flag] and (flag != "clickable" or self.widgets[w]["enabled"])
                       for w in self._matching(args[0]))
        if p.name == "hasText" and len(args) == 2:
            return any(self.widgets[w]["text"] == args[1] for w in self._matching(args[0]))
        expr = self.model.predicates.get(p.name)
        if expr is None or p.name in builtin or p.name == "hasText":
            raise UnknownPredicate(f"no predicate {p.name}/{len(args)}")
        if len(args) != expr.arity:
            raise UnknownPredicate(f"{p.name} takes {expr.arity} arguments, got {len(args)}")
        plain = tuple(self.model.names.get(a.name, a.name) if isinstance(a, Named) else a
                      for a in args)
        return bool(expr(self, plain))

    def enumerate_candidates(self, event) -> list:
        flag = CAPABILITY.get(type(event))
        if flag is None or not self.foreground or self.crashed is not None:
            return []
        return [Num(w) for w in sorted(self._on_screen()) if self._capable(w, flag)]
