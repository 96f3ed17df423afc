"""Deciding and listing the traces a generator denotes.

:func:`denotes` compiles a generator into a Thompson-style NFA whose
symbols are trace atoms (events, asserts, try blocks and then blocks) and
runs the flattened atom list of the normalized trace through it.  Try and
then blocks are opaque symbols matched by recursion into their bodies.

:func:`enumerate_traces` lists a finite denotation directly from the set
semantics and serves as an independent oracle for :func:`denotes`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .gen import (
    EVENT_GENS, AssertG, ChoiceG, DeviceG, Gen, RepeatG, SeqG, SkipG, ThenG,
    TryG, Unbounded, UnitG, event_args, walk,
)
from .trace import Assert, Skip, Then, Trace, Try, UNIT, atoms, normalize, seq

__all__ = ["denotes", "enumerate_traces", "TooLarge", "Unbounded", "compile_nfa"]


class TooLarge(ValueError):
    """The denotation has more members than the requested limit."""


# --- NFA --------------------------------------------------------------------


@dataclass
class Nfa:
    eps: list = field(default_factory=list)      # state -> [state]
    edges: list = field(default_factory=list)    # state -> [(matcher, state)]

    def state(self) -> int:
        self.eps.append([])
        self.edges.append([])
        return len(self.eps) - 1

    def closure(self, states) -> set:
        seen = set(states)
        stack = list(states)
        while stack:
            for nxt in self.eps[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen


def _matcher(g: Gen) -> Callable[[Trace], bool] | None:
    ctor = EVENT_GENS.get(type(g))
    if ctor is not None:
        gens = event_args(g)

        def match_event(a, ctor=ctor, gens=gens):
            return type(a) is ctor and all(
                ag.contains(getattr(a, f)) for ag, f in zip(gens, a.__dataclass_fields__))
        return match_event
    if isinstance(g, SkipG):
        return lambda a: isinstance(a, Skip)
    if isinstance(g, DeviceG):
        return lambda a: a is g.event
    if isinstance(g, AssertG):
        return lambda a: isinstance(a, Assert) and a.prop == g.prop
    if isinstance(g, TryG):
        return lambda a: isinstance(a, Try) and denotes(g.body, a.body)
    if isinstance(g, ThenG):
        return lambda a: isinstance(a, Then) and a.prop == g.prop and denotes(g.body, a.body)
    return None


def _build(g: Gen, nfa: Nfa) -> tuple:
    """Fragment for ``g`` as (start, accept) states."""
    m = _matcher(g)
    if m is not None:
        s, e = nfa.state(), nfa.state()
        nfa.edges[s].append((m, e))
        return s, e
    if isinstance(g, UnitG):
        s = nfa.state()
        return s, s
    if isinstance(g, SeqG):
        s1, e1 = _build(g.first, nfa)
        s2, e2 = _build(g.rest, nfa)
        nfa.eps[e1].append(s2)
        return s1, e2
    if isinstance(g, ChoiceG):
        s, e = nfa.state(), nfa.state()
        for branch in (g.left, g.right):
            bs, be = _build(branch, nfa)
            nfa.eps[s].append(bs)
            nfa.eps[be].append(e)
        return s, e
    if isinstance(g, RepeatG):
        # one mandatory copy, then up to n-1 optional ones
        s, e = _build(g.body, nfa)
        done = nfa.state()
        nfa.eps[e].append(done)
        for _ in range(g.n - 1):
            bs, be = _build(g.body, nfa)
            nfa.eps[e].append(bs)
            nfa.eps[be].append(done)
            e = be
        return s, done
    raise TypeError(f"not a generator: {g!r}")


def compile_nfa(g: Gen) -> tuple:
    nfa = Nfa()
    start, accept = _build(g, nfa)
    return nfa, start, accept


def denotes(g: Gen, t: Trace) -> bool:
    """True iff ``t`` is (modulo sequencing laws) one of the traces ``g`` denotes."""
    nfa, start, accept = compile_nfa(g)
    current = nfa.closure([start])
    for a in atoms(normalize(t)):
        nxt = set()
        for st in current:
            for match, to in nfa.edges[st]:
                if to not in nxt and match(a):
                    nxt.add(to)
        if not nxt:
            return False
        current = nfa.closure(nxt)
    return accept in current


# --- enumeration ------------------------------------------------------------


def _concat(a: Trace, b: Trace) -> Trace:
    return seq(list(atoms(a)) + list(atoms(b)))


def _check(out: set, limit: int) -> set:
    if len(out) > limit:
        raise TooLarge(f"more than {limit} traces")
    return out


def enumerate_traces(g: Gen, limit: int = 10_000) -> set:
    """The normalized members of the denotation of ``g``.

    Raises :class:`Unbounded` if some argument domain cannot be listed and
    :class:`TooLarge` if there are more than ``limit`` members.
    """
    for node in walk(g):
        if type(node) in EVENT_GENS:
            for ag in event_args(node):
                ag.values()
    return _enum(g, limit)


def _enum(g: Gen, limit: int) -> set:
    ctor = EVENT_GENS.get(type(g))
    if ctor is not None:
        domains = [ag.values() for ag in event_args(g)]
        out = set()
        for combo in itertools.product(*domains):
            out.add(ctor(*combo))
            _check(out, limit)
        return out
    if isinstance(g, SkipG):
        return {Skip()}
    if isinstance(g, DeviceG):
        return {g.event}
    if isinstance(g, UnitG):
        return {UNIT}
    if isinstance(g, AssertG):
        return {Assert(g.prop)}
    if isinstance(g, TryG):
        return {Try(t) for t in _enum(g.body, limit)}
    if isinstance(g, ThenG):
        return {Then(g.prop, t) for t in _enum(g.body, limit)}
    if isinstance(g, ChoiceG):
        return _check(_enum(g.left, limit) | _enum(g.right, limit), limit)
    if isinstance(g, SeqG):
        return _product(_enum(g.first, limit), _enum(g.rest, limit), limit)
    if isinstance(g, RepeatG):
        body = _enum(g.body, limit)
        out, layer = set(body), body
        for _ in range(g.n - 1):
            layer = _product(layer, body, limit)
            out |= layer
            _check(out, limit)
        return out
    raise TypeError(f"not a generator: {g!r}")


def _product(left: set, right: set, limit: int) -> set:
    out = set()
    for a in left:
        for b in right:
            out.add(_concat(a, b))
            _check(out, limit)
    return out
