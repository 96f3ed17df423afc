"""Recursive-descent parser for test scripts, generators, traces and properties.

Operator binding, tightest first: postfix ``?``, ``:>>``, ``*>>``, ``<+>``,
``preserves``, ``then``.  Binary operators associate to the right.  The
full grammar is in ``docs/script-grammar.md``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Mapping

from ..combinators import (
    MonkeyArgs, gorilla, interruptible_seq, monkey, optional, preserves, relevant_monkey,
)
from ..gen import (
    AlphaStr, ArgGen, AssertG, ChoiceG, Choose, ClickG, Const, DeviceG, Gen, LongClickG,
    OneOf, Pair, PinchG, RepeatG, SeqG, SkipG, SleepG, SwipeG, ThenG, TryG, TypeG,
    UnitG, Wild,
)
from ..trace import (
    UNIT, WILDCARD, And, Assert, Click, Device, Implies, LongClick, Named, Not, Num,
    Or, Pinch, Pred, Prop, Seq, Skip, Sleep, Swipe, Text, Then, Trace, Try, Type, Xy,
)

__all__ = [
    "ParseDiagnostic", "Script", "Check", "parse_script", "parse_gen", "parse_trace",
    "parse_prop", "gen_to_trace",
]

_TOKEN = re.compile(r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<op>:>>|\*>>|<\+>|==>|=>|/\\|\\/|[!?{}()\[\],\#*=])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_DEVICE = {d.value: d for d in Device}
_KEYWORDS = {
    "val", "check", "then", "preserves", "assert", "repeat", "optional", "monkey",
    "relevantMonkey", "gorilla", "unit", "property", "samples", "seed", "reset",
    "Click", "LongClick", "Type", "Swipe", "Pinch", "Sleep", "Skip",
    "choose", "oneOf", "alphaStr", *_DEVICE,
}


class ParseDiagnostic(ValueError):
    """A syntax error with a 1-based position and the offending source line."""

    def __init__(self, message: str, line: int, col: int, excerpt: str) -> None:
        super().__init__(message)
        self.message, self.line, self.col, self.excerpt = message, line, col, excerpt

    def __str__(self) -> str:
        return (f"{self.line}:{self.col}: {self.message}\n"
                f"  {self.excerpt}\n  {' ' * (self.col - 1)}^")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Check:
    gen: Gen
    property: Prop | None = None
    samples: int | None = None
    seed: int | None = None
    reset: str | None = None


@dataclass(frozen=True)
class Script:
    bindings: Mapping[str, Gen] = field(default_factory=dict)
    check: Check | None = None


def _lex(src: str) -> list:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise _diag(src, "unexpected character " + repr(src[pos]), line, col)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Tok(kind, m.group(), line, col))
        text = m.group()
        if "\n" in text:
            line += text.count("\n")
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


def _diag(src: str, message: str, line: int, col: int) -> ParseDiagnostic:
    lines = src.split("\n")
    excerpt = lines[line - 1] if 0 < line <= len(lines) else ""
    return ParseDiagnostic(message, line, col, excerpt)


class _Parser:
    def __init__(self, src: str, names: Mapping[str, int] | None,
                 env: Mapping[str, Gen] | None) -> None:
        self.src = src
        self.toks = _lex(src)
        self.pos = 0
        self.names = names
        self.env = dict(env or {})

    # --- token plumbing ---------------------------------------------------

    @property
    def tok(self) -> Tok:
        return self.toks[self.pos]

    def error(self, message: str, tok: Tok | None = None) -> ParseDiagnostic:
        tok = tok or self.tok
        return _diag(self.src, message, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def integer(self) -> int:
        if self.tok.kind != "int":
            raise self.error(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        self.pos += 1
        return int(self.toks[self.pos - 1].text)

    def string(self) -> str:
        if self.tok.kind != "str":
            raise self.error(f"expected a string, found {self.tok.text or 'end of input'!r}")
        self.pos += 1
        return json.loads(self.toks[self.pos - 1].text)

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        self.pos += 1
        return self.toks[self.pos - 1].text

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # --- properties -------------------------------------------------------

    def prop(self) -> Prop:
        lhs = self.prop_or()
        if self.accept("=>") or self.accept("==>"):
            return Implies(lhs, self.prop())
        return lhs

    def prop_or(self) -> Prop:
        lhs = self.prop_and()
        if self.accept("\\/"):
            return Or(lhs, self.prop_or())
        return lhs

    def prop_and(self) -> Prop:
        lhs = self.prop_not()
        if self.accept("/\\"):
            return And(lhs, self.prop_and())
        return lhs

    def prop_not(self) -> Prop:
        if self.accept("!"):
            return Not(self.prop_not())
        if self.accept("("):
            p = self.prop()
            self.expect(")")
            return p
        tok = self.tok
        name = self.ident()
        if name in _KEYWORDS:
            raise self.error(f"{name!r} cannot name a predicate", tok)
        args = []
        if self.accept("("):
            if not self.at(")"):
                args.append(self.pred_arg())
                while self.accept(","):
                    args.append(self.pred_arg())
            self.expect(")")
        return Pred(name, tuple(args))

    def pred_arg(self):
        if self.tok.kind == "int":
            return self.integer()
        if self.tok.kind == "str":
            return self.string()
        if self.at("#"):
            # kept symbolic so reports show the name; the device resolves it
            ident = self.widget_name()
            if isinstance(ident, Num):
                return Named(self.toks[self.pos - 1].text)
            return ident
        raise self.error("expected an integer, string or #name argument")

    # --- argument generators ----------------------------------------------

    def widget_name(self):
        tok = self.tok
        self.expect("#")
        name = self.ident()
        if self.names is None:
            return Named(name)
        if name not in self.names:
            raise self.error(f"unknown widget #{name}", tok)
        return Num(self.names[name])

    def id_literal(self):
        if self.at("#"):
            return self.widget_name()
        if self.tok.kind == "int":
            return Num(self.integer())
        if self.tok.kind == "str":
            return Text(self.string())
        if self.at("("):
            tok = self.tok
            x, y = self.int_pair()
            if x < 0 or y < 0:
                raise self.error("screen coordinates must be non-negative", tok)
            return Xy(x, y)
        raise self.error("expected a widget id (#name, number, \"text\", (x,y) or *)")

    def int_pair(self) -> tuple:
        self.expect("(")
        x = self.integer()
        self.expect(",")
        y = self.integer()
        self.expect(")")
        return x, y

    def id_gen(self) -> ArgGen:
        if self.accept("*"):
            return Wild()
        if self.accept("oneOf"):
            return OneOf(tuple(self.arg_list(self.id_literal)))
        return Const(self.id_literal())

    def arg_list(self, item) -> list:
        self.expect("(")
        out = [item()]
        while self.accept(","):
            out.append(item())
        self.expect(")")
        return out

    def int_gen(self) -> ArgGen:
        if self.accept("choose"):
            self.expect("(")
            tok = self.tok
            lo = self.integer()
            self.expect(",")
            hi = self.integer()
            self.expect(")")
            if lo > hi:
                raise self.error(f"empty range choose({lo},{hi})", tok)
            return Choose(lo, hi)
        if self.accept("oneOf"):
            return OneOf(tuple(self.arg_list(self.integer)))
        return Const(self.integer())

    def str_gen(self) -> ArgGen:
        if self.accept("alphaStr"):
            self.expect("(")
            n = self.integer()
            self.expect(")")
            if n < 0:
                raise self.error("alphaStr length must be >= 0")
            return AlphaStr(n)
        if self.accept("oneOf"):
            return OneOf(tuple(self.arg_list(self.string)))
        return Const(self.string())

    def xy_gen(self, points: bool) -> ArgGen:
        if self.accept("oneOf"):
            def item():
                tok = self.tok
                x, y = self.int_pair()
                if points and (x < 0 or y < 0):
                    raise self.error("screen coordinates must be non-negative", tok)
                return Xy(x, y)
            return OneOf(tuple(self.arg_list(item)))
        tok = self.tok
        self.expect("(")
        x = self.int_gen()
        self.expect(",")
        y = self.int_gen()
        self.expect(")")
        if isinstance(x, Const) and isinstance(y, Const):
            if points and (x.value < 0 or y.value < 0):
                raise self.error("screen coordinates must be non-negative", tok)
            return Const(Xy(x.value, y.value))
        return Pair(x, y)

    # --- generators -------------------------------------------------------

    def gen(self) -> Gen:
        start = self.pos
        try:
            p = self.prop()
            if self.accept("then"):
                return ThenG(p, self.gen())
        except ParseDiagnostic:
            pass
        self.pos = start
        return self.gen_preserves()

    def gen_preserves(self) -> Gen:
        g = self.gen_choice()
        while self.accept("preserves"):
            g = preserves(g, self.prop())
        return g

    def gen_choice(self) -> Gen:
        g = self.gen_intr()
        if self.accept("<+>"):
            return ChoiceG(g, self.gen_choice())
        return g

    def gen_intr(self) -> Gen:
        g = self.gen_seq()
        if self.accept("*>>"):
            m = 3
            if self.accept("["):
                tok = self.tok
                m = self.integer()
                if m < 1:
                    raise self.error("interrupt bound must be >= 1", tok)
                self.expect("]")
            return interruptible_seq(g, self.gen_intr(), m)
        return g

    def gen_seq(self) -> Gen:
        g = self.gen_postfix()
        if self.accept(":>>"):
            return SeqG(g, self.gen_seq())
        return g

    def gen_postfix(self) -> Gen:
        g = self.primary()
        while self.accept("?"):
            g = TryG(g)
        return g

    def count(self) -> int:
        tok = self.tok
        n = self.integer()
        if n < 1:
            raise self.error("count must be >= 1", tok)
        return n

    def primary(self) -> Gen:
        tok = self.tok
        if self.accept("{"):
            g = self.gen()
            self.expect("}")
            return g
        if tok.kind != "ident":
            raise self.error(f"expected a generator, found {tok.text or 'end of input'!r}")
        word = tok.text
        self.pos += 1
        if word in _DEVICE:
            return DeviceG(_DEVICE[word])
        if word == "Skip":
            return SkipG()
        if word == "unit":
            return UnitG()
        if word in ("Click", "LongClick"):
            self.expect("(")
            target = self.id_gen()
            self.expect(")")
            return (ClickG if word == "Click" else LongClickG)(target)
        if word == "Type":
            self.expect("(")
            target = self.id_gen()
            self.expect(",")
            text = self.str_gen()
            self.expect(")")
            return TypeG(target, text)
        if word == "Swipe":
            self.expect("(")
            target = self.id_gen()
            self.expect(",")
            delta = self.xy_gen(points=False)
            self.expect(")")
            return SwipeG(target, delta)
        if word == "Pinch":
            self.expect("(")
            a = self.xy_gen(points=True)
            self.expect(",")
            b = self.xy_gen(points=True)
            self.expect(")")
            return PinchG(a, b)
        if word == "Sleep":
            self.expect("(")
            ms = self.int_gen()
            if isinstance(ms, Const) and ms.value < 0:
                raise self.error("sleep duration must be >= 0", tok)
            self.expect(")")
            return SleepG(ms)
        if word == "assert":
            return AssertG(self.prop())
        if word == "repeat":
            n = self.count()
            return RepeatG(n, self.gen_postfix())
        if word == "optional":
            return optional(self.gen_postfix())
        if word == "monkey":
            return monkey(self.count(), MonkeyArgs())
        if word == "relevantMonkey":
            return relevant_monkey(self.count(), MonkeyArgs())
        if word == "gorilla":
            n = self.count()
            return gorilla(n, self.gen_postfix())
        if word in self.env:
            return self.env[word]
        if word in _KEYWORDS:
            raise self.error(f"unexpected {word!r}", tok)
        raise self.error(f"unbound name {word!r}", tok)

    # --- scripts ----------------------------------------------------------

    def script(self) -> Script:
        check = None
        while self.tok.kind != "eof":
            tok = self.tok
            if self.accept("val"):
                name_tok = self.tok
                name = self.ident()
                if name in _KEYWORDS:
                    raise self.error(f"{name!r} is reserved", name_tok)
                self.expect("=")
                self.env[name] = self.gen()
            elif self.accept("check"):
                if check is not None:
                    raise self.error("a script has exactly one check", tok)
                check = self.check_stanza()
            else:
                raise self.error(f"expected 'val' or 'check', found {tok.text!r}")
        if check is None:
            raise self.error("script has no check stanza")
        return Script(dict(self.env), check)

    def check_stanza(self) -> Check:
        opts: dict = {"gen": self.gen()}
        while True:
            tok = self.tok
            if self.accept("property"):
                key, value = "property", self.prop()
            elif self.accept("samples"):
                key, value = "samples", self.count()
            elif self.accept("seed"):
                key, value = "seed", self.integer()
                if value < 0:
                    raise self.error("seed must be >= 0", tok)
            elif self.accept("reset"):
                word_tok = self.tok
                key, value = "reset", self.ident()
                if value not in ("reinstall", "keep"):
                    raise self.error("reset is 'reinstall' or 'keep'", word_tok)
            else:
                return Check(**opts)
            if key in opts:
                raise self.error(f"{key!r} given twice", tok)
            opts[key] = value


def parse_script(src: str, names: Mapping[str, int] | None = None) -> Script:
    """Parse ``val`` bindings followed by one ``check`` stanza."""
    return _Parser(src, names, None).script()


def parse_gen(src: str, names: Mapping[str, int] | None = None,
              env: Mapping[str, Gen] | None = None) -> Gen:
    p = _Parser(src, names, env)
    g = p.gen()
    p.done()
    return g


def parse_prop(src: str, names: Mapping[str, int] | None = None) -> Prop:
    p = _Parser(src, names, None)
    prop = p.prop()
    p.done()
    return prop


def parse_trace(src: str, names: Mapping[str, int] | None = None) -> Trace:
    """Parse a concrete trace: generator syntax without choices or ranges."""
    p = _Parser(src, names, None)
    start = p.tok
    g = p.gen()
    p.done()
    try:
        return gen_to_trace(g)
    except ValueError as exc:
        raise p.error(str(exc), start) from None


def _single(a: ArgGen):
    if isinstance(a, Const):
        return a.value
    if isinstance(a, Wild):
        return WILDCARD
    raise ValueError("a trace cannot contain argument generators")


def gen_to_trace(g: Gen) -> Trace:
    """The unique trace of a generator built only from literals."""
    simple = {ClickG: Click, LongClickG: LongClick, TypeG: Type, SwipeG: Swipe,
              PinchG: Pinch, SleepG: Sleep}
    ctor = simple.get(type(g))
    if ctor is not None:
        return ctor(*(_single(getattr(g, f)) for f in g.__dataclass_fields__))
    if isinstance(g, SkipG):
        return Skip()
    if isinstance(g, DeviceG):
        return g.event
    if isinstance(g, UnitG):
        return UNIT
    if isinstance(g, AssertG):
        return Assert(g.prop)
    if isinstance(g, SeqG):
        return Seq(gen_to_trace(g.first), gen_to_trace(g.rest))
    if isinstance(g, TryG):
        return Try(gen_to_trace(g.body))
    if isinstance(g, ThenG):
        return Then(g.prop, gen_to_trace(g.body))
    raise ValueError("a trace cannot contain choices, repetition or random exercising")
