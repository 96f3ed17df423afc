"""Boolean expressions used by app models for guards and user predicates.

Grammar::

    expr    := compare (("&&" | "and") compare)*
    compare := operand [("==" | "=" | "!=" | "<" | "<=" | ">" | ">=") operand]
    operand := INT | STRING | "$"INT | "true" | "false" | "screen"
             | FLAG "(" widget ")" | "text" "(" widget ")" | VARIABLE

``widget`` is a widget name or numeric id; ``$0, $1, ...`` are predicate
arguments.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from typing import Any, Callable, Mapping

FLAGS = ("displayed", "clickable", "long_clickable", "editable", "scrollable", "enabled")

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<num>-?\d+)
    | (?P<str>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
    | (?P<arg>\$\d+)
    | (?P<op>==|!=|<=|>=|&&|[<>=(),])
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    )""", re.VERBOSE)

_CMP = {
    "==": operator.eq, "=": operator.eq, "!=": operator.ne,
    "<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


class ExprError(ValueError):
    pass


def _tokenize(src: str) -> list:
    out, pos = [], 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExprError(f"unexpected character at {pos} in {src!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


@dataclass(frozen=True)
class Expr:
    """A compiled expression.

    ``atoms`` lists each conjunct as ``(operand-key, op, literal)`` when it
    compares an operand against a literal, else ``None``; the model loader
    uses it to prove two guards disjoint.
    """

    source: str
    arity: int
    atoms: tuple
    _fn: Callable[[Any, tuple], Any]

    def __call__(self, env, args: tuple = ()) -> Any:
        return self._fn(env, args)


def compile_expr(src: str, *, variables: Mapping[str, Any],
                 widgets: Mapping[str, int], widget_ids) -> Expr:
    """Compile ``src``; unknown variables or widgets raise :class:`ExprError`.

    ``env`` passed at evaluation time must offer ``screen``, ``vars`` and
    ``widget_value(widget_id, attribute)``.
    """
    toks = _tokenize(src)
    pos = 0
    arity = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take(kind=None, value=None):
        nonlocal pos
        k, v = peek()
        if k is None or (kind and k != kind) or (value and v != value):
            raise ExprError(f"expected {value or kind} in {src!r}, got {v!r}")
        pos += 1
        return v

    def widget_ref() -> int:
        k, v = peek()
        take()
        if k == "num" and int(v) in widget_ids:
            return int(v)
        if k == "ident" and v in widgets:
            return widgets[v]
        raise ExprError(f"unknown widget {v!r} in {src!r}")

    def operand():
        nonlocal arity
        k, v = peek()
        if k == "num":
            take()
            n = int(v)
            return ("lit", n), (lambda env, args: n)
        if k == "str":
            take()
            s = bytes(v[1:-1], "utf-8").decode("unicode_escape")
            return ("lit", s), (lambda env, args: s)
        if k == "arg":
            take()
            i = int(v[1:])
            arity = max(arity, i + 1)
            return ("arg", i), (lambda env, args: args[i])
        if k == "ident":
            take()
            if v in ("true", "false"):
                b = int(v == "true")
                return ("lit", b), (lambda env, args: b)
            if v == "screen":
                return ("screen",), (lambda env, args: env.screen)
            if v == "text" or v in FLAGS:
                take("op", "(")
                wid = widget_ref()
                take("op", ")")
                attr = v
                return (attr, wid), (lambda env, args: env.widget_value(wid, attr))
            if v not in variables:
                raise ExprError(f"undeclared variable {v!r} in {src!r}")
            return ("var", v), (lambda env, args: env.vars[v])
        raise ExprError(f"unexpected {v!r} in {src!r}")

    def compare():
        lkey, lhs = operand()
        k, v = peek()
        if k == "op" and v in _CMP:
            take()
            rkey, rhs = operand()
            op = _CMP[v]

            def fn(env, args):
                a, b = lhs(env, args), rhs(env, args)
                try:
                    return op(a, b)
                except TypeError:
                    return False

            atom = None
            if rkey[0] == "lit" and lkey[0] != "lit":
                atom = (lkey, "==" if v == "=" else v, rkey[1])
            return atom, fn
        return None, (lambda env, args: bool(lhs(env, args)))

    atoms, fns = [], []
    while True:
        atom, fn = compare()
        atoms.append(atom)
        fns.append(fn)
        k, v = peek()
        if (k == "op" and v == "&&") or (k == "ident" and v == "and"):
            take()
            continue
        break
    if pos != len(toks):
        raise ExprError(f"trailing input in {src!r}")

    def conj(env, args):
        return all(f(env, args) for f in fns)

    return Expr(src, arity, tuple(atoms), conj)


def provably_disjoint(a: Expr, b: Expr) -> bool:
    """True when some conjunct of ``a`` contradicts some conjunct of ``b``."""
    for x in a.atoms:
        for y in b.atoms:
            if x is None or y is None or x[0] != y[0]:
                continue
            (_, opx, vx), (_, opy, vy) = x, y
            if opx == "==" and opy == "==" and vx != vy:
                return True
            if {opx, opy} == {"==", "!="} and vx == vy:
                return True
    return False
