"""Random generator trees and trace mutations shared by the tests."""

from __future__ import annotations

import random

from uiprop.gen import (
    AlphaStr, AssertG, ChoiceG, Choose, ClickG, Const, DeviceG, LongClickG, OneOf,
    Pair, PinchG, RepeatG, SeqG, SkipG, SleepG, SwipeG, ThenG, TryG, TypeG, UnitG, Wild,
)
from uiprop.trace import (
    And, Assert, Click, Device, LongClick, Not, Num, Pinch, Pred, Skip, Sleep, Swipe,
    Text, Then, Try, Type, Xy, atoms, normalize, seq,
)

PROPS = (
    Pred("isDisplayed", ("Welcome",)),
    Pred("count", (1,)),
    Not(Pred("ready")),
    And(Pred("a"), Pred("b", (2, "x"))),
)
IDS = (Num(1), Num(2), Text("ok"), Xy(3, 4))


def _id_gen(rng: random.Random):
    r = rng.random()
    if r < 0.5:
        return Const(rng.choice(IDS))
    if r < 0.8:
        return OneOf(tuple(rng.sample(IDS, rng.randint(1, 3))))
    return Wild()


def _int_gen(rng: random.Random, finite: bool, lo: int = 0):
    r = rng.random()
    if r < 0.4:
        return Const(rng.randint(lo, lo + 9))
    if r < 0.7:
        start = rng.randint(lo, lo + 20)
        return Choose(start, start + rng.randint(0, 2 if finite else 5000))
    return OneOf(tuple(rng.sample(range(lo, lo + 10), rng.randint(1, 3))))


def _str_gen(rng: random.Random, finite: bool):
    r = rng.random()
    if r < 0.4:
        return Const(rng.choice(("a", "test", "")))
    if r < 0.7 or finite:
        return OneOf(tuple(rng.sample(("a", "bc", "test", "1234"), rng.randint(1, 2))))
    return AlphaStr(rng.randint(0, 4))


def _xy_gen(rng: random.Random, finite: bool, points: bool):
    lo = 0 if points else -5
    if rng.random() < 0.5:
        return Const(Xy(rng.randint(0, 9), rng.randint(0, 9)))
    return Pair(_int_gen(rng, finite, lo), _int_gen(rng, finite, lo))


def random_leaf(rng: random.Random, finite: bool = False):
    k = rng.randrange(10)
    if k == 0:
        return ClickG(_id_gen(rng))
    if k == 1:
        return LongClickG(_id_gen(rng))
    if k == 2:
        return TypeG(_id_gen(rng), _str_gen(rng, finite))
    if k == 3:
        return SwipeG(_id_gen(rng), _xy_gen(rng, finite, points=False))
    if k == 4:
        return PinchG(_xy_gen(rng, finite, True), _xy_gen(rng, finite, True))
    if k == 5:
        return SleepG(_int_gen(rng, finite))
    if k == 6:
        return SkipG()
    if k == 7:
        return DeviceG(rng.choice(list(Device)))
    if k == 8:
        return AssertG(rng.choice(PROPS))
    return UnitG()


def random_gen(rng: random.Random, depth: int = 6, finite: bool = False, max_repeat: int = 3):
    """A random generator tree at most ``depth`` levels deep."""
    if depth <= 1 or rng.random() < 0.3:
        return random_leaf(rng, finite)
    k = rng.randrange(5)
    sub = lambda: random_gen(rng, depth - 1, finite, max_repeat)  # noqa: E731
    if k == 0:
        return SeqG(sub(), sub())
    if k == 1:
        return ChoiceG(sub(), sub())
    if k == 2:
        return TryG(sub())
    if k == 3:
        return ThenG(rng.choice(PROPS), sub())
    return RepeatG(rng.randint(1, max_repeat), sub())


_EXTRA = (Skip(), Device.Rotate, Click(Num(99)), Assert(Pred("zz")), Try(Skip()))


def _tweak(a, rng: random.Random):
    """A nearby atom: same shape, one argument changed."""
    if isinstance(a, (Click, LongClick)):
        t = a.target
        return type(a)(Num(t.n + 1) if isinstance(t, Num) else Num(1))
    if isinstance(a, Type):
        return Type(a.target, a.text + "x")
    if isinstance(a, Swipe):
        return Swipe(a.target, Xy(a.delta.x + 1, a.delta.y))
    if isinstance(a, Pinch):
        return Pinch(a.end, a.start) if a.start != a.end else Pinch(a.start, Xy(a.end.x + 1, 0))
    if isinstance(a, Sleep):
        return Sleep(a.ms + 1)
    if isinstance(a, Device):
        return rng.choice([d for d in Device if d is not a])
    if isinstance(a, Assert):
        return Assert(Not(a.prop))
    if isinstance(a, Try):
        return Try(mutate(a.body, rng))
    if isinstance(a, Then):
        return Then(a.prop, mutate(a.body, rng)) if rng.random() < 0.7 else Then(Not(a.prop), a.body)
    return Device.Rotate


def mutate(t, rng: random.Random):
    """One structured edit of ``t``: drop, duplicate, swap, insert, tweak, wrap or unwrap."""
    xs = list(atoms(normalize(t)))
    k = rng.randrange(7)
    i = rng.randrange(len(xs)) if xs else 0
    if k == 0 and xs:
        del xs[i]
    elif k == 1 and xs:
        xs.insert(i, xs[i])
    elif k == 2 and len(xs) > 1:
        j = min(i + 1, len(xs) - 1)
        i = j - 1
        xs[i], xs[j] = xs[j], xs[i]
    elif k == 3 or not xs:
        xs.insert(i, rng.choice(_EXTRA))
    elif k == 4:
        xs[i] = _tweak(xs[i], rng)
    elif k == 5:
        xs[i] = Try(xs[i])
    else:
        a = xs[i]
        if isinstance(a, (Try, Then)):
            xs[i:i + 1] = list(atoms(a.body))
        else:
            xs[i] = _tweak(a, rng)
    return seq(xs)


def playground_doc() -> dict:
    """A two-screen model whose ids and predicates cover IDS and PROPS."""
    return {
        "name": "playground",
        "initial_screen": "main",
        "variables": {"clicks": 0, "a": 0},
        "screens": {
            "main": {"widgets": [
                {"id": 1, "name": "go", "text": "ok", "xy": [0, 0], "bounds": [10, 10],
                 "clickable": True, "editable": True},
                {"id": 2, "name": "pad", "text": "Welcome", "xy": [20, 20], "bounds": [50, 50],
                 "long_clickable": True, "scrollable": True, "clickable": True},
            ]},
            "other": {"widgets": [
                {"id": 3, "name": "back", "text": "ok", "xy": [0, 0], "bounds": [10, 10],
                 "clickable": True},
            ]},
        },
        "transitions": [
            {"screen": "main", "on": "Click", "target": "go",
             "effects": [{"set": "clicks", "add": 1}, {"goto": "other"}]},
            {"screen": "main", "on": "LongClick", "target": "pad",
             "effects": [{"set": "a", "value": 1}]},
            {"screen": "other", "on": "Click", "target": "back", "effects": [{"goto": "main"}]},
            {"screen": "other", "on": "ClickBack", "effects": [{"goto": "main"}]},
        ],
        "lifecycle": {"rotate": {"volatile": ["go"]}},
        "predicates": {
            "count": "clicks == $0",
            "ready": "screen == \"main\"",
            "a": "a == 1",
            "b": "$0 == 2 && $1 == \"x\"",
        },
    }
