"""Derived generators built from the core ones.

None of these add expressive power: each is a plain function returning an
ordinary :class:`~uiprop.gen.Gen` tree, so sampling, membership and
enumeration work on them unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gen import (
    AlphaStr, ArgGen, AssertG, ChoiceG, Choose, ClickG, DeviceG, Gen, LongClickG,
    Pair, PinchG, RepeatG, SeqG, SkipG, SleepG, SwipeG, TryG, TypeG, Wild, choice,
)
from .trace import Device, Prop

__all__ = [
    "INTERRUPTS", "interrupts", "interruptible_seq", "preserves", "optional",
    "MonkeyArgs", "coordinate_pool", "relevant_pool", "monkey", "relevant_monkey",
    "gorilla",
]

INTERRUPTS = (Device.ClickHome, Device.ClickMenu, Device.Settings, Device.Rotate)


def interrupts() -> Gen:
    """A choice among the app-interrupting device events."""
    return choice(*(DeviceG(d) for d in INTERRUPTS))


def interruptible_seq(g1: Gen, g2: Gen, m: int = 3) -> Gen:
    """``g1``, then 1 to ``m`` interrupt events, then ``g2``."""
    if m < 1:
        raise ValueError("interrupt bound must be >= 1")
    return SeqG(g1, SeqG(RepeatG(m, interrupts()), g2))


def preserves(g: Gen, p: Prop) -> Gen:
    """Check ``p`` before and after ``g``."""
    return SeqG(AssertG(p), SeqG(g, AssertG(p)))


def optional(g: Gen) -> Gen:
    return ChoiceG(g, SkipG())


@dataclass(frozen=True)
class MonkeyArgs:
    """Argument generators used by the random-exercising pools.

    The defaults cover a 1080x1920 portrait screen.
    """

    xy: ArgGen = field(default_factory=lambda: Pair(Choose(0, 1079), Choose(0, 1919)))
    delta: ArgGen = field(default_factory=lambda: Pair(Choose(-540, 540), Choose(-960, 960)))
    text: ArgGen = field(default_factory=lambda: AlphaStr(8))
    sleep: ArgGen = field(default_factory=lambda: Choose(0, 5000))


def coordinate_pool(args: MonkeyArgs = MonkeyArgs()) -> Gen:
    """Events at random screen points, each allowed to block."""
    return choice(
        TryG(ClickG(args.xy)), TryG(LongClickG(args.xy)),
        TryG(TypeG(args.xy, args.text)), TryG(SwipeG(args.xy, args.delta)),
        TryG(PinchG(args.xy, args.xy)), TryG(SleepG(args.sleep)),
    )


def relevant_pool(args: MonkeyArgs = MonkeyArgs()) -> Gen:
    """Like :func:`coordinate_pool` but widget events pick from what is on screen."""
    return choice(
        TryG(ClickG(Wild())), TryG(LongClickG(Wild())),
        TryG(TypeG(Wild(), args.text)), TryG(SwipeG(Wild(), args.delta)),
        TryG(PinchG(args.xy, args.xy)), TryG(SleepG(args.sleep)),
    )


def monkey(n: int, args: MonkeyArgs = MonkeyArgs()) -> Gen:
    return RepeatG(n, ChoiceG(coordinate_pool(args), interrupts()))


def relevant_monkey(n: int, args: MonkeyArgs = MonkeyArgs()) -> Gen:
    return RepeatG(n, ChoiceG(relevant_pool(args), interrupts()))


def gorilla(n: int, g: Gen, relevant: bool = True, args: MonkeyArgs = MonkeyArgs()) -> Gen:
    """Random exercising with ``g`` injected before every random step.

    ``relevant=False`` draws the random step from the coordinate pool
    instead of the view-hierarchy pool.
    """
    pool = relevant_pool(args) if relevant else coordinate_pool(args)
    return RepeatG(n, SeqG(g, ChoiceG(pool, interrupts())))
