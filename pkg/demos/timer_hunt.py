"""Hunting the timer crash with random testers.

The timer app crashes when its countdown fires after the user has left
the timer screen.  A monkey that taps random coordinates rarely gets that
far.  One restricted to the widgets on screen usually does.  This counts
how many events each tester spends before the first crash, over ten
seeds, giving up after 500.
"""

from __future__ import annotations

import statistics

from uiprop import SuiteConfig, load_fixture, monkey, relevant_monkey
from uiprop.coordinator import run_one
from uiprop.trace import Crash

CAP = 500


def events_to_crash(g, model, seed: int) -> int:
    cfg = SuiteConfig(samples=100, seed=seed, pool_size=1)
    spent = 0
    for i in range(100):
        r = run_one(i, g, model, cfg)
        if isinstance(r.outcome, Crash):
            return min(spent + r.events, CAP)
        spent += r.events
        if spent >= CAP:
            break
    return CAP


def main() -> None:
    model = load_fixture("buggy-timer")
    for label, g in [("relevant monkey", relevant_monkey(500)), ("monkey", monkey(500))]:
        counts = [events_to_crash(g, model, 1000 + s) for s in range(10)]
        found = sum(c < CAP for c in counts)
        print(f"{label:>15}: crash found on {found}/10 seeds, "
              f"mean {statistics.mean(counts):.1f} events")


if __name__ == "__main__":
    main()
