"""Does typed text survive a screen rotation?

The same property is checked on an app whose reply box is rebuilt on
rotation and on a copy where the box keeps its state.
"""

from __future__ import annotations

from uiprop import SuiteConfig, load_fixture, load_model, render_report, run_suite
from uiprop.cli.parser import parse_gen
from uiprop.sim import fixture_document

CHECK = 'Type(#edit,"Hi") :>> { Rotate preserves hasText(#edit,"Hi") }'


def main() -> None:
    lossy = load_fixture("rotate-loses-text")
    doc = fixture_document("rotate-loses-text")
    doc["lifecycle"]["rotate"]["volatile"] = []
    keeps = load_model(doc)
    for label, model in [("rebuilt on rotate", lossy), ("keeps state", keeps)]:
        g = parse_gen(CHECK, model.names)
        summary, reports = run_suite(g, model, SuiteConfig(samples=5, seed=1))
        print(f"{label}: {render_report(reports[0], model.id_names)}")
        print(f"  passed {summary.passed}/{summary.total}")


if __name__ == "__main__":
    main()
