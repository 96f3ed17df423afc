"""Sign in while the device keeps getting interrupted.

Runs the sign-in script against two versions of the login app: the
shipped one, and one where resuming on the credentials screen wipes the
password field.  The second version fails the "Welcome" assertion once
an interrupt lands after the password was typed.

    python3 demos/signin_with_interrupts.py
"""

from __future__ import annotations

from pathlib import Path

from uiprop import SuiteConfig, load_fixture, load_model, render_report, run_suite
from uiprop.cli.parser import parse_script
from uiprop.sim import fixture_document

SCRIPT = Path(__file__).with_name("scripts") / "signin.chimp"


def forgetful_model():
    doc = fixture_document("login-player")
    doc.setdefault("lifecycle", {}).setdefault("suspend", {})["volatile"] = ["password"]
    return load_model(doc)


def main() -> None:
    for label, model in [("shipped", load_fixture("login-player")),
                         ("forgets password", forgetful_model())]:
        check = parse_script(SCRIPT.read_text("utf-8"), model.names).check
        summary, reports = run_suite(check.gen, model, SuiteConfig(samples=100, seed=2))
        print(f"{label}: passed {summary.passed}/{summary.total}, failed {summary.failed}")
        bad = summary.first_failure
        if bad is not None:
            print("  e.g.", render_report(bad, model.id_names))


if __name__ == "__main__":
    main()
