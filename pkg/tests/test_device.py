from __future__ import annotations

import json
import random

import pytest
from support import playground_doc

from uiprop.driver import StepBudgetExceeded
from uiprop.sim import (
    AmbiguityError, DeviceState, RefError, SchemaError, UnknownPredicate, fixture_document,
    fixture_names, load_fixture, load_model,
)
from uiprop.trace import (
    WILDCARD, Click, CrashReport, Device, Implies, LongClick, Named, Not, Num, Pinch, Pred,
    Skip, Sleep, Swipe, Text, Type, Xy,
)


def settled(dev: DeviceState) -> DeviceState:
    assert dev.settle() is None
    return dev


def tiny(**extra) -> dict:
    doc = {
        "initial_screen": "main",
        "variables": {"n": 0},
        "screens": {"main": {"widgets": [
            {"id": 1, "name": "btn", "text": "Go", "xy": [0, 0], "bounds": [100, 100],
             "clickable": True},
        ]}},
        "transitions": [],
    }
    doc.update(extra)
    return doc


# --- loading ----------------------------------------------------------------


def test_counter_fixture_loads():
    model = load_fixture("counter")
    assert list(model.screens) == ["main"]
    assert model.names == {"cnt": 1}
    assert model.variables == {"clicks": 0}
    assert len(model.transitions) == 1


def test_all_fixtures_load():
    assert fixture_names() == ["buggy-timer", "counter", "login-player", "resume-npe",
                               "rotate-loses-text"]
    for name in fixture_names():
        assert load_fixture(name).name == name


def test_load_from_string_and_path(tmp_path):
    doc = fixture_document("counter")
    path = tmp_path / "counter.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert load_model(json.dumps(doc)).names == load_model(str(path)).names == {"cnt": 1}
    assert load_model(path).initial_screen == "main"


@pytest.mark.parametrize("edit, error", [
    (lambda d: d.pop("initial_screen"), SchemaError),
    (lambda d: d.pop("screens"), SchemaError),
    (lambda d: d["transitions"][0].update(target="nope"), RefError),
    (lambda d: d["transitions"][0].update(effects=[{"goto": "nowhere"}]), RefError),
    (lambda d: d["transitions"][0].update(effects=[{"set": "ghost", "value": 1}]), RefError),
    (lambda d: d["transitions"][0].update(effects=[{"explode": True}]), SchemaError),
    (lambda d: d["transitions"][0].update(effects=[{"schedule": 3}]), RefError),
    (lambda d: d["predicates"].update(bad="ghost == 1"), RefError),
    (lambda d: d.update(initial_screen="elsewhere"), RefError),
    (lambda d: d["screens"]["main"]["widgets"][0].update(bounds=[0, 10]), SchemaError),
    (lambda d: d["screens"]["main"]["widgets"].append(
        {"id": 1, "text": "dup", "xy": [500, 500]}), SchemaError),
    (lambda d: d["transitions"].append(dict(d["transitions"][0])), AmbiguityError),
    (lambda d: d.update(idle_work=0), SchemaError),
])
def test_load_errors(edit, error):
    doc = fixture_document("counter")
    edit(doc)
    with pytest.raises(error):
        load_model(doc)


def test_disjoint_guards_are_not_overlaps():
    # the three sign-in rules share a trigger but have disjoint guards
    load_fixture("login-player")
    doc = fixture_document("login-player")
    doc["transitions"][2]["when"] = "text(password) == \"1234\""
    with pytest.raises(AmbiguityError):
        load_model(doc)


# --- try_apply --------------------------------------------------------------


def test_click_counts_after_settle():
    dev = DeviceState(load_fixture("counter"))
    assert dev.try_apply(Click(Num(1)))
    assert dev.vars["clicks"] == 0  # effects wait for settle
    settled(dev)
    assert dev.vars["clicks"] == 1
    assert dev.widgets[1]["text"] == "1"
    assert dev.applied_events == 1


def test_missing_widget_is_disabled():
    dev = DeviceState(load_fixture("counter"))
    assert not dev.try_apply(Click(Num(99)))
    assert dev.applied_events == 0


def test_typed_text_vanishes_on_rotate():
    model = load_fixture("rotate-loses-text")
    dev = DeviceState(model)
    assert dev.try_apply(Type(Named("edit"), "Hi"))
    assert settled(dev).widgets[1]["text"] == "Hi"
    assert dev.try_apply(Device.Rotate)
    assert settled(dev).widgets[1]["text"] == ""
    assert dev.orientation == "landscape"

    doc = fixture_document("login-player")
    doc["lifecycle"] = {"rotate": {"volatile": ["password"]}}
    dev = DeviceState(load_model(doc))
    for e in (Click(Text("Login")), Type(Num(2), "test"), Type(Num(3), "1234")):
        assert dev.try_apply(e)
        settled(dev)
    dev.try_apply(Device.Rotate)
    settled(dev)
    assert dev.widgets[3]["text"] == "" and dev.widgets[2]["text"] == "test"


def test_capability_flags():
    dev = DeviceState(load_fixture("login-player"))
    assert not dev.try_apply(LongClick(Num(1)))       # not long-clickable
    assert not dev.try_apply(Type(Num(1), "x"))        # not editable
    assert not dev.try_apply(Swipe(Num(1), Xy(0, 5)))  # not scrollable
    assert not dev.try_apply(Click(Num(4)))            # on another screen
    doc = fixture_document("counter")
    doc["screens"]["main"]["widgets"][0]["enabled"] = False
    assert not DeviceState(load_model(doc)).try_apply(Click(Num(1)))


def test_coordinates():
    dev = DeviceState(load_fixture("counter"))  # cnt spans (440..640, 860..1060)
    assert dev.try_apply(Click(Xy(5, 5)))         # dead space
    assert settled(dev).vars["clicks"] == 0
    assert dev.try_apply(Click(Xy(500, 900)))     # hit
    assert settled(dev).vars["clicks"] == 1
    assert not dev.try_apply(LongClick(Xy(500, 900)))  # hit without capability
    assert dev.try_apply(Pinch(Xy(1, 1), Xy(500, 900)))


def test_sleep_skip_and_timers():
    dev = DeviceState(load_fixture("buggy-timer"))
    assert dev.try_apply(Skip()) and dev.clock_ms == 0
    assert dev.try_apply(Click(Named("start")))
    settled(dev)
    assert dev.vars["running"] == 1 and dev.clock_ms == 200
    assert dev.try_apply(Sleep(2000))
    assert settled(dev).vars["running"] == 1
    # scheduled while settling at t=200, so due at t=3200
    assert dev.try_apply(Sleep(999))
    assert settled(dev).vars["running"] == 1
    assert dev.try_apply(Sleep(1))
    assert settled(dev).vars["running"] == 0
    assert dev.widgets[4]["text"] == "Time up"


def test_timer_firing_off_screen_crashes():
    dev = DeviceState(load_fixture("buggy-timer"))
    for e in (Click(Named("start")), Click(Named("tab_scores"))):
        assert dev.try_apply(e)
        settled(dev)
    dev.try_apply(Sleep(5000))
    report = dev.settle()
    assert report.message.startswith("IllegalStateException")
    assert report.screen == "scores" and report.event_index == 3


def test_suspend_and_resume():
    doc = tiny(lifecycle={"suspend": {"volatile": ["btn"]},
                          "on_resume": [{"set": "n", "add": 1}]})
    doc["transitions"] = [{"screen": "main", "on": "Click", "target": "btn",
                           "effects": [{"set_text": "btn", "template": "n={n}"}]}]
    dev = DeviceState(load_model(doc))
    dev.try_apply(Click(Num(1)))
    assert settled(dev).widgets[1]["text"] == "n=0"
    assert dev.try_apply(Device.ClickHome)
    assert not dev.foreground and dev.widgets[1]["text"] == "Go"
    assert not dev.try_apply(Click(Num(1)))
    assert dev.enumerate_candidates(Click(WILDCARD)) == []
    assert dev.ensure_foreground() is True
    assert dev.ensure_foreground() is False
    assert settled(dev).vars["n"] == 1


def test_click_back():
    model = load_fixture("resume-npe")
    dev = DeviceState(model)
    assert not dev.try_apply(Device.ClickBack)  # no dialog, no back rule
    dev.screen = "files"
    dev.try_apply(LongClick(Named("list")))
    settled(dev)
    assert dev.widgets[11]["displayed"]
    assert dev.try_apply(Device.ClickBack)      # dismisses the dialog
    assert not dev.widgets[11]["displayed"] and dev.screen == "files"

    dev = DeviceState(load_fixture("login-player"))
    dev.try_apply(Click(Num(1)))
    settled(dev)
    assert dev.try_apply(Device.ClickBack)
    assert settled(dev).screen == "login"
    assert dev.visited == ["login", "credentials", "login"]


def test_ambiguous_text_is_disabled():
    dev = DeviceState(load_model(playground_doc()))
    dev.try_apply(Click(Num(1)))
    settled(dev)
    assert dev.try_apply(Click(Text("ok")))  # unique on "other"
    settled(dev)
    doc = playground_doc()
    doc["screens"]["main"]["widgets"][1]["text"] = "ok"
    dev = DeviceState(load_model(doc))
    assert not dev.try_apply(Click(Text("ok")))


def test_try_apply_is_total():
    model = load_model(playground_doc())
    rng = random.Random(5)
    ids = [Num(1), Num(2), Num(3), Num(42), Text("ok"), Text("Welcome"), Named("go"),
           Named("ghost"), Xy(5, 5), Xy(30, 30), Xy(900, 900)]
    for _ in range(50):
        dev = DeviceState(model)
        for _ in range(30):
            k = rng.randrange(7)
            i = rng.choice(ids)
            e = [Click(i), LongClick(i), Type(i, "z"), Swipe(i, Xy(1, -1)),
                 rng.choice(list(Device)), Sleep(rng.randrange(100)), Skip()][k]
            assert dev.try_apply(e) in (True, False)
            dev.ensure_foreground()
            assert dev.settle() is None


# --- settle -----------------------------------------------------------------


def test_settle_examples():
    dev = DeviceState(load_fixture("counter"))
    before = dev.snapshot()
    assert dev.settle() is None and dev.snapshot() == before

    doc = tiny(lifecycle={"on_resume": [{"crash": "NullPointerException in onResume",
                                         "frames": ["at Main.onResume(Main.java:40)"]}]})
    dev = DeviceState(load_model(doc))
    dev.try_apply(Device.Settings)
    dev.ensure_foreground()
    report = dev.settle()
    assert report == CrashReport("NullPointerException in onResume", "main",
                                 ("at Main.onResume(Main.java:40)",), 1)
    assert dev.settle() is report
    assert not dev.try_apply(Skip())
    assert dev.enumerate_candidates(Click(WILDCARD)) == []


def test_settle_budget():
    doc = tiny(idle_work=600)
    doc["transitions"] = [{"screen": "main", "on": "Click", "target": "btn",
                           "effects": [{"set": "n", "add": 1}, {"set": "n", "add": 1}]}]
    dev = DeviceState(load_model(doc))
    dev.try_apply(Click(Num(1)))
    with pytest.raises(StepBudgetExceeded):
        dev.settle(budget=1000)


def test_settle_idempotent_and_crash_absorbing():
    model = load_fixture("resume-npe")
    rng = random.Random(11)
    events = [Click(Named("enter")), Type(Named("username"), "test"),
              Type(Named("password"), "1234"), Click(Named("signin")),
              LongClick(Named("list")), Device.Rotate, Click(Named("move")), Device.ClickHome]
    crashes = 0
    for _ in range(100):
        dev = DeviceState(model)
        for e in events[:4]:
            dev.try_apply(e)
            settled(dev)
        for _ in range(12):
            dev.try_apply(rng.choice(events[4:]))
            dev.ensure_foreground()
            first = dev.settle()
            snap = dev.snapshot()
            second = dev.settle()
            assert second == first and dev.snapshot() == snap
            if first is not None:
                crashes += 1
                assert dev.settle() is first
                break
    assert crashes > 0


def test_snapshot_determinism():
    model = load_fixture("buggy-timer")
    events = [Click(Num(1)), Click(Num(2)), Click(Num(3)), Click(Num(11)), Click(Num(14)),
              Sleep(700), Device.Rotate, Device.ClickMenu, Swipe(Num(13), Xy(0, 40))]
    for seed in range(20):
        picks = random.Random(seed).choices(events, k=25)
        snaps = []
        for _ in range(2):
            dev = DeviceState(model)
            for e in picks:
                dev.try_apply(e)
                dev.ensure_foreground()
                dev.settle()
            snaps.append(json.dumps(dev.snapshot(), sort_keys=True))
        assert snaps[0] == snaps[1]


def test_copy_is_independent():
    dev = DeviceState(load_fixture("counter"))
    other = dev.copy()
    dev.try_apply(Click(Num(1)))
    settled(dev)
    assert other.vars["clicks"] == 0 and other.widgets[1]["text"] == "0"


# --- holds and candidates ---------------------------------------------------


def _signed_in():
    dev = DeviceState(load_fixture("login-player"))
    for e in (Click(Num(1)), Type(Num(2), "test"), Type(Num(3), "1234"), Click(Num(4))):
        assert dev.try_apply(e)
        settled(dev)
    return dev


def test_holds_examples():
    dev = _signed_in()
    assert dev.holds(Pred("isDisplayed", ("Welcome",)))
    assert dev.holds(Implies(Pred("isDisplayed", ("nothing here",)), Pred("ghostly")))
    assert not dev.holds(Pred("isDisplayed", (Named("stop"),)))
    assert dev.holds(Pred("isClickable", (Named("play"),)))
    assert not dev.holds(Pred("isDisplayed", (Named("unknown"),)))
    assert not dev.holds(Pred("isDisplayed", (999,)))
    assert dev.holds(Not(Pred("mediaPlayerIsPlaying")))
    assert dev.holds(Pred("hasText", (Named("welcome"), "Welcome")))

    counter = DeviceState(load_fixture("counter"))
    counter.try_apply(Click(Num(1)))
    settled(counter)
    assert counter.holds(Pred("count", (1,)))
    assert not counter.holds(Pred("count", (0,)))


def test_unknown_predicates():
    dev = DeviceState(load_fixture("counter"))
    with pytest.raises(UnknownPredicate):
        dev.holds(Pred("nope"))
    with pytest.raises(UnknownPredicate):
        dev.holds(Pred("count", (1, 2)))
    with pytest.raises(UnknownPredicate):
        dev.holds(Pred("hasText", ("x",)))


def test_enumerate_candidates_examples():
    dev = DeviceState(load_fixture("login-player"))
    assert dev.enumerate_candidates(Click(WILDCARD)) == [Num(1)]
    assert dev.enumerate_candidates(Type(WILDCARD, "x")) == []
    player = _signed_in()
    assert player.enumerate_candidates(Click(WILDCARD)) == [Num(7)]
    assert player.enumerate_candidates(Swipe(WILDCARD, Xy(0, 1))) == []


def test_enumerate_includes_shown_dialogs():
    dev = DeviceState(load_fixture("resume-npe"))
    dev.screen = "files"
    assert dev.enumerate_candidates(Click(WILDCARD)) == [Num(10)]
    dev.try_apply(LongClick(Num(10)))
    settled(dev)
    assert dev.enumerate_candidates(Click(WILDCARD)) == [Num(10), Num(11)]
    assert dev.enumerate_candidates(LongClick(WILDCARD)) == [Num(10)]


@pytest.mark.parametrize("volatile", [True, False])
def test_rotate_volatility(volatile):
    doc = fixture_document("rotate-loses-text")
    if not volatile:
        doc["lifecycle"]["rotate"]["volatile"] = []
    dev = DeviceState(load_model(doc))
    for text in ("a", "bc", "Hello world"):
        dev.try_apply(Type(Num(1), text))
        settled(dev)
        before = dev.widgets[1]["text"]
        dev.try_apply(Device.Rotate)
        settled(dev)
        assert dev.holds(Pred("hasText", (Named("edit"), before))) is not volatile
        if volatile:
            assert dev.widgets[1]["text"] == ""
