"""Command-line front end.

Exit codes: 0 when nothing crashed or failed, 1 when some run crashed or
failed an assertion (or a trace is not a member), 2 for unreadable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..coordinator import (
    ResetPolicy, SuiteConfig, WildcardInReplay, format_summary, render_report,
    replay, run_suite,
)
from ..denote import denotes
from ..gen import sample, split_seed
from ..sim import load_model
from ..sim.model import AmbiguityError, RefError, SchemaError
from ..trace import Crash, Fail, render
from .parser import ParseDiagnostic, parse_script, parse_trace

SEED_ENV = "UIPROP_SEED"

__all__ = ["main", "SEED_ENV"]


class _InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None


def _model(path: str):
    try:
        return load_model(json.loads(_read(path)))
    except json.JSONDecodeError as exc:
        raise _InputError(f"{path}: invalid JSON: {exc}") from None
    except (SchemaError, RefError, AmbiguityError) as exc:
        raise _InputError(f"{path}: {type(exc).__name__}: {exc}") from None


def _script(path: str, names=None):
    try:
        return parse_script(_read(path), names)
    except ParseDiagnostic as exc:
        raise _InputError(f"{path}:{exc}") from None


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _InputError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def cmd_run(args, out) -> int:
    model = _model(args.model)
    check = _script(args.script, model.names).check
    seed = args.seed if args.seed is not None else (
        check.seed if check.seed is not None else _default_seed())
    samples = args.samples or check.samples or 100
    cfg = SuiteConfig(
        samples=samples, seed=seed,
        pool_size=args.pool or (os.cpu_count() or 1),
        reset_policy=ResetPolicy(args.reset or check.reset or "reinstall"),
        property=check.property,
    )
    if args.only_index is not None and not 0 <= args.only_index < samples:
        raise _InputError(f"--only-index must be in 0..{samples - 1}")
    summary, reports = run_suite(check.gen, model, cfg, only_index=args.only_index)
    names = model.id_names
    for r in reports:
        if args.format == "jsonl":
            print(r.to_json(), file=out)
        else:
            print(f"[{r.index}] {render_report(r, names)}", file=out)
    print(format_summary(summary), file=out if args.format == "text" else sys.stderr)
    return 0 if summary.ok else 1


def cmd_sample(args, out) -> int:
    check = _script(args.script).check
    seed = args.seed if args.seed is not None else _default_seed()
    for i in range(args.n):
        print(render(sample(check.gen, split_seed(seed, i))), file=out)
    return 0


def cmd_check_member(args, out) -> int:
    check = _script(args.script).check
    try:
        t = parse_trace(args.trace)
    except ParseDiagnostic as exc:
        raise _InputError(f"trace:{exc}") from None
    member = denotes(check.gen, t)
    print("member" if member else "not-member", file=out)
    return 0 if member else 1


def cmd_replay(args, out) -> int:
    model = _model(args.model)
    try:
        t = parse_trace(args.trace, model.names)
        result = replay(t, model)
    except ParseDiagnostic as exc:
        raise _InputError(f"trace:{exc}") from None
    except WildcardInReplay as exc:
        raise _InputError(f"WildcardInReplay: {exc}") from None
    print(render_report(result, model.id_names), file=out)
    return 1 if isinstance(result.outcome, (Crash, Fail)) else 0


def cmd_validate(args, out) -> int:
    model = _model(args.model)
    print(f"ok: {model.name}: {len(model.screens)} screens, {len(model.widgets)} widgets, "
          f"{len(model.transitions)} transitions", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uiprop", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a script's check against an app model")
    r.add_argument("model")
    r.add_argument("script")
    r.add_argument("--samples", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--pool", type=int)
    r.add_argument("--only-index", type=int)
    r.add_argument("--reset", choices=("reinstall", "keep"))
    r.add_argument("--format", choices=("text", "jsonl"), default="text")
    r.set_defaults(fn=cmd_run)

    s = sub.add_parser("sample", help="print sampled traces")
    s.add_argument("script")
    s.add_argument("-n", type=int, default=10)
    s.add_argument("--seed", type=int)
    s.set_defaults(fn=cmd_sample)

    c = sub.add_parser("check-member", help="is a trace generated by the script?")
    c.add_argument("script")
    c.add_argument("trace")
    c.set_defaults(fn=cmd_check_member)

    rp = sub.add_parser("replay", help="run one concrete trace on a fresh device")
    rp.add_argument("model")
    rp.add_argument("trace")
    rp.set_defaults(fn=cmd_replay)

    v = sub.add_parser("validate-model", help="load and check an app model")
    v.add_argument("model")
    v.set_defaults(fn=cmd_validate)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    for flag in ("samples", "pool", "n"):
        value = getattr(args, flag, None)
        if value is not None and value < (0 if flag == "n" else 1):
            print(f"uiprop: error: --{flag} is out of range", file=sys.stderr)
            return 2
    try:
        return args.fn(args, out)
    except _InputError as exc:
        print(f"uiprop: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
