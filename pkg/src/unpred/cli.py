"""Command line interface: ``unpred <subcommand>``.

Exit codes: 0 success, 1 usage or data error, 2 no solution exists,
3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import dot
from .automata import AlphabetTooLarge, LabelOutsideAlphabet
from .formula import FormulaError
from .pipeline import prepare
from .product import AlphabetMismatch
from .synthesis import (Controller, HorizonTooLarge, NoSolution, attractor, build_aes,
                        extract, synthesize)
from .system import ModelError, UnknownState, add_stop, load_model, validate
from .verify import (UndefinedControl, build_closed_loop, mealy_from_json,
                     verify_controller)

EXIT_OK, EXIT_ERROR, EXIT_NO_SOLUTION, EXIT_CHECK_FAILED = 0, 1, 2, 3
DOT_TARGETS = ("dfa", "product", "aes", "det")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for "no solution"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if not text.endswith("\n"):
        text += "\n"
    path.write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_ts(args):
    try:
        ts = load_model(args.model)
    except OSError as exc:
        raise UsageError(f"cannot read model {args.model}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"model {args.model} is not valid JSON: {exc}") from None
    if getattr(args, "add_stop", None):
        ts = add_stop(ts, [s for s in args.add_stop.split(",") if s])
    return ts


def _problem(args):
    ts = _load_ts(args)
    report = validate(ts)
    if not report.ok:
        raise UsageError("model violates standing assumptions:\n  " + "\n  ".join(report.messages()))
    f, a, prod = prepare(ts, args.formula, minimal=not args.no_minimize)
    return ts, a, prod


def _check_k(k: int) -> int:
    if k < 0:
        raise UsageError("--k must be non-negative")
    return k


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    ts = _load_ts(args)
    report = validate(ts)
    if report.ok:
        print(f"model ok: {len(ts.states)} states, {len(ts.inputs)} inputs, "
              f"{len(ts.observation_set)} observations")
        return EXIT_OK
    for msg in report.messages():
        print(msg)
    return EXIT_ERROR


def cmd_compile(args) -> int:
    ts, a, prod = _problem(args)
    print(f"automaton: {a.n_states} states (f_states={sorted(a.short_name(s) for s in a.f_states)})")
    for s in a.states:
        print(f"  {a.short_name(s)}: {a.name(s)}")
    print(f"product: {len(prod.states)} states, X_F={sorted(prod.xf)}, "
          f"X_F+s_F={sorted(prod.xf_or_sink)}")
    for x in prod.states:
        print(f"  {prod.describe(x)}")
    if args.dot:
        _write(Path(args.dot), dot.dfa_to_dot(a))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    _check_k(args.k)
    ts, a, prod = _problem(args)
    res = synthesize(prod, args.k)
    out = Path(args.out)
    targets = args.dot or []
    stem = out.with_suffix("")
    for target in targets:
        text = _export_text(target, a, prod, res.aes, res.det)
        if text is not None:
            _write(Path(f"{stem}.{target}.dot"), text)
    print(f"AES: {len(res.aes.y_states)} Y-states, {len(res.aes.z_states)} Z-states")
    if not res.ok:
        print("no solution exists")
        return EXIT_NO_SOLUTION
    _write(out, _dump(res.controller.to_json()))
    print(f"controller written to {out}")
    for obs, u in _policy_lines(res.controller, prod):
        print(f"  C({' '.join(obs)}) = {u}")
    return EXIT_OK


def _policy_lines(ctrl: Controller, prod, max_len: int = 12):
    """Input for each observation sequence of the closed loop up to ``max_len``."""
    cl = build_closed_loop(prod, ctrl.to_mealy())
    seen = set()
    out = []
    stack = [(cl.initial,)]
    while stack:
        p = stack.pop()
        obs = tuple(cl.obs(c) for c in p)
        if obs not in seen:
            seen.add(obs)
            out.append((obs, ctrl(obs)))
        if len(p) < max_len and p[-1][0] not in prod.xf_or_sink:
            stack.extend(p + (d,) for _, d in cl.edges[p[-1]])
    return sorted(out, key=lambda t: (len(t[0]), t[0]))


def _load_policy(args, prod):
    if bool(args.controller) == bool(args.baseline):
        raise UsageError("give exactly one of --controller or --baseline")
    path = args.controller or args.baseline
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None
    try:
        if args.controller:
            return Controller.from_json(data, prod).to_mealy()
        return mealy_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed policy file {path}: {exc}") from None


def cmd_verify(args) -> int:
    _check_k(args.k)
    ts, a, prod = _problem(args)
    mealy = _load_policy(args, prod)
    report = verify_controller(prod, mealy, args.k)
    sys.stdout.write(_dump(report))
    ok = report["live"] and report["task"] and report["unpredictable"]
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_simulate(args) -> int:
    ts, a, prod = _problem(args)
    mealy = _load_policy(args, prod)
    cl = build_closed_loop(prod, mealy)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    cfg = cl.initial
    done = False
    for step in range(args.steps + 1):
        x = cfg[0]
        region = prod.pairs[x][0]
        flag = ""
        if x in prod.xf and not done:
            flag = "  <- task completed"
            done = True
        edges = cl.edges[cfg]
        u = edges[0][0] if edges else "-"
        if step == args.steps or not edges:
            u = "-"
        print(f"{step:4d}  {x:>4}  region={region}  obs={prod.obs(x)}  input={u}{flag}")
        if step == args.steps or not edges:
            break
        cfg = edges[int(rng.integers(len(edges)))][1]
    return EXIT_OK


def _export_text(target, a, prod, aes=None, det=None):
    if target == "dfa":
        return dot.dfa_to_dot(a)
    if target == "product":
        return dot.product_to_dot(prod)
    if target == "aes":
        return dot.bts_to_dot(aes, "aes")
    if target == "det":
        return None if det is None else dot.bts_to_dot(det, "det")
    raise UsageError(f"unknown DOT target {target!r}")


def cmd_export(args) -> int:
    ts, a, prod = _problem(args)
    targets = args.dot or list(DOT_TARGETS)
    aes = det = None
    if {"aes", "det"} & set(targets):
        _check_k(args.k)
        aes = build_aes(prod, args.k)
        try:
            det = extract(aes, attractor(aes))
        except NoSolution:
            det = None
    out = Path(args.out)
    for target in targets:
        text = _export_text(target, a, prod, aes, det)
        if text is None:
            print(f"skipping {target}: no solution exists")
            continue
        _write(out / f"{target}.dot", text)
        print(f"wrote {out / f'{target}.dot'}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="unpred", description=(
        "Synthesize controllers that complete a co-safe LTL task while keeping "
        "the completion instant unpredictable K steps ahead."))
    sub = p.add_subparsers(dest="command", required=True)

    def model_args(sp, formula=True):
        sp.add_argument("--model", required=True, help="model JSON file")
        sp.add_argument("--add-stop", metavar="STATES", default=None,
                        help="comma separated states that get a move to a fresh absorbing stop state")
        if formula:
            sp.add_argument("--formula", required=True, help='task, e.g. "F(p1 & F p2)"')
            sp.add_argument("--no-minimize", action="store_true",
                            help="keep the unminimized task automaton")

    sp = sub.add_parser("validate", help="check the model's standing assumptions")
    model_args(sp, formula=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("compile", help="compile the task automaton and product")
    model_args(sp)
    sp.add_argument("--dot", default=None, metavar="FILE", help="write the automaton as DOT")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("synthesize", help="synthesize an unpredictable controller")
    model_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out", default="controller.json")
    sp.add_argument("--dot", action="append", choices=DOT_TARGETS,
                    help="also write <out>.<target>.dot (repeatable)")
    sp.set_defaults(func=cmd_synthesize)

    sp = sub.add_parser("verify", help="check a controller against the task and the intruder")
    model_args(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--controller", default=None, help="controller JSON from synthesize")
    sp.add_argument("--baseline", default=None, metavar="POLICY",
                    help="hand-written policy JSON (positional or explicit machine)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="sample one closed-loop run")
    model_args(sp)
    sp.add_argument("--controller", default=None)
    sp.add_argument("--baseline", default=None, metavar="POLICY")
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("export", help="write DOT files")
    model_args(sp)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--dot", action="append", choices=DOT_TARGETS)
    sp.add_argument("--out", default=".", help="output directory")
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("UNPRED_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= getattr(args, "seed", 0) < 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    if args.command == "export" and {"aes", "det"} & set(args.dot or DOT_TARGETS) and args.k is None:
        parser.error("--k is required to export aes/det")
    try:
        return args.func(args)
    except (UsageError, ModelError, UnknownState, FormulaError, AlphabetTooLarge,
            LabelOutsideAlphabet, AlphabetMismatch, HorizonTooLarge, UndefinedControl) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
