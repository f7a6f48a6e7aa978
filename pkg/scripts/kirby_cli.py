"""
Kirby Calculus Command Line
===========================

Invariants, move application, proof-script verification and the matrix,
template and word-level self-checks.

Usage:
    python scripts/kirby_cli.py invariants data/examples/unknot_minus.surg
    python scripts/kirby_cli.py verify data/examples/cancel_demo.kirby
    python scripts/kirby_cli.py apply --move "lantern" --window 0:14@0 in.surg --out out.surg
    python scripts/kirby_cli.py schur --move chain --ell1 1,0 --ell2 0,1 --ell3 2,0
    python scripts/kirby_cli.py indep
    python scripts/kirby_cli.py mcg replay handleslide_left_pm
    python scripts/kirby_cli.py templates check

Every subcommand accepts --format json|text. JSON output is one object;
rationals are strings "p/q". Exit status: 0 success, 1 verification
failure or bad input, 2 usage error.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import pandas as pd

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from kirby import config
from kirby.blocks import verify_schur_conditions
from kirby.descriptors import parse_descriptor, parse_window
from kirby.errors import KirbyError
from kirby.invariants import c_squared, d3_surg, delta
from kirby.linalg import signature
from kirby.mcg import replay_derivation
from kirby.moves import C_VECTOR, L_VECTOR, P_VECTOR, apply_template_move_detailed, independence_rank
from kirby.script import verify_script_file
from kirby.surgery import linking_data, linking_table, parse_surgery, serialize_surgery
from kirby.templates import check_templates
from kirby.utils import format_rational

SCHUR_VECTOR_FLAGS = ("t", "rho", "ell", "w2l", "w2r", "w3l", "w3r", "ell1", "ell2", "ell3", "sign")


# --- Output helpers ---
def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _read_surgery(path: str):
    file = Path(path)
    if not file.exists():
        raise KirbyError(f"file not found: {path}")
    return parse_surgery(file.read_text())


def invariants_payload(d) -> dict:
    data = linking_data(d)
    return {
        "components": linking_table(d),
        "Q": [list(row) for row in data.Q],
        "r": list(data.r),
        "n": data.n,
        "q": data.q,
        "sigma": signature(data.Q),
        "c2": format_rational(c_squared(data)),
        "d3": format_rational(d3_surg(data)),
        "delta": format_rational(delta(data)),
    }


# --- Subcommands ---
def cmd_invariants(args) -> int:
    d = _read_surgery(args.file)
    payload = invariants_payload(d)
    lines = []
    if payload["components"]:
        lines.append(pd.DataFrame(payload["components"]).to_string(index=False))
    lines += [
        f"Q = {payload['Q']}",
        f"r = {payload['r']}",
        f"n = {payload['n']}, q = {payload['q']}, sigma = {payload['sigma']}, c2 = {payload['c2']}",
        f"d3 = {payload['d3']}",
        f"delta = {payload['delta']} (mod 8)",
    ]
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    report = verify_script_file(args.file)
    text = [f"script {report.name or args.file}"]
    for step in report.steps:
        line = f"{step.step:3d} {step.kind:<15} {step.status}"
        if step.d3_after is not None:
            line += f"  d3 {step.d3_before} -> {step.d3_after}" if step.d3_before is not None else f"  d3 {step.d3_after}"
        if step.detail:
            line += f"  {step.detail}"
        text.append(line)
    text.append("ok" if report.ok else "FAILED")
    _emit(args, {"name": report.name, "ok": report.ok, "steps": [s.model_dump() for s in report.steps]},
          "\n".join(text))
    return report.exit_status


def cmd_apply(args) -> int:
    d = _read_surgery(args.file)
    m = parse_descriptor(args.move)
    result = apply_template_move_detailed(d, m, parse_window(args.window))
    Path(args.out).write_text(serialize_surgery(result.diagram))
    before, after = linking_data(d), linking_data(result.diagram)
    payload = {
        "move": m.summary(),
        "out": args.out,
        "index_map": result.index_map.as_dict(),
        "d3_before": format_rational(d3_surg(before)),
        "d3_after": format_rational(d3_surg(after)),
        "delta_before": format_rational(delta(before)),
        "delta_after": format_rational(delta(after)),
    }
    text = (f"{payload['move']} -> {args.out}\n"
            f"index map: {payload['index_map']}\n"
            f"d3 = {payload['d3_before']} -> {payload['d3_after']}\n"
            f"delta = {payload['delta_before']} -> {payload['delta_after']} (mod 8)")
    _emit(args, payload, text)
    return 0


def cmd_schur(args) -> int:
    text = args.move
    for flag in SCHUR_VECTOR_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            text += f" {flag}={value}"
    m = parse_descriptor(text)
    report = verify_schur_conditions(m, seed=args.seed, samples=args.samples)
    lines = [f"{report.tag} {report.direction}: {report.passed}/{report.samples} samples pass"]
    for check in report.checks:
        lines.append(f"  [{'ok' if check.holds else 'FAIL'}] {check.name}: {check.lhs} = {check.rhs}")
    lines += [f"  {f}" for f in report.failures]
    _emit(args, report.model_dump() | {"ok": report.ok}, "\n".join(lines))
    return 0 if report.ok else 1


def cmd_indep(args) -> int:
    vectors = {"P": P_VECTOR, "L": L_VECTOR, "C": C_VECTOR}
    rank = independence_rank(vectors.values())
    payload = {name: v.as_strings() for name, v in vectors.items()} | {"rank": rank}
    lines = [f"{name} = ({', '.join(v.as_strings())})" for name, v in vectors.items()]
    lines.append(f"rank = {rank}")
    _emit(args, payload, "\n".join(lines))
    return 0 if rank == len(vectors) else 1


def cmd_mcg(args) -> int:
    result = replay_derivation(args.name, "backward" if args.backward else "forward")
    steps = [str(s) for s in result.steps]
    words = [str(w) for w in result.words]
    lines = [f"{args.name} ({result.direction})", f"    {words[0]}"]
    lines += [f"  = {w}    [{s}]" for s, w in zip(steps, words[1:])]
    _emit(args, {"name": args.name, "direction": result.direction, "ok": result.ok, "steps": steps,
                 "words": words}, "\n".join(lines))
    return 0 if result.ok else 1


def cmd_templates(args) -> int:
    results = check_templates()
    lines = [f"{r.name:<12} {'ok' if r.ok else 'FAIL'}  {r.detail if not r.ok else ''}".rstrip() for r in results]
    ok = all(r.ok for r in results)
    _emit(args, {"ok": ok, "templates": [vars(r) for r in results]}, "\n".join(lines))
    return 0 if ok else 1


# --- Entry point ---
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="output format")
    common.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="seed for randomized checks")

    parser = argparse.ArgumentParser(description="Exact contact Kirby calculus", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="tb/rot/lk table, linking data, d3 and delta")
    p.add_argument("file", help=".surg diagram")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("verify", parents=[common], help="verify a .kirby proof script")
    p.add_argument("file", help=".kirby script")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("apply", parents=[common], help="apply one standard move to a diagram")
    p.add_argument("--move", required=True, help="move descriptor, e.g. 'slide rider=0 over=1 variant=a'")
    p.add_argument("--window", required=True, help="start:stop@base")
    p.add_argument("--out", required=True, help="output .surg path")
    p.add_argument("file", help="input .surg diagram")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("schur", parents=[common], help="check the Schur complement identities of a move")
    p.add_argument("--move", required=True, help="move tag, optionally with descriptor keys")
    p.add_argument("--samples", type=int, default=config.DEFAULT_SAMPLES, help="random instantiations")
    for flag in SCHUR_VECTOR_FLAGS:
        p.add_argument(f"--{flag}", default=None)
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("indep", parents=[common], help="rank of the P, L and C change vectors")
    p.set_defaults(func=cmd_indep)

    p = sub.add_parser("mcg", parents=[common], help="twist-word certificates")
    mcg_sub = p.add_subparsers(dest="mcg_command", required=True)
    r = mcg_sub.add_parser("replay", parents=[common], help="replay a shipped certificate")
    r.add_argument("name")
    r.add_argument("--backward", action="store_true", help="replay from the target word back to the start")
    r.set_defaults(func=cmd_mcg)

    p = sub.add_parser("templates", parents=[common], help="template assets")
    t_sub = p.add_subparsers(dest="templates_command", required=True)
    c = t_sub.add_parser("check", parents=[common], help="re-validate every shipped template")
    c.set_defaults(func=cmd_templates)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KirbyError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
