"""Command-line front end.

Exit codes: 0 success / true / PASS, 1 false / FAIL, 2 usage or input
error, 3 inconclusive.  Machine output goes to standard output (or
``-o``); progress and errors go to standard error.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from . import io
from .lattice import Interval, LatticeError, format_subset, from_elements, to_elements
from .network import (
    RULES,
    CapacityError,
    build_max_network,
    certify_not_representable,
    compose_network,
    depth_bound,
    run_network,
)
from .setfn import (
    ConformityError,
    SetFn,
    conformity_violation,
    first_nonzero_interval,
    hc_violation,
    min_level,
    pointwise_max,
    restrict,
)
from .transform import PwlExpr, eval_direct, evaluate_setfn, phi, phi_inverse, point
from .verify import (
    verify_base_and_identities,
    verify_dimensions,
    verify_fan_laws,
    verify_prop51,
    verify_quadratic,
    verify_rank5,
)

OK, FALSE, USAGE, INCONCLUSIVE = 0, 1, 2, 3

VERIFY_DEFAULTS = {
    "base": {"d": 4, "k": 2},
    "quadratic": {"d": 7, "k": 2, "samples": 200, "seed": 1},
    "rank5": {"samples": 300, "seed": 7},
    "dims": {"d": 4},
    "fan": {"d": 3, "r": 2, "samples": 200, "seed": 3},
}

_SIGMA = re.compile(r"^sigma:\[\s*(\d+)\s*\.\.\s*(\d+)\s*\]$|^sigma:\[([\d,\s]*)\]$")


class UsageError(ValueError):
    pass


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def parse_point(text: str) -> tuple[Fraction, ...]:
    try:
        return point(Fraction(t.strip()) for t in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from exc


def parse_target(text: str, d: Optional[int]) -> PwlExpr:
    """``sigma:[1..5]`` or ``sigma:[1,3,4]``; ``d`` defaults to the largest element."""
    m = _SIGMA.match(text.strip())
    if not m:
        raise UsageError(f"target must look like sigma:[1..5] or sigma:[1,3,4], got {text!r}")
    if m.group(1) is not None:
        lo, hi = int(m.group(1)), int(m.group(2))
        elems = list(range(lo, hi + 1))
    else:
        elems = parse_int_list(m.group(3))
    if not elems or min(elems) < 1:
        raise UsageError(f"target {text!r} needs a nonempty set of positive elements")
    dim = d if d is not None else max(elems)
    return PwlExpr.sigma(dim, elems)


def _read_json(path: str) -> Any:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return io.loads(text)


def _as_setfn(obj: Any) -> SetFn:
    if isinstance(obj, dict) and "interval" in obj:
        return io.setfn_from_json(obj)
    if isinstance(obj, dict) and "terms" in obj:
        return phi(io.pwl_from_json(obj))
    raise io.FormatError("expected a set function or an expression")


def _input_setfn(args) -> SetFn:
    if getattr(args, "target", None):
        return phi(parse_target(args.target, args.d))
    if not args.input:
        raise UsageError("give an input file with -i (or --target)")
    return _as_setfn(_read_json(args.input[0]))


def _input_tuple(args) -> list[SetFn]:
    if not args.input:
        raise UsageError("give the tuple as one JSON array file or several -i files")
    fns: list[SetFn] = []
    for path in args.input:
        obj = _read_json(path)
        items = obj if isinstance(obj, list) else [obj]
        fns.extend(_as_setfn(o) for o in items)
    return fns


def _emit(args, obj: Any) -> None:
    text = io.dumps(obj)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_text(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _approx(v: Fraction) -> str:
    return f"{float(v):.12g}"


def _scalar(args, value: Fraction, **extra) -> None:
    if args.json:
        out: dict[str, Any] = {"value": io.rational_text(value), **extra}
        if args.approx:
            out["approx"] = {"value": _approx(value), "note": "decimal rendering, non-authoritative"}
        _emit(args, out)
    else:
        _emit_text(args, str(value))


def _setfn_out(args, F: SetFn) -> None:
    out = io.setfn_to_json(F)
    if args.approx:
        out["approx"] = {
            "note": "decimal rendering, non-authoritative",
            "values": {k: _approx(Fraction(v)) for k, v in out["values"].items()},
        }
    _emit(args, out)


def _chain_text(chain: Sequence[int]) -> str:
    return " < ".join(format_subset(s) for s in chain)


# --------------------------------------------------------------------------
# verbs
# --------------------------------------------------------------------------

def cmd_phi(args) -> int:
    if args.target:
        f = parse_target(args.target, args.d)
    elif args.input:
        f = io.pwl_from_json(_read_json(args.input[0]))
    else:
        raise UsageError("phi needs -i EXPR.json or --target")
    _setfn_out(args, phi(f))
    return OK


def cmd_phi_inv(args) -> int:
    F = _input_setfn(args)
    _emit(args, io.pwl_to_json(phi_inverse(F)))
    return OK


def cmd_eval(args) -> int:
    if args.point is None:
        raise UsageError("eval needs --point")
    x = parse_point(args.point)
    if args.target:
        value = eval_direct(parse_target(args.target, args.d), x)
    else:
        if not args.input:
            raise UsageError("eval needs -i FILE or --target")
        obj = _read_json(args.input[0])
        if isinstance(obj, dict) and "terms" in obj:
            value = eval_direct(io.pwl_from_json(obj), x)
        else:
            value = evaluate_setfn(io.setfn_from_json(obj), x)
    _scalar(args, value)
    return OK


def cmd_level(args) -> int:
    F = _input_setfn(args)
    if args.k is not None:
        hit = first_nonzero_interval(F, args.k + 1) if args.k < F.domain.rank else None
        member = hit is None
        if args.json:
            out: dict[str, Any] = {"k": args.k, "member": member}
            if hit:
                out["witness"] = {"S": to_elements(hit[0]), "T": to_elements(hit[1]),
                                  "value": io.rational_text(hit[2])}
            _emit(args, out)
        else:
            text = "true" if member else (
                f"false: alternating sum over [{format_subset(hit[0])}, {format_subset(hit[1])}]"
                f" = {hit[2]}")
            _emit_text(args, text)
        return OK if member else FALSE
    rep = min_level(F)
    if args.json:
        out = {"min_level": rep.k_min, "witness": None}
        if rep.witness:
            s, t, v = rep.witness
            out["witness"] = {"S": to_elements(s), "T": to_elements(t), "value": io.rational_text(v)}
        _emit(args, out)
    else:
        _emit_text(args, str(rep.k_min))
    return OK


def cmd_check(args) -> int:
    if args.property == "hc":
        F = _input_setfn(args)
        bad = hc_violation(F)
        if args.json:
            out: dict[str, Any] = {"hc": bad is None}
            if bad:
                out["witness"] = {"S": to_elements(bad[0]), "T": to_elements(bad[1]),
                                  "F_S": io.rational_text(F(bad[0])),
                                  "F_T": io.rational_text(F(bad[1]))}
            _emit(args, out)
        else:
            _emit_text(args, "true" if bad is None else
                       f"false: F{format_subset(bad[0])} = {F(bad[0])} and "
                       f"F{format_subset(bad[1])} = {F(bad[1])} have opposite signs")
        return OK if bad is None else FALSE
    fns = _input_tuple(args)
    chain = conformity_violation(fns)
    if args.json:
        out = {"conforming": chain is None}
        if chain:
            out["witness"] = {"chain": [to_elements(s) for s in chain]}
        _emit(args, out)
    else:
        _emit_text(args, "true" if chain is None else f"false: chain {_chain_text(chain)}")
    return OK if chain is None else FALSE


def cmd_max(args) -> int:
    fns = _input_tuple(args)
    try:
        M = pointwise_max(fns, require_conforming=args.require_conforming)
    except ConformityError as exc:
        _say(f"not conforming: {exc}")
        return FALSE
    _setfn_out(args, M)
    return OK


def cmd_restrict(args) -> int:
    F = _input_setfn(args)
    X = from_elements(parse_int_list(args.X)) if args.X else F.domain.X
    Y = from_elements(parse_int_list(args.Y)) if args.Y else F.domain.Y
    _setfn_out(args, restrict(F, Interval(X, Y)))
    return OK


def cmd_build_max_net(args) -> int:
    if not args.M or not args.ranks:
        raise UsageError("build-max-net needs --M and --ranks")
    plan = build_max_network(from_elements(parse_int_list(args.M)), parse_int_list(args.ranks),
                             args.d)
    compose_network(plan)  # every neuron must pass the conformity check
    _emit(args, io.plan_to_json(plan))
    return OK


def cmd_run_net(args) -> int:
    if not args.input or args.point is None:
        raise UsageError("run-net needs -i PLAN.json and --point")
    plan = io.plan_from_json(_read_json(args.input[0]))
    _scalar(args, run_network(plan, parse_point(args.point)))
    return OK


def cmd_certify(args) -> int:
    if args.l is None:
        raise UsageError("certify needs --l (number of hidden layers)")
    F = _input_setfn(args)
    k = depth_bound(args.l, args.rule)
    _say(f"scanning intervals of rank {k + 1} (depth bound {k}, rule {args.rule})")
    cert = certify_not_representable(F, args.l, args.rule)
    if cert is None:
        _say("inconclusive: every alternating sum of that rank vanishes")
        if args.json:
            _emit(args, {"certificate": None, "depth_bound": k, "rule": args.rule})
        return INCONCLUSIVE
    if args.json:
        out = io.certificate_to_json(cert)
        if args.approx:
            out["approx"] = {"value": _approx(cert.value), "note": "decimal rendering, non-authoritative"}
        _emit(args, out)
    else:
        _emit_text(args, str(cert))
    return OK


def _pick(args, name: str, key: str):
    value = getattr(args, key if key != "samples" else "samples")
    return value if value is not None else VERIFY_DEFAULTS[name][key]


def cmd_verify(args) -> int:
    name = args.check
    _say(f"running verify {name}")
    if name == "prop51":
        report = verify_prop51(mutate=args.mutate, swap=args.swap)
    elif name == "base":
        report = verify_base_and_identities(_pick(args, name, "d"), _pick(args, name, "k"),
                                            mutate=args.mutate)
    elif name == "quadratic":
        report = verify_quadratic(_pick(args, name, "d"), _pick(args, name, "k"),
                                  _pick(args, name, "samples"), _pick(args, name, "seed"),
                                  mutate=args.mutate)
    elif name == "rank5":
        report = verify_rank5(_pick(args, name, "samples"), _pick(args, name, "seed"),
                              mutate=args.mutate)
    elif name == "dims":
        d = _pick(args, name, "d")
        report = verify_dimensions(d, args.k if args.k is not None else d, mutate=args.mutate)
    else:
        report = verify_fan_laws(_pick(args, name, "d"), _pick(args, name, "r"),
                                 _pick(args, name, "samples"), _pick(args, name, "seed"),
                                 mutate=args.mutate)
    _say(f"verify {name} finished in {report.wall_time:.2f}s")
    if args.json:
        text = report.to_json()
        if args.output:
            Path(args.output).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
    else:
        _emit_text(args, report.to_text())
    return report.exit_code


COMMANDS = {
    "phi": cmd_phi,
    "phi-inv": cmd_phi_inv,
    "eval": cmd_eval,
    "level": cmd_level,
    "check": cmd_check,
    "max": cmd_max,
    "restrict": cmd_restrict,
    "build-max-net": cmd_build_max_net,
    "run-net": cmd_run_net,
    "certify": cmd_certify,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", action="append", metavar="PATH",
                        help="input JSON file ('-' for stdin); repeat for tuples")
    common.add_argument("-o", "--output", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--d", type=int, help="ambient dimension")
    common.add_argument("--k", type=int, help="level")
    common.add_argument("--l", type=int, help="number of hidden layers")
    common.add_argument("--r", type=int, help="tuple length (verify fan)")
    common.add_argument("--ranks", help="maxout ranks per layer, e.g. 3,2")
    common.add_argument("--M", help="index set, e.g. 1,2,3")
    common.add_argument("--X", help="bottom of the restriction interval, e.g. 1")
    common.add_argument("--Y", help="top of the restriction interval, e.g. 1,2,3")
    common.add_argument("--point", help='rational point, e.g. "1,-2/3,0"')
    common.add_argument("--target", help="sigma:[1..5] or sigma:[1,3,4]")
    common.add_argument("--samples", type=int, help="number of accepted samples")
    common.add_argument("--seed", type=int, help="RNG seed")
    common.add_argument("--rule", choices=RULES, default="exact4", help="depth bound rule")
    common.add_argument("--require-conforming", action="store_true",
                        help="refuse the pointwise max of a non-conforming tuple")
    common.add_argument("--json", action="store_true", help="JSON output")
    common.add_argument("--approx", action="store_true",
                        help="with --json, add decimal renderings (non-authoritative)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap; results do not depend on it")
    common.add_argument("--mutate", action="store_true", help="run the built-in mutated instance")
    common.add_argument("--swap", action="store_true", help="verify prop51 with f1, f2 exchanged")

    parser = argparse.ArgumentParser(
        prog="braidfan",
        description="Set-function tools for braid-fan-compatible CPWL functions and maxout networks.",
    )
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")
    helps = {
        "phi": "expression -> set function",
        "phi-inv": "set function -> expression",
        "eval": "evaluate a set function's interpolant or an expression at --point",
        "level": "minimal level, or membership in Sf(--k)",
        "max": "pointwise maximum of a tuple",
        "restrict": "restrict a set function to [--X, --Y]",
        "build-max-net": "maxout network computing sigma_M with the given ranks",
        "run-net": "evaluate a network plan at --point",
        "certify": "non-representability certificate for --l hidden layers",
    }
    for verb, text in helps.items():
        sub.add_parser(verb, parents=[common], help=text)
    check = sub.add_parser("check", parents=[common], help="check hc | conforming")
    check.add_argument("property", choices=["hc", "conforming"])
    verify = sub.add_parser("verify", parents=[common], help="run a verification check")
    verify.add_argument("check", choices=["prop51", "base", "quadratic", "rank5", "dims", "fan"])
    return parser


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    if args.threads is not None and args.threads < 1:
        _say("error: --threads must be at least 1")
        return USAGE
    try:
        return COMMANDS[args.verb](args)
    except (UsageError, io.FormatError, CapacityError, LatticeError, ValueError, OSError) as exc:
        _say(f"error: {exc}")
        return USAGE


def main() -> None:
    sys.exit(run_command())
