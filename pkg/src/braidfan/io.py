"""JSON encoding of subsets, set functions, expressions, networks and certificates.

Rationals are written as canonical ``"p/q"`` or integer strings.  Object
keys are emitted in alphabetical order, except the ``values`` map of a
set function, which follows the lattice order of its interval.  Equal
objects therefore serialize to identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .lattice import Interval, LatticeError, from_elements, to_elements
from .network import Affine, Certificate, LayerSpec, NetworkPlan
from .setfn import SetFn
from .transform import PwlExpr, RationalPoint, point


class FormatError(ValueError):
    """Malformed or inconsistent JSON input."""


def rational_text(v: Fraction) -> str:
    return str(Fraction(v))


def parse_rational(v: Any) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise FormatError(f"expected an exact rational (int or \"p/q\" string), got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"not a rational: {v!r}") from exc
    raise FormatError(f"expected a rational, got {type(v).__name__}")


def subset_to_json(s: int) -> list[int]:
    return to_elements(s)


def subset_from_json(v: Any) -> int:
    if not isinstance(v, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in v):
        raise FormatError(f"a subset is a JSON array of positive integers, got {v!r}")
    if len(set(v)) != len(v):
        raise FormatError(f"repeated elements in subset {v}")
    try:
        return from_elements(v)
    except LatticeError as exc:
        raise FormatError(str(exc)) from exc


def interval_to_json(I: Interval) -> dict:
    return {"X": subset_to_json(I.X), "Y": subset_to_json(I.Y)}


def interval_from_json(v: Any) -> Interval:
    _require_keys(v, {"X", "Y"}, "interval")
    try:
        return Interval(subset_from_json(v["X"]), subset_from_json(v["Y"]))
    except LatticeError as exc:
        raise FormatError(str(exc)) from exc


def _key(s: int) -> str:
    return ",".join(map(str, to_elements(s)))


def _require_keys(v: Any, keys: set[str], what: str) -> None:
    if not isinstance(v, dict):
        raise FormatError(f"{what} must be a JSON object")
    missing = keys - v.keys()
    if missing:
        raise FormatError(f"{what} is missing {sorted(missing)}")


def setfn_to_json(F: SetFn) -> dict:
    return {
        "interval": interval_to_json(F.domain),
        "values": {_key(s): rational_text(v) for s, v in F.items()},
    }


def setfn_from_json(v: Any) -> SetFn:
    _require_keys(v, {"interval", "values"}, "set function")
    dom = interval_from_json(v["interval"])
    raw = v["values"]
    if not isinstance(raw, dict):
        raise FormatError("values must be a JSON object keyed by comma-joined subsets")
    table: dict[int, Fraction] = {}
    for key, val in raw.items():
        try:
            elems = [int(e) for e in key.split(",")] if key.strip() else []
        except ValueError as exc:
            raise FormatError(f"bad subset key {key!r}") from exc
        s = subset_from_json(elems)
        if s not in dom:
            raise FormatError(f"key {key!r} is outside {dom}")
        if s in table:
            raise FormatError(f"duplicate key for subset {to_elements(s)}")
        table[s] = parse_rational(val)
    missing = [s for s in dom.elements if s not in table]
    if missing:
        raise FormatError(
            f"values are dense: {len(missing)} subsets missing, first {to_elements(missing[0])}"
        )
    return SetFn(dom, (table[s] for s in dom.elements))


def pwl_to_json(f: PwlExpr) -> dict:
    return {
        "constant": rational_text(f.constant),
        "d": f.d,
        "terms": [{"M": subset_to_json(m), "coeff": rational_text(c)} for m, c in f.terms],
    }


def pwl_from_json(v: Any) -> PwlExpr:
    _require_keys(v, {"d", "terms"}, "expression")
    d = v["d"]
    if not isinstance(d, int) or d < 0:
        raise FormatError(f"d must be a non-negative integer, got {d!r}")
    if not isinstance(v["terms"], list):
        raise FormatError("terms must be a JSON array")
    terms = []
    for t in v["terms"]:
        _require_keys(t, {"M", "coeff"}, "term")
        terms.append((subset_from_json(t["M"]), parse_rational(t["coeff"])))
    try:
        return PwlExpr.build(d, terms, parse_rational(v.get("constant", "0")))
    except LatticeError as exc:
        raise FormatError(str(exc)) from exc


def point_to_json(x: RationalPoint) -> dict:
    return {"x": [rational_text(c) for c in x]}


def point_from_json(v: Any) -> RationalPoint:
    _require_keys(v, {"x"}, "point")
    if not isinstance(v["x"], list):
        raise FormatError("x must be a JSON array")
    return point(parse_rational(c) for c in v["x"])


def _affine_to_json(a: Affine) -> dict:
    return {"coeffs": [rational_text(c) for c in a.coeffs], "constant": rational_text(a.constant)}


def _affine_from_json(v: Any) -> Affine:
    _require_keys(v, {"coeffs"}, "affine map")
    if not isinstance(v["coeffs"], list):
        raise FormatError("coeffs must be a JSON array")
    return Affine.of([parse_rational(c) for c in v["coeffs"]], parse_rational(v.get("constant", "0")))


def plan_to_json(plan: NetworkPlan) -> dict:
    return {
        "d": plan.d,
        "layers": [
            {"neurons": [[_affine_to_json(a) for a in pre] for pre in layer.neurons],
             "rank": layer.rank}
            for layer in plan.layers
        ],
        "output": _affine_to_json(plan.output),
    }


def plan_from_json(v: Any) -> NetworkPlan:
    _require_keys(v, {"d", "layers", "output"}, "network")
    try:
        layers = []
        for layer in v["layers"]:
            _require_keys(layer, {"rank", "neurons"}, "layer")
            neurons = tuple(tuple(_affine_from_json(a) for a in pre) for pre in layer["neurons"])
            layers.append(LayerSpec(int(layer["rank"]), neurons))
        return NetworkPlan(int(v["d"]), tuple(layers), _affine_from_json(v["output"]))
    except LatticeError as exc:
        raise FormatError(str(exc)) from exc


def certificate_to_json(c: Certificate) -> dict:
    return {
        "S": subset_to_json(c.S),
        "T": subset_to_json(c.T),
        "depth_bound": c.depth_bound,
        "rule": c.rule,
        "value": rational_text(c.value),
    }


def certificate_from_json(v: Any) -> Certificate:
    _require_keys(v, {"S", "T", "value", "depth_bound", "rule"}, "certificate")
    return Certificate(subset_from_json(v["S"]), subset_from_json(v["T"]),
                       parse_rational(v["value"]), int(v["depth_bound"]), str(v["rule"]))


def dumps(obj: Any) -> str:
    """Canonical text: two-space indent, UTF-8, trailing newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc
