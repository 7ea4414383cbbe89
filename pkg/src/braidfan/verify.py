"""Executable checks of the level-space results, with exact witnesses.

Each ``verify_*`` function returns a :class:`Report`.  Every function
takes ``mutate=True`` to run a built-in corrupted instance that must come
out FAIL; this guards against checks that pass vacuously.

Universal statements over a continuous set are only sampled here, so a
PASS is labelled ``property-verified``, never a proof.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .lattice import (
    GuardError,
    Interval,
    enumerate_intervals,
    from_elements,
    full,
    popcount,
    submasks,
    to_elements,
)
from .linalg import rational_rank
from .network import depth_bound
from .sampling import rng_for, sample_sf_hc
from .setfn import (
    SetFn,
    alternating_sum,
    argmax_masks,
    check_low_support,
    conformity_violation,
    first_nonzero_interval,
    hc_violation,
    in_level_space,
    is_conforming,
    low_support_witnesses,
    map_conformity_violation,
    min_level,
    pointwise_max,
    relu_plus,
    restrict,
    span_dimension,
    supports,
)
from .transform import PwlExpr, change_fan, phi

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 3}


def subset_json(s: int) -> list[int]:
    return to_elements(s)


def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


@dataclass
class Report:
    name: str
    params: dict
    status: str = PASS
    attempted: int = 0
    accepted: int = 0
    witness: Optional[dict] = None
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def fail(self, check: str, **witness) -> "Report":
        """Record the first failure; later ones only bump the counter."""
        self.details["failures"] = self.details.get("failures", 0) + 1
        if self.status != FAIL:
            self.status = FAIL
            self.witness = {"check": check, **witness}
        return self

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "check": self.name,
            "params": self.params,
            "status": self.status,
            "label": "property-verified" if self.status == PASS else self.status.lower(),
            "attempted": self.attempted,
            "accepted": self.accepted,
            "witness": self.witness,
            "details": self.details,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return _jsonable(out)

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"verify {self.name}: {self.status}"]
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        if params:
            lines.append(f"  params: {params}")
        if self.attempted:
            lines.append(f"  samples: {self.accepted} accepted of {self.attempted} attempted")
        for key, value in _jsonable(self.details).items():
            lines.append(f"  {key}: {value if not isinstance(value, (dict, list)) else json.dumps(value)}")
        if self.witness is not None:
            lines.append(f"  witness: {json.dumps(_jsonable(self.witness), sort_keys=True)}")
        return "\n".join(lines)


class _timed:
    def __init__(self, report: Report):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.wall_time = time.perf_counter() - self.t0
        return False


def _interval_json(s: int, t: int) -> dict:
    return {"S": subset_json(s), "T": subset_json(t)}


def _alpha_vector(d: int, s: int, t: int) -> np.ndarray:
    vec = np.zeros(1 << d, dtype=np.int64)
    for q in submasks(t & ~s):
        vec[s | q] = -1 if popcount(q) & 1 else 1
    return vec


# --------------------------------------------------------------------------
# the seven-variable counterexample
# --------------------------------------------------------------------------

F1_TERMS = {(1, 2): 2, (1, 4, 5): 1, (1, 6, 7): 1, (2, 4, 6): 1, (2, 5, 7): 1}
F2_TERMS = {(3, 4, 5): 1, (3, 6, 7): 1, (1, 2, 4): 1, (1, 2, 5): 1, (1, 2, 6): 1, (1, 2, 7): 1}
EXPECTED_SUPP_PLUS = frozenset(
    from_elements(e)
    for e in [(1, 2), (1, 2, 4), (1, 2, 5), (1, 2, 6), (1, 2, 7), (1, 2, 4, 5), (1, 2, 6, 7),
              (1, 4, 5), (1, 6, 7)]
)


def prop51_pair(mutate: bool = False) -> tuple[PwlExpr, PwlExpr]:
    f1 = PwlExpr.build(7, {from_elements(m): c for m, c in F1_TERMS.items()})
    f2 = PwlExpr.build(7, {from_elements(m): c for m, c in F2_TERMS.items()})
    if mutate:
        f2 = f2 + PwlExpr.sigma(7, [3])
    return f1, f2


def verify_prop51(mutate: bool = False, swap: bool = False) -> Report:
    """Max of two level-3 functions in seven variables reaching level 7.

    ``F = phi(f1) - phi(f2)`` must be in HC with the nine-element positive
    support, ``<alpha_{{}, [7]}, F+> = -2``, and the maximum must have
    level exactly 7.  With ``swap`` the roles of ``f1`` and ``f2`` are
    exchanged; the support check then compares the negative support.
    """
    report = Report("prop51", {"mutate": mutate, "swap": swap})
    with _timed(report):
        f1, f2 = prop51_pair(mutate)
        if swap:
            f1, f2 = f2, f1
        F1, F2 = phi(f1), phi(f2)
        F = F1 - F2
        top = full(7)

        bad = hc_violation(F)
        if bad is not None:
            report.fail("(a) F in HC", S=subset_json(bad[0]), T=subset_json(bad[1]),
                        F_S=F(bad[0]), F_T=F(bad[1]))

        _, plus, minus = supports(F)
        side = minus if swap else plus
        if side != EXPECTED_SUPP_PLUS:
            extra = sorted(side - EXPECTED_SUPP_PLUS)
            missing = sorted(EXPECTED_SUPP_PLUS - side)
            report.fail("(b) positive support", extra=[subset_json(s) for s in extra],
                        missing=[subset_json(s) for s in missing])
        report.details["supp_plus_size"] = len(side)

        value = alternating_sum(relu_plus(F), 0, top)
        report.details["value"] = value
        if value != -2:
            report.fail("(c) alternating sum of F+ over [{}, [7]]", S=[], T=to_elements(top),
                        value=value)

        lvl = min_level(pointwise_max([F1, F2]))
        report.details["min_level_of_max"] = lvl.k_min
        if lvl.k_min != 7:
            report.fail("(d) min_level of the maximum", k_min=lvl.k_min)
        report.details["levels_of_inputs"] = [min_level(F1).k_min, min_level(F2).k_min]

        chain = conformity_violation([F1, F2])
        if chain is not None:
            report.fail("(e) conforming pair", chain=[subset_json(s) for s in chain])
    return report


# --------------------------------------------------------------------------
# base case and the lattice identities
# --------------------------------------------------------------------------

BASE_MAX_D = 6


def _sigma_family(d: int, k: int, constant: bool = True) -> list[SetFn]:
    fams = [SetFn.constant(Interval.boolean(d), 1)] if constant else []
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(1, d + 1), size):
            fams.append(phi(PwlExpr.sigma(d, combo)))
    return fams


def orthogonal_dimension(d: int, k: int) -> int:
    """``2**d`` minus the rank of all alpha vectors on rank-``(k+1)`` intervals."""
    if k >= d:
        return 1 << d
    dom = Interval.boolean(d)
    rows = (_alpha_vector(d, s, t).tolist() for s, t in enumerate_intervals(dom, k + 1))
    return (1 << d) - rational_rank(rows)


def _check_decomposition(d: int, report: Report) -> int:
    """Exact vector identity for every interval ``[X, Y]`` and every ``T`` in ``Y - X``."""
    checked = 0
    top = full(d)
    for y in submasks(top):
        for x in submasks(y):
            lhs = _alpha_vector(d, x, y)
            free = y & ~x
            for t in submasks(free):
                rhs = np.zeros(1 << d, dtype=np.int64)
                for extra in submasks(free & ~t):
                    sign = -1 if popcount(extra) & 1 else 1
                    s = x | extra
                    rhs += sign * _alpha_vector(d, s, s | t)
                checked += 1
                if not np.array_equal(lhs, rhs):
                    report.fail("(i) decomposition identity", X=subset_json(x), Y=subset_json(y),
                                T=subset_json(t))
                    return checked
    return checked


def _check_translation_invariance(d: int, k: int, fams: list[SetFn], report: Report) -> int:
    """``<alpha_{S, S+T}, G>`` does not depend on ``S`` when ``|T| = k``."""
    checked = 0
    table = np.array([[int(v) if v.denominator == 1 else v for v in g.values] for g in fams],
                     dtype=object)
    top = full(d)
    for t in (m for m in submasks(top) if popcount(m) == k):
        ref = None
        for s in submasks(top & ~t):
            pairing = table @ _alpha_vector(d, s, s | t).astype(object)
            checked += 1
            if ref is None:
                ref, ref_s = pairing, s
                continue
            diff = np.flatnonzero(pairing != ref)
            if diff.size:
                j = int(diff[0])
                report.fail("(ii) alpha difference in R(k)", T=subset_json(t),
                            S=subset_json(ref_s), S_prime=subset_json(s), family_index=j,
                            values=[ref[j], pairing[j]])
                return checked
    return checked


def _affine_relus(d: int) -> tuple[list[SetFn], int]:
    """``max(0, G)`` for every affine ``G`` with coefficients in ``{-1, 0, 1}``."""
    dom = Interval.boolean(d)
    coords = [phi(PwlExpr.sigma(d, [i])) for i in range(1, d + 1)]
    zero = SetFn.zero(dom)
    outputs: dict[SetFn, None] = {}
    conforming = 0
    for combo in itertools.product((-1, 0, 1), repeat=d + 1):
        G = SetFn.constant(dom, combo[0])
        for c, x in zip(combo[1:], coords):
            if c:
                G = G + c * x
        if is_conforming([zero, G]):
            conforming += 1
            outputs[pointwise_max([zero, G])] = None
    return list(outputs), conforming


def verify_base_and_identities(d: int, k: int, mutate: bool = False) -> Report:
    """Decomposition identity, translation invariance of alpha sums, and the base case.

    (i) ``alpha_{X,Y} = sum over X <= S <= Y - T of (-1)^{|S - X|} alpha_{S, S+T}``
    for all intervals and all ``T``; (ii) pairings of ``alpha_{S, S+T}``
    with ``|T| = k`` against the spanning family of ``Sf(k)`` do not depend
    on ``S``; (iii) conforming ``max(0, affine)`` lands in ``Sf(2)`` and
    spans it.  The mutation adds ``phi(sigma_M)`` with ``|M| = k + 1`` to
    the family in (ii).
    """
    if d > BASE_MAX_D:
        raise GuardError(f"exhaustive identity check is limited to d <= {BASE_MAX_D}")
    if not 0 <= k <= d:
        raise ValueError("need 0 <= k <= d")
    if mutate and k >= d:
        raise ValueError("the mutation adds sigma_M with |M| = k + 1 and needs k < d")
    report = Report("base", {"d": d, "k": k, "mutate": mutate})
    with _timed(report):
        report.details["decomposition_instances"] = _check_decomposition(d, report)
        if d >= 4:
            # Fig. 3 instance with a, b, c, d read as 1, 2, 3, 4
            lhs = _alpha_vector(d, 0, 0b1111)
            rhs = _alpha_vector(d, 0, 0b0111) - _alpha_vector(d, 0b1000, 0b1111)
            report.details["figure_instance_matches"] = bool(np.array_equal(lhs, rhs))
            if not np.array_equal(lhs, rhs):
                report.fail("(i) figure instance", X=[], Y=[1, 2, 3, 4], T=[1, 2, 3])

        fams = _sigma_family(d, k)
        if mutate:
            fams.append(phi(PwlExpr.sigma(d, range(1, k + 2))))
        report.details["translation_instances"] = _check_translation_invariance(d, k, fams, report)

        outputs, conforming = _affine_relus(d)
        report.details["conforming_relus"] = conforming
        for G in outputs:
            if not in_level_space(G, 2):
                s, t, v = first_nonzero_interval(G, 3)
                report.fail("(iii) max(0, affine) in Sf(2)", **_interval_json(s, t), value=v)
                break
        spanned = span_dimension(outputs)
        target = orthogonal_dimension(d, 2)
        report.details["relu_span_dimension"] = spanned
        report.details["dim_sf2"] = target
        if spanned != target:
            report.fail("(iii) span equals Sf(2)", spanned=spanned, expected=target)
    return report


# --------------------------------------------------------------------------
# sampled bounds
# --------------------------------------------------------------------------

def _batch(d, k, n, seed, mutate):
    if mutate:
        return sample_sf_hc(d, k, n, seed, check_hc=False, generators=("dense_terms",))
    return sample_sf_hc(d, k, n, seed)


def _record_batch(report: Report, batch) -> None:
    report.attempted = batch.attempted
    report.accepted = batch.accepted
    report.details["acceptance_rate"] = round(batch.acceptance_rate, 4)
    report.details["rejected_level"] = batch.rejected_level
    report.details["rejected_hc"] = batch.rejected_hc
    counts: dict[str, int] = {}
    for name in batch.sources:
        counts[name] = counts.get(name, 0) + 1
    report.details["generators"] = dict(sorted(counts.items()))


def _finish_sampling(report: Report, n: int) -> None:
    if report.status == PASS and report.accepted < n:
        report.status = INCONCLUSIVE
        report.details["reason"] = f"generator starvation: {report.accepted} of {n} samples"


def verify_quadratic(d: int, k: int, n: int, seed: int, mutate: bool = False) -> Report:
    """Sampled check that ``F+`` is in ``Sf(k^2 + k)`` for ``F`` in ``Sf(k)`` and HC.

    Two-sided samples must also show the low- and high-rank support
    elements.  The mutation samples without the HC filter from a dense
    generator.
    """
    report = Report("quadratic", {"d": d, "k": k, "n": n, "seed": seed, "mutate": mutate})
    target = k * k + k
    with _timed(report):
        batch = _batch(d, k, n, seed, mutate)
        _record_batch(report, batch)
        report.details["target_level"] = target
        report.details["full_interval_check"] = d >= target + 1
        two_sided = witnessed = 0
        for i, F in enumerate(batch.samples):
            Fp = relu_plus(F)
            if not in_level_space(Fp, target):
                s, t, v = first_nonzero_interval(Fp, target + 1)
                report.fail("F+ in Sf(k^2+k)", sample=i, source=batch.sources[i],
                            **_interval_json(s, t), value=v)
            if mutate:
                continue
            found = low_support_witnesses(F, k)
            if found is None:
                continue
            two_sided += 1
            if check_low_support(F, k):
                witnessed += 1
            else:
                missing = [key for key, v in found.items() if v is None]
                report.fail("low-support witnesses", sample=i, missing=missing)
        report.details["two_sided"] = two_sided
        report.details["low_support_witnessed"] = witnessed
        _finish_sampling(report, n)
    return report


def _pairing_check(F: SetFn) -> Optional[dict]:
    """Re-derive the pairing argument for ``F+`` when ``supp+`` sits on two levels.

    Returns ``None`` if the argument applies and ``alpha(F+) = 0`` follows,
    otherwise a witness dictionary.
    """
    dom = F.domain
    _, plus, _ = supports(F)
    levels = sorted({dom.rank_of(s) for s in plus})
    if len(levels) == 1:
        return {"reason": "positive support on a single level", "level": levels[0]}
    lo, hi = levels
    low = sorted(s for s in plus if dom.rank_of(s) == lo)
    high = sorted(s for s in plus if dom.rank_of(s) == hi)
    matched: dict[int, int] = {}
    for r in low:
        above = [q for q in high if r & q == r]
        if len(above) != 1:
            return {"reason": "no unique partner", "R": subset_json(r),
                    "partners": [subset_json(q) for q in above]}
        q = above[0]
        if F(r) != F(q):
            return {"reason": "partner value differs", "R": subset_json(r), "Q": subset_json(q)}
        if q in matched.values():
            return {"reason": "partner shared", "Q": subset_json(q)}
        matched[r] = q
    if len(matched) != len(high):
        unmatched = sorted(set(high) - set(matched.values()))
        return {"reason": "unmatched upper element", "Q": subset_json(unmatched[0])}
    paired = sum((F(r) for r in low), Fraction(0)) - sum((F(q) for q in high), Fraction(0))
    direct = alternating_sum(relu_plus(F), dom.X, dom.Y)
    if paired != 0 or direct != (-1) ** lo * paired:
        return {"reason": "paired sum", "paired": paired, "direct": direct}
    return None


def _case14_check(F: SetFn, x_low: int, x_high: int, mirrored: bool) -> Optional[dict]:
    """Split-interval identity for a level-1 and a level-4 support element of opposite signs."""
    dom = F.domain
    lhs = alternating_sum(relu_plus(F), dom.X, dom.Y)
    if mirrored:
        # negative at level 1, positive at level 4: F+ lives below the level-4 set
        rhs = alternating_sum(F, dom.X, x_high)
    else:
        rhs = -alternating_sum(F, x_low, dom.Y)
    if lhs != rhs or lhs != 0:
        return {"low": subset_json(x_low), "high": subset_json(x_high), "lhs": lhs, "rhs": rhs}
    return None


def _level1_check(F: SetFn, x_plus: int, x_minus: int) -> Optional[dict]:
    """Level-1 positive and negative elements: reduce to rank-3 intervals."""
    dom = F.domain
    s = x_plus | x_minus
    rest = dom.Y & ~s
    for r in submasks(rest):
        if F(s | r):
            return {"reason": "F nonzero above X+ | X-", "R": subset_json(s | r)}
    Fp = relu_plus(F)
    for sp in submasks(s & ~dom.X):
        sp |= dom.X
        sub = Interval(sp, sp | rest)
        if not in_level_space(restrict(F, sub), 1):
            return {"reason": "restriction not in Sf(1)", "X": subset_json(sub.X),
                    "Y": subset_json(sub.Y)}
        v = alternating_sum(Fp, sub.X, sub.Y)
        if v:
            return {"reason": "rank-3 sum of F+", "X": subset_json(sub.X), "Y": subset_json(sub.Y),
                    "value": v}
    return None


def _rank5_branches(F: SetFn, report: Report, i: int, counts: dict) -> None:
    dom = F.domain
    _, plus, minus = supports(F)
    if not plus or not minus:
        counts["one_sided"] += 1
        return
    counts["two_sided"] += 1
    plus_levels = {dom.rank_of(s) for s in plus}
    minus_levels = {dom.rank_of(s) for s in minus}
    if len(plus_levels) <= 2 or len(minus_levels) <= 2:
        counts["pairing"] += 1
    if len(plus_levels) <= 2:
        bad = _pairing_check(F)
        if bad:
            report.fail("pairing (positive support)", sample=i, **bad)
    if len(minus_levels) <= 2:
        bad = _pairing_check(-F)
        if bad:
            report.fail("pairing (negative support)", sample=i, **bad)
    by_rank = lambda pool, r: sorted(s for s in pool if dom.rank_of(s) == r)
    p1, p4, m1, m4 = by_rank(plus, 1), by_rank(plus, 4), by_rank(minus, 1), by_rank(minus, 4)
    if p1 and m4:
        counts["case1_4"] += 1
        bad = _case14_check(F, p1[0], m4[0], mirrored=False)
        if bad:
            report.fail("case1-4", sample=i, **bad)
    if m1 and p4:
        counts["case1_4_mirrored"] += 1
        bad = _case14_check(F, m1[0], p4[0], mirrored=True)
        if bad:
            report.fail("case1-4 (mirrored)", sample=i, **bad)
    if p1 and m1:
        counts["level1"] += 1
        bad = _level1_check(F, p1[0], m1[0])
        if bad:
            report.fail("level-1 reduction", sample=i, **bad)


def maxout4d_conclusion() -> dict:
    """Level of ``max(0, x_1, ..., x_4)`` against the two-layer bound."""
    pinned = PwlExpr.sigma(5, range(1, 6))  # read with x_5 = 0
    lifted = change_fan(pinned, "embed")
    level = min_level(phi(lifted)).k_min
    bound = depth_bound(2, "exact4")
    return {
        "bound": bound,
        "level": level,
        "holds": level > bound,
        "statement": (
            f"max(0, x1, x2, x3, x4) has level {level} > {bound}: not computable by a "
            "conforming ReLU network with 2 hidden layers"
        ),
    }


def verify_rank5(n: int, seed: int, mutate: bool = False) -> Report:
    """Sampled rank-5 classification: ``F`` in ``Sf(2)`` and HC gives ``F+`` in ``Sf(4)``.

    Each two-sided sample is run through every branch of the case split
    that applies to it; the counts show which branches were exercised.
    """
    report = Report("rank5", {"n": n, "seed": seed, "mutate": mutate})
    with _timed(report):
        batch = _batch(5, 2, n, seed, mutate)
        _record_batch(report, batch)
        counts = dict.fromkeys(
            ["one_sided", "two_sided", "pairing", "case1_4", "case1_4_mirrored", "level1"], 0)
        for i, F in enumerate(batch.samples):
            Fp = relu_plus(F)
            if not in_level_space(Fp, 4):
                s, t, v = first_nonzero_interval(Fp, 5)
                report.fail("F+ in Sf(4)", sample=i, source=batch.sources[i],
                            **_interval_json(s, t), value=v)
            if not mutate:
                _rank5_branches(F, report, i, counts)
        report.details["branches"] = counts
        conclusion = maxout4d_conclusion()
        report.details["maxout4d"] = conclusion["statement"]
        if not conclusion["holds"]:
            report.fail("two-layer conclusion", **conclusion)
        _finish_sampling(report, n)
    return report


# --------------------------------------------------------------------------
# dimensions
# --------------------------------------------------------------------------

DIMS_MAX_D = 6


def verify_dimensions(d: int, kmax: int, mutate: bool = False) -> Report:
    """Span of ``{1} + {phi(sigma_M) : |M| <= k}`` against the orthogonality definition.

    The sum ``sum_{i=1..k} C(d, i)`` is reported next to the measured value;
    it leaves out the constants, so the two differ by one.  The mutation
    drops the constant from the family.
    """
    if d > DIMS_MAX_D:
        raise GuardError(f"exact dimension audit is limited to d <= {DIMS_MAX_D}")
    if not 0 <= kmax <= d:
        raise ValueError("need 0 <= kmax <= d")
    report = Report("dims", {"d": d, "kmax": kmax, "mutate": mutate})
    with _timed(report):
        rows = []
        for k in range(kmax + 1):
            fams = _sigma_family(d, k, constant=not mutate)
            measured = span_dimension(fams)
            orth = orthogonal_dimension(d, k)
            without_constant = sum(math.comb(d, i) for i in range(1, k + 1))
            rows.append({
                "k": k,
                "measured": measured,
                "orthogonal": orth,
                "one_plus_sum": 1 + without_constant,
                "sum_without_constant": without_constant,
                "discrepancy": orth - without_constant,
            })
            if not (measured == orth == 1 + without_constant):
                report.fail("dimension", k=k, measured=measured, orthogonal=orth,
                            expected=1 + without_constant)
        report.details["rows"] = rows
    return report


# --------------------------------------------------------------------------
# the fan of conforming tuples
# --------------------------------------------------------------------------

FAN_MAX_D, FAN_MAX_R = 4, 3


def in_cone(fns, amap: list[int]) -> bool:
    """``fns`` lies in ``C_a``: every ``a(S)`` is among the maximizers at ``S``."""
    return all(a & m == a for a, m in zip(amap, argmax_masks(fns)))


def map_is_conforming(domain: Interval, amap: list[int]) -> bool:
    return map_conformity_violation(domain, amap) is None


def _random_tuple(rng, dom: Interval, r: int) -> list[SetFn]:
    """Values in ``{-1, 0, 1}``; some members are noisy copies to force ties.

    A quarter of the tuples are shifted copies ``base - c_j`` of one
    function, which are always conforming.
    """
    vals = (-1, 0, 1)
    out = [SetFn(dom, (rng.choice(vals) for _ in range(dom.size)))]
    if rng.random() < 0.25:
        return out + [out[0] - SetFn.constant(dom, rng.choice((0, 1))) for _ in range(r - 1)]
    for _ in range(r - 1):
        if rng.random() < 0.3:
            base = out[rng.randrange(len(out))]
            out.append(SetFn(dom, (v if rng.random() < 0.8 else rng.choice(vals)
                                   for v in base.values)))
        else:
            out.append(SetFn(dom, (rng.choice(vals) for _ in range(dom.size))))
    return out


def _sub_map(rng, amap: list[int]) -> list[int]:
    """Random map ``b`` with ``b(S)`` a nonempty subset of ``a(S)``."""
    out = []
    for a in amap:
        bits = [1 << j for j in range(a.bit_length()) if a >> j & 1]
        keep = [b for b in bits if rng.random() < 0.5] or [rng.choice(bits)]
        out.append(sum(keep))
    return out


def _random_map(rng, size: int, r: int) -> list[int]:
    return [rng.randint(1, (1 << r) - 1) for _ in range(size)]


def verify_fan_laws(d: int, r: int, n: int, seed: int, mutate: bool = False) -> Report:
    """Membership laws of the cones ``C_a`` indexed by argmax maps.

    ``a <= b`` means ``b(S)`` is a subset of ``a(S)`` everywhere.  The
    mutation perturbs each tuple after its argmax map was taken and checks
    the stale map.
    """
    if d > FAN_MAX_D or r > FAN_MAX_R:
        raise GuardError(f"fan laws are sampled for d <= {FAN_MAX_D}, r <= {FAN_MAX_R}")
    if d < 1 or r < 1:
        raise ValueError("need d >= 1 and r >= 1")
    report = Report("fan", {"d": d, "r": r, "n": n, "seed": seed, "mutate": mutate})
    dom = Interval.boolean(d)
    counts = dict.fromkeys(
        ["own_map", "intersection", "intersection_members", "monotone", "monotone_members",
         "conforming_agree", "refined_conforming"], 0)
    with _timed(report):
        for i in range(n):
            rng = rng_for(seed, i)
            fns = _random_tuple(rng, dom, r)
            own = argmax_masks(fns)
            if mutate:
                j = rng.randrange(dom.size)
                top = max(g.values[j] for g in fns)
                pos = next(p for p in range(r) if own[j] >> p & 1)
                vals = list(fns[pos].values)
                vals[j] = top - 1
                fns = fns[:pos] + [SetFn(dom, vals)] + fns[pos + 1:]
            report.attempted += 1

            counts["own_map"] += 1
            if not in_cone(fns, own):
                report.fail("tuple in C of its own argmax map", sample=i)
                continue

            for a, b in ((_sub_map(rng, own), _sub_map(rng, own)),
                         (_random_map(rng, dom.size, r), _sub_map(rng, own)),
                         (_random_map(rng, dom.size, r), _random_map(rng, dom.size, r))):
                union = [x | y for x, y in zip(a, b)]
                counts["intersection"] += 1
                both = in_cone(fns, a) and in_cone(fns, b)
                counts["intersection_members"] += both
                if both != in_cone(fns, union):
                    report.fail("C_a and C_b meet in C_(a|b)", sample=i)

            for a in (_sub_map(rng, own), _random_map(rng, dom.size, r)):
                b = _sub_map(rng, a)
                counts["monotone"] += 1
                if in_cone(fns, a):
                    counts["monotone_members"] += 1
                    if not in_cone(fns, b):
                        report.fail("a <= b and tuple in C_a implies tuple in C_b", sample=i)

            counts["conforming_agree"] += 1
            if map_is_conforming(dom, own) != is_conforming(fns):
                report.fail("conforming map agrees with is_conforming", sample=i)
            coarse = _sub_map(rng, own)
            if map_is_conforming(dom, coarse):
                counts["refined_conforming"] += 1
                if not is_conforming(fns):
                    report.fail("tuple refining a conforming map is conforming", sample=i)
            report.accepted += 1

        full_map = [(1 << r) - 1] * dom.size
        diag = [fns[0]] * r
        if not in_cone(diag, full_map):
            report.fail("diagonal tuple in C of the full map")
        report.details["laws"] = counts
    return report


VERIFIERS = {
    "prop51": verify_prop51,
    "base": verify_base_and_identities,
    "quadratic": verify_quadratic,
    "rank5": verify_rank5,
    "dims": verify_dimensions,
    "fan": verify_fan_laws,
}
