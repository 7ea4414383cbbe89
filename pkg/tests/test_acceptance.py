"""Acceptance criteria 1-11, each at its stated tolerance and time limit.

All comparisons are exact rational equalities.  The per-criterion
PASS/FAIL lines are printed by the hook in ``conftest.py``.
"""

import itertools
import json
import math
import random
import time
from fractions import Fraction

import pytest

import oracles
from braidfan.cli import run_command
from braidfan.lattice import Interval, from_elements
from braidfan.network import (
    build_max_network,
    certify_not_representable,
    compose_network,
    depth_bound,
    run_network,
    sigma_target,
)
from braidfan.setfn import (
    SetFn,
    alternating_sum,
    in_hc,
    is_conforming,
    min_level,
    pointwise_max,
    relu_plus,
    supports,
)
from braidfan.transform import PwlExpr, eval_direct, evaluate_setfn, phi, phi_inverse
from braidfan.verify import (
    EXPECTED_SUPP_PLUS,
    FAIL,
    PASS,
    prop51_pair,
    verify_base_and_identities,
    verify_dimensions,
    verify_fan_laws,
    verify_prop51,
    verify_quadratic,
    verify_rank5,
)

criterion = pytest.mark.criterion


def random_rational(rng, lo=-9, hi=9, den=6):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_point(rng, d, tie_prob=0.25):
    x = []
    for _ in range(d):
        x.append(rng.choice(x) if x and rng.random() < tie_prob else random_rational(rng))
    return x


@criterion(1, "seven-variable counterexample: HC, supp+, alternating sum -2, level 7")
def test_c01_seven_variable_counterexample():
    t0 = time.perf_counter()
    f1, f2 = prop51_pair()
    F1, F2 = phi(f1), phi(f2)
    F = F1 - F2
    assert in_hc(F)
    assert supports(F)[1] == EXPECTED_SUPP_PLUS
    assert alternating_sum(relu_plus(F), 0, 0b1111111) == -2
    assert min_level(pointwise_max([F1, F2])).k_min == 7
    assert is_conforming([F1, F2])
    report = verify_prop51()
    assert report.status == PASS and report.details["value"] == -2
    assert time.perf_counter() - t0 < 5


@criterion(2, "certify --l 2 on sigma_[5]: certificate ({}, [5]), -1, bound 4")
def test_c02_two_layer_certificate(capsys):
    t0 = time.perf_counter()
    code = run_command(["certify", "--l", "2", "--target", "sigma:[1..5]", "--json"])
    elapsed = time.perf_counter() - t0
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out == {"S": [], "T": [1, 2, 3, 4, 5], "value": "-1", "depth_bound": 4, "rule": "exact4"}
    assert elapsed < 1


@criterion(3, "one-layer certificate for sigma_[3]; depth bound tables")
def test_c03_one_layer_and_tables():
    cert = certify_not_representable(sigma_target(3, [1, 2, 3]), 1)
    assert (cert.S, cert.T, cert.value, cert.depth_bound) == (0, 0b111, -1, 2)
    assert [depth_bound(l, "closed") for l in (1, 2, 3)] == [2, 8, 128]
    assert [depth_bound(l, "recursive") for l in (1, 2, 3)] == [2, 6, 42]


@criterion(4, "max networks with ranks (3,2) for all |M| <= 6 at d = 7")
def test_c04_max_networks():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    d = 7
    count = 0
    for size in range(1, 7):
        for M in itertools.combinations(range(1, d + 1), size):
            plan = build_max_network(from_elements(M), (3, 2), d)
            F = compose_network(plan)  # raises unless every neuron is conforming
            assert F == phi(PwlExpr.sigma(d, M))
            for _ in range(500):
                x = random_point(rng, d)
                assert run_network(plan, x) == evaluate_setfn(F, x)
            count += 1
    assert count == 2 ** 7 - 2
    assert time.perf_counter() - t0 < 30


@criterion(5, "isomorphism: round trips and interpolation at d = 2..8")
def test_c05_isomorphism():
    t0 = time.perf_counter()
    rng = random.Random(5)
    for d in range(2, 9):
        pairs = []
        for _ in range(200):
            terms = [(rng.randint(1, (1 << d) - 1), random_rational(rng))
                     for _ in range(rng.randint(0, 6))]
            f = PwlExpr.build(d, terms, random_rational(rng))
            F = phi(f)
            assert phi_inverse(F) == f
            pairs.append((f, F))
        for i in range(1000):
            f, F = pairs[i % len(pairs)]
            x = random_point(rng, d, tie_prob=0.4)
            assert evaluate_setfn(F, x) == eval_direct(f, x)
    assert time.perf_counter() - t0 < 60


@criterion(6, "quadratic bound on sampled Sf(k) and HC, with low-support witnesses")
@pytest.mark.parametrize("d,k", [(7, 2), (3, 1)])
def test_c06_quadratic_bound(d, k):
    report = verify_quadratic(d, k, 200, 1)
    assert report.status == PASS  # INCONCLUSIVE counts as a failure here
    assert report.accepted >= 200
    assert report.details["low_support_witnessed"] == report.details["two_sided"] > 0


@criterion(7, "rank-5 classification with pairing and case1-4 branches exercised")
def test_c07_rank_five():
    report = verify_rank5(300, 7)
    assert report.status == PASS and report.accepted >= 300
    branches = report.details["branches"]
    assert branches["pairing"] >= 20
    assert branches["case1_4"] >= 20


@criterion(8, "lattice identities, exhaustive for d <= 5")
def test_c08_lattice_identities():
    t0 = time.perf_counter()
    for d in range(1, 6):
        for k in range(0, d + 1):
            report = verify_base_and_identities(d, k)
            assert report.status == PASS, report.witness
            assert report.details.get("failures", 0) == 0
    assert time.perf_counter() - t0 < 60


@criterion(9, "dimension audit: 1 + sum C(d, i), constant offset reported")
def test_c09_dimensions():
    for d in range(1, 7):
        report = verify_dimensions(d, d)
        assert report.status == PASS
        for row in report.details["rows"]:
            k = row["k"]
            expected = 1 + sum(math.comb(d, i) for i in range(1, k + 1))
            assert row["measured"] == row["orthogonal"] == expected
            assert row["sum_without_constant"] == expected - 1
            assert row["discrepancy"] == 1


@criterion(10, "conformity DP against chain enumeration; cone membership laws")
def test_c10_conformity_and_fan():
    rng = random.Random(10)
    outcomes = []
    for _ in range(500):
        d = rng.randint(1, 6)
        r = rng.randint(1, 3)
        dom = Interval.boolean(d)
        base = SetFn(dom, (rng.choice((-1, 0, 1)) for _ in range(dom.size)))
        fns = [base]
        for _ in range(r - 1):
            if rng.random() < 0.5:
                fns.append(SetFn(dom, (v if rng.random() < 0.85 else rng.choice((-1, 0, 1))
                                       for v in base.values)))
            else:
                fns.append(SetFn(dom, (rng.choice((-1, 0, 1)) for _ in range(dom.size))))
        refs = [oracles.as_dict(g) for g in fns]
        top = frozenset(range(1, d + 1))
        got = is_conforming(fns)
        assert got == oracles.conforming(refs, frozenset(), top)
        outcomes.append(got)
    assert min(outcomes.count(True), outcomes.count(False)) >= 100
    for d, r in [(4, 3), (4, 2), (3, 2)]:
        report = verify_fan_laws(d, r, 200, 3)
        assert report.status == PASS and report.accepted == 200


@criterion(11, "every verifier fails on its built-in mutation")
@pytest.mark.parametrize("name,call", [
    ("prop51", lambda: verify_prop51(mutate=True)),
    ("base", lambda: verify_base_and_identities(4, 2, mutate=True)),
    ("quadratic", lambda: verify_quadratic(7, 2, 200, 1, mutate=True)),
    ("quadratic-small", lambda: verify_quadratic(3, 1, 200, 1, mutate=True)),
    ("rank5", lambda: verify_rank5(300, 7, mutate=True)),
    ("dims", lambda: verify_dimensions(4, 4, mutate=True)),
    ("fan", lambda: verify_fan_laws(3, 2, 200, 3, mutate=True)),
])
def test_c11_mutations_fail(name, call):
    report = call()
    assert report.status == FAIL
    assert report.witness is not None and "check" in report.witness
