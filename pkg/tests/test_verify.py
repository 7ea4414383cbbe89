import json

import pytest

from braidfan.lattice import GuardError, Interval
from braidfan.setfn import SetFn
from braidfan.verify import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    Report,
    in_cone,
    maxout4d_conclusion,
    orthogonal_dimension,
    verify_base_and_identities,
    verify_dimensions,
    verify_fan_laws,
    verify_prop51,
    verify_quadratic,
    verify_rank5,
)


class TestReport:
    def test_first_failure_is_the_witness(self):
        r = Report("x", {})
        r.fail("a", S=[1])
        r.fail("b", S=[2])
        assert r.status == FAIL and r.witness == {"check": "a", "S": [1]}
        assert r.details["failures"] == 2 and r.exit_code == 1

    def test_json_is_deterministic(self):
        a = verify_rank5(40, 3)
        b = verify_rank5(40, 3)
        assert a.to_json() == b.to_json()
        assert "wall_time" not in json.loads(a.to_json())
        assert "wall_time" in json.loads(a.to_json(timing=True))

    def test_pass_is_labelled_property_verified(self):
        assert json.loads(verify_prop51().to_json())["label"] == "property-verified"


class TestProp51:
    def test_pass(self):
        r = verify_prop51()
        assert r.status == PASS and r.details["value"] == -2
        assert r.details["min_level_of_max"] == 7
        assert r.details["levels_of_inputs"] == [3, 3]

    def test_swap(self):
        assert verify_prop51(swap=True).status == PASS

    def test_mutation(self):
        r = verify_prop51(mutate=True)
        assert r.status == FAIL and r.witness["check"].startswith("(a)")
        assert r.witness["S"] == [1, 2] and r.witness["T"] == [1, 2, 3]


class TestBase:
    @pytest.mark.parametrize("d,k", [(4, 2), (3, 1), (5, 3), (2, 0), (1, 1)])
    def test_pass(self, d, k):
        r = verify_base_and_identities(d, k)
        assert r.status == PASS
        assert r.details["relu_span_dimension"] == r.details["dim_sf2"]

    def test_figure_instance(self):
        assert verify_base_and_identities(4, 2).details["figure_instance_matches"]

    def test_mutation(self):
        r = verify_base_and_identities(4, 2, mutate=True)
        assert r.status == FAIL and r.witness["check"].startswith("(ii)")

    def test_guards(self):
        with pytest.raises(GuardError):
            verify_base_and_identities(7, 2)
        with pytest.raises(ValueError):
            verify_base_and_identities(3, 3, mutate=True)


class TestSampled:
    def test_quadratic_small(self):
        r = verify_quadratic(4, 1, 50, 2)
        assert r.status == PASS and r.details["two_sided"] == r.details["low_support_witnessed"]

    def test_starvation_is_inconclusive(self, monkeypatch):
        from braidfan import verify as v

        original = v.sample_sf_hc
        monkeypatch.setattr(v, "sample_sf_hc",
                            lambda *a, **kw: original(*a, **{**kw, "max_attempts": 5}))
        starved = verify_quadratic(4, 1, 50, 2)
        assert starved.status == INCONCLUSIVE and starved.exit_code == 3
        assert starved.accepted <= 5

    def test_quadratic_mutation(self):
        assert verify_quadratic(3, 1, 100, 1, mutate=True).status == FAIL

    def test_rank5_branches(self):
        r = verify_rank5(150, 7)
        assert r.status == PASS
        b = r.details["branches"]
        assert b["pairing"] > 0 and b["case1_4"] > 0 and b["level1"] > 0

    def test_rank5_mutation(self):
        r = verify_rank5(100, 7, mutate=True)
        assert r.status == FAIL and r.witness["check"] == "F+ in Sf(4)"

    def test_maxout4d(self):
        c = maxout4d_conclusion()
        assert c["holds"] and c["bound"] == 4 and c["level"] == 5


class TestDimensions:
    @pytest.mark.parametrize("d,k,want", [(4, 2, 11), (1, 0, 1), (5, 5, 32), (3, 1, 4)])
    def test_examples(self, d, k, want):
        assert orthogonal_dimension(d, k) == want
        r = verify_dimensions(d, k)
        row = r.details["rows"][-1]
        assert r.status == PASS and row["measured"] == want
        assert row["sum_without_constant"] == want - 1 and row["discrepancy"] == 1

    def test_mutation(self):
        assert verify_dimensions(3, 2, mutate=True).status == FAIL

    def test_guard(self):
        with pytest.raises(GuardError):
            verify_dimensions(7, 1)


class TestFan:
    def test_pass(self):
        r = verify_fan_laws(3, 2, 100, 3)
        assert r.status == PASS and r.details["laws"]["refined_conforming"] > 0

    def test_mutation(self):
        assert verify_fan_laws(3, 2, 50, 3, mutate=True).status == FAIL

    def test_full_map_is_the_diagonal(self):
        dom = Interval.boolean(2)
        F = SetFn(dom, [1, 0, 2, -1])
        G = SetFn(dom, [1, 0, 2, 0])
        full_map = [0b11] * 4
        assert in_cone([F, F], full_map)
        assert not in_cone([F, G], full_map)

    def test_excluded_from_union_cone(self):
        dom = Interval.boolean(1)
        F, G = SetFn(dom, [0, 1]), SetFn(dom, [0, 0])
        a = [0b01, 0b10]  # G attains the max at {1}: false
        b = [0b01, 0b01]
        assert in_cone([F, G], b) and not in_cone([F, G], a)
        union = [x | y for x, y in zip(a, b)]
        assert not in_cone([F, G], union)

    def test_guard(self):
        with pytest.raises(GuardError):
            verify_fan_laws(5, 2, 10, 1)
