import json
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy.stats import false_discovery_control

from conftest import EXAMPLE_PAIRING, EXAMPLE_SERIES, oracle_float, oracle_fraction
from rcag.calibration import MissingThresholdError, ThresholdTable
from rcag.circular import InvalidInputError, RngSeed, sample_circular_uniform
from rcag.randomness import (
    LARGE_SAMPLE_PAIRS,
    bh_adjust,
    dd_test,
    ep_exact_spec,
    ep_statistic,
    ep_test,
    ep_test_large,
    random_disjoint_pairing,
)

p_values = st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=20)


class TestPairing:
    def test_two_vertices(self):
        pairs = random_disjoint_pairing(2, RngSeed(0))
        assert sorted(pairs.ravel().tolist()) == [0, 1]

    def test_deterministic(self):
        assert_array_equal(random_disjoint_pairing(10, RngSeed(3)), random_disjoint_pairing(10, RngSeed(3)))

    @given(st.integers(1, 50), st.integers(0, 2**32))
    def test_perfect_matching(self, half, master):
        pairs = random_disjoint_pairing(2 * half, RngSeed(master))
        assert pairs.shape == (half, 2)
        assert_array_equal(np.sort(pairs.ravel()), np.arange(2 * half))

    @pytest.mark.parametrize("bad", [0, 3, 7])
    def test_odd(self, bad):
        with pytest.raises(InvalidInputError):
            random_disjoint_pairing(bad, RngSeed(0))

    def test_uniform_marginal(self):
        seeds = RngSeed(40)
        counts = Counter()
        reps = 100_000
        for i in range(reps):
            for a, b in random_disjoint_pairing(10, seeds.child("m", i)):
                counts[frozenset((int(a), int(b)))] += 1
        target = float(oracle_fraction("pairing_marginal_10"))
        assert len(counts) == 45
        assert max(abs(c / reps - target) for c in counts.values()) < 0.01


class TestEpStatistic:
    def test_worked_example(self):
        out = ep_statistic(EXAMPLE_SERIES, pairing=EXAMPLE_PAIRING)
        assert out.count == 1
        # with anticlockwise arcs [0.54, 0.27] wraps around and contains [2.17, 6.12];
        # the one disjoint pair is [3.73, 0.10] with [0.24, 2.85]
        assert_array_equal(out.y, [0, 0, 0, 0, 1])

    def test_single_pair(self):
        out = ep_statistic([1, 2, 3, 4, 1, 2, 4, 3], pairing=[(0, 1), (2, 3)])
        assert_array_equal(out.y, [1, 0])

    @pytest.mark.parametrize("m", [4, 6, 10])
    def test_length_rule(self, m):
        with pytest.raises(InvalidInputError):
            ep_statistic(np.zeros(m), RngSeed(0))

    def test_bad_pairing(self):
        with pytest.raises(InvalidInputError):
            ep_statistic(EXAMPLE_SERIES, pairing=[(0, 0), (1, 2), (3, 4), (5, 6), (7, 8)])

    def test_null_mean(self):
        x = sample_circular_uniform(RngSeed(41), 8 * 1_000_000).reshape(-1, 8)
        # the statistic on length-8 series is the average of two independent pair flags
        ys = [ep_statistic(row, RngSeed(41).child("p", i)).p_hat for i, row in enumerate(x[:20000])]
        assert abs(np.mean(ys) - 1 / 6) < 0.006
        assert abs(float(pair_mean(x)) - 1 / 6) < 0.002


def pair_mean(rows) -> float:
    """Vectorised mean of disjoint-pair flags with the fixed pairing (0,1),(2,3)."""
    from rcag.validate import intersection_frequency

    a = intersection_frequency(rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3])
    b = intersection_frequency(rows[:, 4], rows[:, 5], rows[:, 6], rows[:, 7])
    return 1 - (a + b) / 2


class TestLargeSample:
    def test_null_centre(self):
        r = ep_test_large(1 / 6, 500, 0.05)
        assert r.p_value == 1.0 and r.decision == "not-reject"

    def test_cutoff_and_reject(self):
        r = ep_test_large(0.21, 500, 0.05)
        assert r.cutoff == pytest.approx(oracle_float("ep_cutoff_n500_a05"), abs=1e-12)
        assert r.p_value == pytest.approx(oracle_float("ep_pvalue_n500_phat021"), rel=1e-9)
        assert r.decision == "reject"

    @given(st.floats(0, 1), st.integers(60, 5000), st.sampled_from([0.01, 0.05, 0.1]))
    def test_pvalue_rule_matches_cutoff_rule(self, p_hat, n, alpha):
        r = ep_test_large(p_hat, n, alpha)
        if abs(r.deviation - r.cutoff) > 1e-9:
            assert (r.decision == "reject") == (r.deviation > r.cutoff)


class TestExactSpec:
    def test_five_pairs(self):
        s = ep_exact_spec(5, 0.05)
        assert s.K1 == frozenset({4, 5})
        assert s.K2 == frozenset({0, 3})
        assert s.gamma_upper == oracle_fraction("exact_n5_gamma_upper")
        assert s.gamma_lower == oracle_fraction("exact_n5_gamma_lower")
        assert float(s.gamma_lower) == pytest.approx(0.0622, abs=1e-4)
        assert s.phi(1) == 0

    @pytest.mark.parametrize("alpha", ["0.01", "0.05", "0.1"])
    def test_size_identity(self, alpha):
        for n in range(1, 201):
            s = ep_exact_spec(n, alpha)
            assert s.size() == Fraction(alpha)
            assert all(0 <= g <= 1 for g in s.gamma.values())

    def test_bad_alpha(self):
        for bad in (0, 1, 1.5):
            with pytest.raises(InvalidInputError):
                ep_exact_spec(5, bad)

    @settings(max_examples=200)
    @given(st.integers(1, 59), st.sampled_from([0.01, 0.05, 0.1, 0.2]), st.data())
    def test_pvalue_agrees_with_phi(self, n, alpha, data):
        s = ep_exact_spec(n, alpha)
        y = data.draw(st.integers(0, n))
        u = data.draw(st.floats(0, 1, exclude_max=True))
        if any(abs(u - float(g)) < 1e-9 or abs(1 - u - float(g)) < 1e-9 for g in s.gamma.values()):
            return
        assert s.rejects(y, u) == (s.p_value(y, u) <= alpha)

    def test_rejection_probability_by_integration(self):
        s = ep_exact_spec(12, 0.05)
        u = (np.arange(200_000) + 0.5) / 200_000
        for y in range(13):
            share = np.mean([s.rejects(y, v) for v in u[::100]])
            assert share == pytest.approx(float(s.phi(y)), abs=1e-3)


class TestBH:
    @given(p_values)
    def test_matches_scipy(self, p):
        assert_allclose(bh_adjust(p), false_discovery_control(p, method="bh"), atol=1e-12)

    def test_not_idempotent_in_general(self):
        once = bh_adjust([0.0, 1.0, 0.5])
        assert_allclose(once, [0.0, 1.0, 0.75])
        assert_allclose(bh_adjust(once), [0.0, 1.0, 1.0])

    @given(p_values)
    def test_second_pass_never_lowers(self, p):
        once = bh_adjust(p)
        twice = bh_adjust(once)
        assert np.all(twice >= once - 1e-12)
        # order is kept: a smaller adjusted value never overtakes a larger one
        lower = once[:, None] < once[None, :]
        assert not np.any(lower & (twice[:, None] > twice[None, :] + 1e-12))

    @given(st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=1))
    def test_single_value_fixed(self, p):
        assert_allclose(bh_adjust(bh_adjust(p)), bh_adjust(p))

    @given(p_values, st.data())
    def test_monotone(self, p, data):
        bumps = data.draw(st.lists(st.floats(0, 1), min_size=len(p), max_size=len(p)))
        q = np.minimum(np.asarray(p) + np.asarray(bumps), 1.0)
        assert np.all(bh_adjust(q) >= bh_adjust(p) - 1e-12)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            bh_adjust([])
        with pytest.raises(InvalidInputError):
            bh_adjust([0.5, 1.2])


class TestEpTest:
    def test_worked_example(self):
        out = ep_test(EXAMPLE_SERIES, 0.05, RngSeed(0), pairing=EXAMPLE_PAIRING)
        assert out.decision == "not-reject"
        g = out.groups[0]
        assert g.method == "exact-randomized" and g.details["disjoint_pairs"] == 1

    def test_example_not_rejected_for_any_coin(self):
        for i in range(50):
            assert not ep_test(EXAMPLE_SERIES, 0.05, RngSeed(i), pairing=EXAMPLE_PAIRING).rejected

    @pytest.mark.parametrize("m,groups", [(240, 1), (241, 2), (242, 3), (243, 4), (1000, 1)])
    def test_grouping(self, m, groups):
        out = ep_test(sample_circular_uniform(RngSeed(42), m), 0.05, RngSeed(1))
        assert len(out.groups) == groups
        assert [g.start for g in out.groups] == list(range(groups))
        assert all(g.length == m - m % 4 for g in out.groups)
        assert (out.adjusted_p_values is None) == (groups == 1)
        method = "normal" if (m // 4) >= LARGE_SAMPLE_PAIRS else "exact-randomized"
        assert out.groups[0].method == method

    def test_small_grouped_uses_fuzzy_pvalues(self):
        out = ep_test(sample_circular_uniform(RngSeed(43), 70), 0.05, RngSeed(2))
        assert len(out.groups) == 3
        assert all(g.method == "exact-randomized" and 0 <= g.p_value <= 1 for g in out.groups)
        assert out.rejected == (min(out.adjusted_p_values) <= 0.05)

    def test_deterministic_json(self):
        x = sample_circular_uniform(RngSeed(44), 1001)
        a = json.dumps(ep_test(x, 0.05, RngSeed(5)).to_dict(), sort_keys=True)
        b = json.dumps(ep_test(x, 0.05, RngSeed(5)).to_dict(), sort_keys=True)
        assert a == b

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            ep_test(np.zeros(7), 0.05, RngSeed(0))

    @pytest.mark.parametrize("m", [40, 1000])
    def test_size(self, m):
        reps = 2000
        hits = sum(ep_test(sample_circular_uniform(RngSeed(45).child("x", i), m), 0.05, RngSeed(45).child("t", i)).rejected
                   for i in range(reps))
        assert abs(hits / reps - 0.05) <= 3 * np.sqrt(0.05 * 0.95 / reps)


class TestDdTest:
    def test_even(self, small_table):
        x = sample_circular_uniform(RngSeed(50), 200)
        out = dd_test(x, 0.05, small_table)
        g = out.groups[0]
        assert g.threshold == small_table.threshold(200, 0.05)
        assert out.decision == ("reject" if g.statistic > g.threshold else "not-reject")

    def test_odd_uses_half_level(self, small_table):
        x = sample_circular_uniform(RngSeed(51), 201)
        out = dd_test(x, 0.05, small_table)
        assert [g.start for g in out.groups] == [0, 1]
        assert all(g.threshold == small_table.threshold(200, 0.025) for g in out.groups)

    def test_missing_entry(self, small_table):
        with pytest.raises(MissingThresholdError, match="m=300"):
            dd_test(sample_circular_uniform(RngSeed(52), 300), 0.05, small_table)

    def test_calibrate_missing(self):
        table = ThresholdTable()
        out = dd_test(sample_circular_uniform(RngSeed(53), 40), 0.05, table, calibrate_missing=True,
                      calibration_k=200, calibration_seed=RngSeed(1))
        assert table.get(40, 0.05) is not None
        assert out.provenance["thresholds"]["k"] == 200

    def test_dependent_series_rejected(self, small_table):
        from rcag.procgen import generate, parse_process_spec

        x = generate(parse_process_spec("lar1:rho=0.9"), 200, RngSeed(54))
        assert dd_test(x, 0.05, small_table).rejected

    def test_tiny_series(self, small_table):
        with pytest.raises(InvalidInputError):
            dd_test([1.0, 2.0, 3.0], 0.05, small_table)
