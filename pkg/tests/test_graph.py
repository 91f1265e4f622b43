import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_array_equal

from conftest import EXAMPLE_SERIES
from rcag.circular import TWO_PI, InvalidInputError, RngSeed, sample_circular_uniform, sample_von_mises, sample_wrapped_cauchy
from rcag.graph import Arc, arc_contains, arc_degrees, arcs_intersect, build_rcag, graph_stats, intersection_matrix, make_arc
from rcag.theory import _disjoint

angle = st.floats(min_value=0.0, max_value=TWO_PI, exclude_max=True, allow_nan=False)


def well_separated(vals) -> bool:
    # the ordering argument assumes distinct points; float ties at 2pi scale are not
    s = np.sort(vals)
    gaps = np.diff(np.r_[s, s[0] + TWO_PI])
    return bool(gaps.min() > 1e-9)


distinct_four = st.lists(angle, min_size=4, max_size=4).filter(well_separated)


def brute_degrees(starts, ends):
    arcs = [Arc(s, e) for s, e in zip(starts, ends)]
    n = len(arcs)
    return np.array([sum(arcs_intersect(arcs[i], arcs[j]) for j in range(n) if j != i) for i in range(n)])


def ordering_says_disjoint(vals) -> bool:
    """Disjointness from the rank order of (theta1, phi1, theta2, phi2) alone."""
    ranks = {key: int(r) for key, r in zip([("t", 1), ("p", 1), ("t", 2), ("p", 2)], np.argsort(np.argsort(vals)))}
    return _disjoint(ranks, 1, 2)


class TestArc:
    def test_lengths(self):
        assert make_arc(1, 2).length == pytest.approx(1.0)
        assert make_arc(4, 3).length == pytest.approx(TWO_PI - 1)
        assert make_arc(0.7, 0.7).length == 0.0

    def test_contains(self):
        assert arc_contains(make_arc(1, 2), 1.5)
        assert arc_contains(make_arc(4, 3), 0.5)
        assert not arc_contains(make_arc(1, 2), 3)

    def test_intersect_examples(self):
        assert not arcs_intersect(make_arc(1, 2), make_arc(3, 4))
        assert arcs_intersect(make_arc(1, 2), make_arc(4, 3))
        a = make_arc(2.5, 0.3)
        assert arcs_intersect(a, a)

    def test_touching_counts(self):
        assert arcs_intersect(make_arc(1, 2), make_arc(2, 3))

    def test_point_arc(self):
        p = make_arc(1.5, 1.5)
        assert arcs_intersect(p, make_arc(1, 2))
        assert not arcs_intersect(p, make_arc(2, 3))

    @given(angle, angle, angle, angle)
    def test_symmetric(self, a, b, c, d):
        x, y = make_arc(a, b), make_arc(c, d)
        assert arcs_intersect(x, y) == arcs_intersect(y, x)

    @given(distinct_four)
    def test_matches_ordering_characterisation(self, vals):
        a, b = make_arc(vals[0], vals[1]), make_arc(vals[2], vals[3])
        assert arcs_intersect(a, b) == (not ordering_says_disjoint(vals))

    def test_all_24_orderings(self):
        base = np.array([0.4, 1.9, 3.1, 5.2])
        for perm in itertools.permutations(range(4)):
            vals = base[list(perm)]
            a, b = make_arc(vals[0], vals[1]), make_arc(vals[2], vals[3])
            assert arcs_intersect(a, b) == (not ordering_says_disjoint(vals))


class TestBuild:
    def test_two_disjoint(self):
        g = build_rcag([1, 2, 3, 4])
        assert g.n == 2 and g.edge_count == 0
        assert_array_equal(g.degrees, [0, 0])

    def test_two_meeting(self):
        g = build_rcag([1, 2, 4, 3])
        assert g.edge_count == 1
        assert_array_equal(g.degrees, [1, 1])

    def test_example_arcs(self):
        g = build_rcag(EXAMPLE_SERIES)
        assert g.n == 10
        assert g.arcs[0] == Arc(2.17, 6.12)
        assert g.arcs[9] == Arc(0.54, 0.27)
        assert [a.start for a in g.arcs] == EXAMPLE_SERIES[0::2]

    @pytest.mark.parametrize("bad", [[1.0, 2.0], [1.0, 2.0, 3.0], [0.1] * 7])
    def test_rejects_odd_or_short(self, bad):
        with pytest.raises(InvalidInputError):
            build_rcag(bad)

    def test_order_matters(self):
        x = np.array([1, 2, 4, 3], dtype=float)
        assert build_rcag(x).edge_count != build_rcag(x[[0, 1, 3, 2]]).edge_count

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 60), st.integers(0, 2**32))
    def test_blocked_sweep_matches_brute_force(self, n, master):
        x = sample_circular_uniform(RngSeed(master), 2 * n)
        g = build_rcag(x)
        assert_array_equal(g.degrees, brute_degrees(x[0::2], x[1::2]))
        assert g.degrees.sum() == 2 * g.edge_count
        assert g.degrees.max() <= n - 1

    def test_large_block_boundary(self):
        x = sample_circular_uniform(RngSeed(12), 2 * 600)
        adj = intersection_matrix(x[0::2], x[1::2])
        assert_array_equal(adj, adj.T)
        assert not adj.diagonal().any()
        assert_array_equal(adj.sum(axis=1), arc_degrees(x[0::2], x[1::2]))

    def test_duplicate_values(self):
        g = build_rcag([1.0, 1.0, 1.0, 2.0, 2.0, 3.0])
        assert_array_equal(g.degrees, [1, 2, 1])


class TestStats:
    def test_disconnected(self):
        s = graph_stats(build_rcag([1, 2, 3, 4]))
        assert s.edge_count == 0 and s.connected is False
        assert s.min_degree == s.max_degree == 0

    def test_connectivity_optional(self):
        s = graph_stats(build_rcag([1, 2, 4, 3]), connectivity=False)
        assert s.connected is None

    def test_large_graph_extremes(self):
        n = 1000
        full = half = conn = 0
        for i in range(20):
            s = graph_stats(build_rcag(sample_circular_uniform(RngSeed(13).child("g", i), 2 * n)))
            assert s.min_degree <= s.max_degree <= n - 1
            full += s.max_degree == n - 1
            half += s.min_degree >= 0.45 * n
            conn += s.connected
        assert full == half == conn == 20


class TestEdgeProbability:
    @pytest.mark.parametrize(
        "sampler",
        [
            lambda s, k: sample_circular_uniform(s, k),
            lambda s, k: sample_von_mises(s, 0.0, 2.0, k),
            lambda s, k: sample_wrapped_cauchy(s, 0.0, 0.5, k),
        ],
        ids=["uniform", "von-mises", "wrapped-cauchy"],
    )
    def test_five_sixths(self, sampler):
        from rcag.validate import edge_frequency

        f = edge_frequency(RngSeed(14), 1_000_000, sampler)
        assert abs(f - 5 / 6) <= 0.0015

    def test_edge_count_concentration(self):
        n = 2000
        window = n**1.75
        for i in range(10):
            g = build_rcag(sample_circular_uniform(RngSeed(15).child("e", i), 2 * n))
            # ordered intersecting pairs against their mean (5/6) n (n - 1)
            assert abs(2 * g.edge_count - 5 / 6 * n * (n - 1)) < window
            assert abs(g.edge_count / n**2 - 5 / 12) < 0.01
