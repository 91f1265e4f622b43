"""Closed-form null quantities for random circular arc graphs.

The asymptotic law of ``degree / n`` has CDF

    F(x) = 5/2 - 2 s - x - (1 - s)^2 / 2,   s = sqrt(2 (1 - x)),  x > 1/2

and ``F(x) = 0`` for ``x <= 1/2``; it simplifies to ``1 - s``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circular import TWO_PI, InvalidInputError
from .graph import Arc

EDGE_PROBABILITY = Fraction(5, 6)
NON_EDGE_PROBABILITY = Fraction(1, 6)


def _degree_cdf_array(x: np.ndarray) -> np.ndarray:
    s = np.sqrt(np.clip(2.0 * (1.0 - x), 0.0, None))
    val = 2.5 - 2.0 * s - x - 0.5 * (1.0 - s) ** 2
    return np.where(x > 0.5, np.clip(val, 0.0, 1.0), 0.0)


def theoretical_degree_cdf(x):
    """Asymptotic ``P(degree <= x n)``; accepts a scalar or an array."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise InvalidInputError("degree CDF is defined on [0, 1]")
    out = _degree_cdf_array(arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DegreeLaw:
    """pmf over degrees ``1..n``; ``pmf[i - 1]`` is the mass at degree ``i``."""

    n: int
    pmf: np.ndarray


def theoretical_degree_pmf(n: int) -> DegreeLaw:
    if int(n) != n or n < 2:
        raise InvalidInputError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    grid = np.arange(0, n + 1) / n
    return DegreeLaw(n, np.diff(_degree_cdf_array(grid)))


def fixed_arc_non_intersection_prob(arc: Arc) -> float:
    """Chance that a uniform random arc misses ``arc`` entirely.

    Equal to half the squared fraction of the circle left uncovered by ``arc``.
    """
    gap = 1.0 - arc.length / TWO_PI
    return 0.5 * gap * gap


def arc_length_cdf_uniform(x: float) -> float:
    if not 0 <= x <= TWO_PI:
        raise InvalidInputError(f"arc length must lie in [0, 2pi], got {x!r}")
    return x / TWO_PI


def kolmogorov_distance(degrees, n: int) -> float:
    """sup-distance between the empirical CDF of ``degrees / n`` and the asymptotic law."""
    values, counts = np.unique(np.asarray(degrees, dtype=float) / n, return_counts=True)
    upper = np.cumsum(counts) / counts.sum()  # right limits at the jumps
    lower = upper - counts / counts.sum()
    # the law is continuous, so the sup is attained at a jump from one side
    f = _degree_cdf_array(values)
    return float(max(np.max(np.abs(upper - f)), np.max(np.abs(lower - f))))


# -- exact enumeration over endpoint orderings --------------------------------


def _disjoint(order: dict, a: int, b: int) -> bool:
    """Arcs ``a`` and ``b`` are disjoint under a strict linear order of endpoints.

    The order positions are angles; arcs run anticlockwise from start to end.
    """
    ta, pa = order[("t", a)], order[("p", a)]
    tb, pb = order[("t", b)], order[("p", b)]
    return (
        ta < pa < tb < pb
        or pb < ta < pa < tb
        or tb < pb < ta < pa
        or pa < tb < pb < ta
    )


def ordering_oracle() -> dict[str, Fraction]:
    """Count endpoint orderings to get exact non-intersection probabilities.

    Under i.i.d. continuous endpoints every ordering of the endpoints is
    equally likely, so probabilities are ordering counts over ``k!``.
    """
    two = [("t", 1), ("p", 1), ("t", 2), ("p", 2)]
    pair_hits = 0
    pair_total = 0
    for perm in itertools.permutations(range(4)):
        order = dict(zip(two, perm))
        pair_total += 1
        pair_hits += _disjoint(order, 1, 2)

    three = two + [("t", 3), ("p", 3)]
    joint_hits = 0
    joint_total = 0
    for perm in itertools.permutations(range(6)):
        order = dict(zip(three, perm))
        joint_total += 1
        joint_hits += _disjoint(order, 1, 2) and _disjoint(order, 1, 3)

    pairwise = Fraction(pair_hits, pair_total)
    return {
        "pairwise_non_edge": pairwise,
        "joint_non_edge": Fraction(joint_hits, joint_total),
        "independence_product": pairwise * pairwise,
        "pairwise_count": pair_hits,
        "joint_count": joint_hits,
    }


def _disjoint_cyclic(order: dict, a: int, b: int) -> bool:
    """Same predicate, written as 'both endpoints of b fall in the gap of a'."""
    n = len(order)
    ta, pa = order[("t", a)], order[("p", a)]
    tb, pb = order[("t", b)], order[("p", b)]

    def ccw(x):  # anticlockwise distance from ta
        return (x - ta) % n

    # b must start after a ends and finish before returning to ta
    return ccw(pa) < ccw(tb) < ccw(pb)


def ordering_counts_cyclic() -> tuple[int, int]:
    """Independent recount of the pairwise and joint counts via the gap form."""
    two = [("t", 1), ("p", 1), ("t", 2), ("p", 2)]
    three = two + [("t", 3), ("p", 3)]
    c2 = sum(
        _disjoint_cyclic(dict(zip(two, p)), 1, 2) for p in itertools.permutations(range(4))
    )
    c3 = sum(
        _disjoint_cyclic(o, 1, 2) and _disjoint_cyclic(o, 1, 3)
        for o in (dict(zip(three, p)) for p in itertools.permutations(range(6)))
    )
    return c2, c3


def expected_edge_count(n: int) -> float:
    return float(EDGE_PROBABILITY) * n * (n - 1) / 2


def edge_count_window(n: int) -> float:
    """Half-width ``n ** 1.75`` used for the edge-count concentration check."""
    return math.pow(n, 1.75)
