"""Monte-Carlo and exact checks of the null-model facts the tests rely on."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circular import TWO_PI, RngSeed, sample_circular_uniform, sample_von_mises, wrap
from .graph import build_rcag, graph_stats, make_arc
from .theory import (
    EDGE_PROBABILITY,
    fixed_arc_non_intersection_prob,
    kolmogorov_distance,
    ordering_counts_cyclic,
    ordering_oracle,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    observed: str
    expected: str
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "observed": self.observed, "expected": self.expected, "passed": self.passed}


def intersection_frequency(starts_a, ends_a, starts_b, ends_b) -> float:
    la = wrap(ends_a - starts_a)
    lb = wrap(ends_b - starts_b)
    meet = (wrap(starts_b - starts_a) <= la) | (wrap(starts_a - starts_b) <= lb)
    return float(meet.mean())


def edge_frequency(seed: RngSeed, draws: int, sampler=None) -> float:
    """Share of ``draws`` independent arc pairs that intersect."""
    sampler = sampler or (lambda s, k: sample_circular_uniform(s, k))
    e = sampler(seed, 4 * draws).reshape(4, draws)
    return intersection_frequency(e[0], e[1], e[2], e[3])


def _check_edges(seed: RngSeed, draws: int) -> list[CheckResult]:
    target = float(EDGE_PROBABILITY)
    samplers = {
        "uniform": lambda s, k: sample_circular_uniform(s, k),
        "von-mises(0,2)": lambda s, k: sample_von_mises(s, 0.0, 2.0, k),
    }
    out = []
    for label, sampler in samplers.items():
        f = edge_frequency(seed.child("edges", len(out)), draws, sampler)
        out.append(CheckResult(f"edge probability, {label} endpoints", f"{f:.5f}", "0.83333 +/- 0.0015",
                               abs(f - target) <= 0.0015))
    return out


def _check_oracle() -> list[CheckResult]:
    o = ordering_oracle()
    c2, c3 = ordering_counts_cyclic()
    return [
        CheckResult("pairwise non-edge probability (exact)", str(o["pairwise_non_edge"]), "1/6",
                    o["pairwise_non_edge"] == Fraction(1, 6) and c2 == o["pairwise_count"]),
        CheckResult("joint non-edge probability (exact)", str(o["joint_non_edge"]), "1/20",
                    o["joint_non_edge"] == Fraction(1, 20) and c3 == o["joint_count"]),
        CheckResult("independence product (exact)", str(o["independence_product"]), "1/36",
                    o["independence_product"] == Fraction(1, 36)),
    ]


def _check_arc_length(seed: RngSeed, draws: int) -> CheckResult:
    e = sample_circular_uniform(seed.child("arc-length"), 2 * draws).reshape(2, draws)
    lengths = np.sort(wrap(e[1] - e[0]))
    ecdf = np.arange(1, draws + 1) / draws
    d = float(np.max(np.maximum(np.abs(ecdf - lengths / TWO_PI), np.abs(ecdf - 1 / draws - lengths / TWO_PI))))
    return CheckResult("arc length CDF is x/2pi (Kolmogorov distance)", f"{d:.5f}", "< 0.005", d < 0.005)


def _check_fixed_arc(seed: RngSeed, draws: int) -> CheckResult:
    worst = 0.0
    for i, length in enumerate((0.1, math.pi / 2, math.pi, 3 * math.pi / 2, 6.0)):
        arc = make_arc(0.0, length)
        e = sample_circular_uniform(seed.child("fixed-arc", i), 2 * draws).reshape(2, draws)
        miss = 1.0 - intersection_frequency(np.zeros(draws), np.full(draws, arc.end), e[0], e[1])
        worst = max(worst, abs(miss - fixed_arc_non_intersection_prob(arc)))
    return CheckResult("fixed-arc miss probability, worst error over 5 lengths", f"{worst:.5f}", "< 0.002",
                       worst < 0.002)


def _check_degree_law(seed: RngSeed, graphs: int) -> list[CheckResult]:
    out = []
    n = 2000
    for label, draw in (
        ("uniform", lambda s: sample_circular_uniform(s, 2 * n)),
        ("von-mises(0,2)", lambda s: sample_von_mises(s, 0.0, 2.0, 2 * n)),
    ):
        hits = sum(
            kolmogorov_distance(build_rcag(draw(seed.child(f"degree-law-{label}", i))).degrees, n) < 0.05
            for i in range(graphs)
        )
        out.append(CheckResult(f"degree CDF near its limit at n={n}, {label}", f"{hits}/{graphs}",
                               f">= {math.ceil(0.95 * graphs)}/{graphs}", hits >= 0.95 * graphs))
    return out


def _check_extremes(seed: RngSeed, graphs: int) -> list[CheckResult]:
    n = 1000
    full = conn = half = 0
    for i in range(graphs):
        st = graph_stats(build_rcag(sample_circular_uniform(seed.child("extremes", i), 2 * n)))
        full += st.max_degree == n - 1
        conn += bool(st.connected)
        half += st.min_degree >= 0.45 * n
    need = math.ceil(0.99 * graphs)
    return [
        CheckResult(f"max degree n-1 at n={n}", f"{full}/{graphs}", f">= {need}/{graphs}", full >= need),
        CheckResult(f"connected at n={n}", f"{conn}/{graphs}", f">= {need}/{graphs}", conn >= need),
        CheckResult(f"min degree >= 0.45 n at n={n}", f"{half}/{graphs}", f">= {need}/{graphs}", half >= need),
    ]


def validate_theory(seed: RngSeed = RngSeed(0), draws: int = 1_000_000, graphs: int = 100) -> list[CheckResult]:
    results = _check_edges(seed, draws)
    results += _check_oracle()
    results.append(_check_arc_length(seed, draws))
    results.append(_check_fixed_arc(seed, draws))
    results += _check_degree_law(seed, graphs)
    results += _check_extremes(seed, graphs)
    return results
