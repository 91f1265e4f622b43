"""The edge-probability (EP) and degree-distribution (DD) randomness tests.

EP pairs up the arcs of a series at random and compares the share of
non-intersecting pairs with its null value 1/6. DD compares the degree pmf
of the whole arc graph with the asymptotic null law against a Monte-Carlo
cutoff. Both return a :class:`TestOutcome` that records enough to replay
the decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.stats import norm

from .calibration import MissingThresholdError, ThresholdTable, calibrate_threshold, default_table
from .circular import InvalidInputError, RngSeed, normalize_angles, wrap
from .degree import dd_statistic
from .theory import NON_EDGE_PROBABILITY

# pairs needed before the normal approximation replaces the exact test;
# n * min(p, 1 - p) >= 10 with p = 1/6
LARGE_SAMPLE_PAIRS = 60

REJECT = "reject"
NOT_REJECT = "not-reject"

_P0 = float(NON_EDGE_PROBABILITY)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def _verdict(flag: bool) -> str:
    return REJECT if flag else NOT_REJECT


# -- pairing and the EP statistic ---------------------------------------------


def random_disjoint_pairing(n_vertices: int, seed: RngSeed) -> np.ndarray:
    """Uniform random perfect matching of ``0..n_vertices-1``, shape ``(n_vertices // 2, 2)``."""
    if int(n_vertices) != n_vertices or n_vertices < 2 or n_vertices % 2:
        raise InvalidInputError(f"need an even number (>= 2) of vertices, got {n_vertices!r}")
    perm = seed.generator().permutation(int(n_vertices))
    return perm.reshape(-1, 2)


def _check_pairing(pairs, n_vertices: int) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape != (n_vertices // 2, 2):
        raise InvalidInputError(f"pairing must have shape ({n_vertices // 2}, 2), got {pairs.shape}")
    if not np.array_equal(np.sort(pairs.ravel()), np.arange(n_vertices)):
        raise InvalidInputError("pairing must use every vertex exactly once")
    return pairs


@dataclass(frozen=True)
class PairingOutcome:
    pairs: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)  # 1 where the paired arcs are disjoint

    @property
    def n(self) -> int:
        return int(self.y.size)

    @property
    def count(self) -> int:
        return int(self.y.sum())

    @property
    def p_hat(self) -> float:
        return float(self.y.mean())


def ep_statistic(series, seed: RngSeed | None = None, pairing=None) -> PairingOutcome:
    """Pair the ``2n`` arcs of a length-``4n`` series and flag disjoint pairs.

    ``pairing`` (0-based vertex indices) overrides the seeded random matching.
    """
    x = normalize_angles(series)
    if x.ndim != 1 or x.size < 8 or x.size % 4:
        raise InvalidInputError(f"EP statistic needs a length divisible by 4 and >= 8, got {x.size}")
    starts, ends = x[0::2], x[1::2]
    nv = starts.size
    if pairing is None:
        if seed is None:
            raise InvalidInputError("either a seed or an explicit pairing is required")
        pairs = random_disjoint_pairing(nv, seed)
    else:
        pairs = _check_pairing(pairing, nv)
    a, b = pairs[:, 0], pairs[:, 1]
    lengths = wrap(ends - starts)
    meet = (wrap(starts[b] - starts[a]) <= lengths[a]) | (wrap(starts[a] - starts[b]) <= lengths[b])
    return PairingOutcome(pairs, (~meet).astype(np.int64))


# -- large-sample EP ------------------------------------------------------------


@dataclass(frozen=True)
class LargeSampleResult:
    deviation: float
    cutoff: float
    p_value: float
    decision: str


def ep_test_large(p_hat: float, n: int, alpha: float) -> LargeSampleResult:
    """Two-sided normal test of ``p = 1/6`` with ``Var(p_hat) = 5 / (36 n)``."""
    alpha = _check_alpha(alpha)
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n!r}")
    sd = math.sqrt(5.0 / (36.0 * n))
    dev = abs(float(p_hat) - _P0)
    p = float(min(1.0, 2.0 * norm.sf(dev / sd)))
    return LargeSampleResult(dev, sd * float(norm.isf(alpha / 2.0)), p, _verdict(p <= alpha))


# -- exact randomized EP ------------------------------------------------------


@lru_cache(maxsize=None)
def _null_pmf(n: int) -> tuple[Fraction, ...]:
    p, q = NON_EDGE_PROBABILITY, 1 - NON_EDGE_PROBABILITY
    return tuple(math.comb(n, k) * p**k * q ** (n - k) for k in range(n + 1))


@dataclass(frozen=True)
class ExactTestSpec:
    """Equal-tailed randomized test of ``Y ~ Binomial(n, 1/6)``.

    Counts in ``K1`` are always rejected; a boundary count ``b`` in ``K2`` is
    rejected with probability ``gamma[b]``. Each tail carries exactly
    ``alpha / 2``. With a single coin ``u``, the upper boundary rejects when
    ``u <= gamma_upper`` and the lower one when ``1 - u <= gamma_lower``,
    which is the same event as ``p_value(y, u) <= alpha``.
    """

    n: int
    alpha: Fraction
    K1: frozenset
    lower_boundary: int
    gamma_lower: Fraction
    upper_boundary: int
    gamma_upper: Fraction

    @property
    def K2(self) -> frozenset:
        return frozenset(b for b, g in self.gamma.items() if g > 0)

    @property
    def gamma(self) -> dict[int, Fraction]:
        g = {self.upper_boundary: self.gamma_upper}
        g[self.lower_boundary] = g.get(self.lower_boundary, Fraction(0)) + self.gamma_lower
        return g

    def phi(self, y: int) -> Fraction:
        if y in self.K1:
            return Fraction(1)
        return self.gamma.get(y, Fraction(0))

    def size(self) -> Fraction:
        return sum((self.phi(k) * pk for k, pk in enumerate(_null_pmf(self.n))), Fraction(0))

    def p_value(self, y: int, u: float) -> float:
        """Randomized ("fuzzy") two-sided p-value realized with coin ``u`` in [0, 1)."""
        if not 0 <= y <= self.n:
            raise InvalidInputError(f"count {y} outside 0..{self.n}")
        pmf = _null_pmf(self.n)
        below = sum(pmf[:y], Fraction(0))
        above = sum(pmf[y + 1 :], Fraction(0))
        at = pmf[y]
        p_up = float(above) + u * float(at)
        p_low = float(below) + (1.0 - u) * float(at)
        return min(1.0, 2.0 * min(p_up, p_low))

    def rejects(self, y: int, u: float) -> bool:
        if y in self.K1:
            return True
        hit = False
        if y == self.upper_boundary:
            hit |= u <= self.gamma_upper
        if y == self.lower_boundary:
            hit |= 1 - u <= self.gamma_lower
        return bool(hit)


@lru_cache(maxsize=None)
def _exact_spec(n: int, alpha: Fraction) -> ExactTestSpec:
    pmf = _null_pmf(n)
    half = alpha / 2
    # upper: smallest k with P(Y >= k) <= alpha/2
    tail = Fraction(0)
    k_up = n + 1
    for k in range(n, -1, -1):
        if tail + pmf[k] > half:
            break
        tail += pmf[k]
        k_up = k
    upper_tail = tail
    # lower: largest k with P(Y <= k) <= alpha/2
    tail = Fraction(0)
    k_low = -1
    for k in range(n + 1):
        if tail + pmf[k] > half:
            break
        tail += pmf[k]
        k_low = k
    lower_tail = tail
    b_up, b_low = k_up - 1, k_low + 1
    rejected = frozenset(range(0, k_low + 1)) | frozenset(range(k_up, n + 1))
    return ExactTestSpec(
        n=n,
        alpha=alpha,
        K1=rejected,
        lower_boundary=b_low,
        gamma_lower=(half - lower_tail) / pmf[b_low],
        upper_boundary=b_up,
        gamma_upper=(half - upper_tail) / pmf[b_up],
    )


def ep_exact_spec(n: int, alpha) -> ExactTestSpec:
    if int(n) != n or n < 1:
        raise InvalidInputError(f"pair count must be a positive integer, got {n!r}")
    a = alpha if isinstance(alpha, Fraction) else Fraction(str(alpha))
    if not 0 < a < 1:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}")
    return _exact_spec(int(n), a)


# -- multiple testing -----------------------------------------------------------


def bh_adjust(p_values) -> np.ndarray:
    """Benjamini-Hochberg adjusted p-values, in input order."""
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidInputError("need a non-empty 1-D sequence of p-values")
    if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p > 1):
        raise InvalidInputError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    stepped = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty(m)
    out[order] = np.minimum(stepped, 1.0)
    return out


# -- outcomes -------------------------------------------------------------------


@dataclass(frozen=True)
class GroupOutcome:
    start: int
    length: int
    statistic: float
    decision: str
    method: str
    p_value: float | None = None
    threshold: float | None = None
    details: dict = field(default_factory=dict, hash=False, compare=False)

    def to_dict(self) -> dict:
        d = {
            "start": self.start,
            "length": self.length,
            "statistic": self.statistic,
            "decision": self.decision,
            "method": self.method,
        }
        if self.p_value is not None:
            d["p_value"] = self.p_value
        if self.threshold is not None:
            d["threshold"] = self.threshold
        d.update(self.details)
        return d


@dataclass(frozen=True)
class TestOutcome:
    test: str
    m: int
    alpha: float
    decision: str
    groups: tuple[GroupOutcome, ...]
    seed: RngSeed | None = None
    adjusted_p_values: tuple[float, ...] | None = None
    provenance: dict = field(default_factory=dict, hash=False, compare=False)

    __test__ = False  # keep pytest from collecting this class

    @property
    def rejected(self) -> bool:
        return self.decision == REJECT

    def to_dict(self) -> dict:
        d = {
            "test": self.test,
            "m": self.m,
            "alpha": self.alpha,
            "seed": None if self.seed is None else self.seed.as_dict(),
            "groups": [g.to_dict() for g in self.groups],
            "decision": self.decision,
        }
        if self.adjusted_p_values is not None:
            d["adjusted_p_values"] = list(self.adjusted_p_values)
        d.update(self.provenance)
        return d


# -- EP test --------------------------------------------------------------------


def _ep_group(x: np.ndarray, start: int, alpha: float, seed: RngSeed, g: int, pairing) -> GroupOutcome:
    out = ep_statistic(x, seed.child("pairing", g), pairing)
    n = out.n
    details = {"n_pairs": n, "disjoint_pairs": out.count, "pairing": "seeded" if pairing is None else "given"}
    if n >= LARGE_SAMPLE_PAIRS:
        res = ep_test_large(out.p_hat, n, alpha)
        details["cutoff"] = res.cutoff
        details["deviation"] = res.deviation
        return GroupOutcome(start, int(x.size), out.p_hat, res.decision, "normal", res.p_value, None, details)
    spec = ep_exact_spec(n, alpha)
    u = float(seed.child("coin", g).generator().random())
    details["coin"] = u
    details["phi"] = float(spec.phi(out.count))
    p = spec.p_value(out.count, u)
    return GroupOutcome(
        start, int(x.size), out.p_hat, _verdict(spec.rejects(out.count, u)), "exact-randomized", p, None, details
    )


def ep_test(series, alpha: float = 0.05, seed: RngSeed = RngSeed(0), pairing=None) -> TestOutcome:
    """Edge-probability test.

    A length ``4n + k`` series with ``k > 0`` is split into the ``k + 1``
    windows of length ``4n`` starting at ``0..k``; their p-values are
    BH-adjusted and the test rejects when the smallest adjusted value is
    at most ``alpha``. Pairing of window ``g`` uses ``seed.child("pairing", g)``
    and the exact test's coin uses ``seed.child("coin", g)``.
    """
    alpha = _check_alpha(alpha)
    x = normalize_angles(series)
    m = int(x.size)
    if x.ndim != 1 or m < 8:
        raise InvalidInputError(f"EP test needs at least 8 observations, got {m}")
    k = m % 4
    width = m - k
    if pairing is not None and k:
        raise InvalidInputError("an explicit pairing needs a series length divisible by 4")
    groups = tuple(_ep_group(x[j : j + width], j, alpha, seed, j, pairing) for j in range(k + 1))
    prov = {"large_sample_pairs": LARGE_SAMPLE_PAIRS}
    if k == 0:
        return TestOutcome("ep", m, alpha, groups[0].decision, groups, seed, None, prov)
    adj = bh_adjust([gr.p_value for gr in groups])
    return TestOutcome("ep", m, alpha, _verdict(bool(adj.min() <= alpha)), groups, seed,
                       tuple(float(a) for a in adj), prov)


# -- DD test --------------------------------------------------------------------


def _lookup(table: ThresholdTable, m: int, alpha: float, calibrate: bool, k: int, seed: RngSeed):
    entry = table.get(m, alpha)
    if entry is None:
        if not calibrate:
            raise MissingThresholdError(m, alpha)
        (entry,) = calibrate_threshold(m, [alpha], k=k, seed=seed)
        table.add(entry)
    return entry


def dd_test(
    series,
    alpha: float = 0.05,
    thresholds: ThresholdTable | None = None,
    calibrate_missing: bool = False,
    calibration_k: int = 1000,
    calibration_seed: RngSeed = RngSeed(0),
) -> TestOutcome:
    """Degree-distribution test; rejects when the statistic exceeds the cutoff.

    Odd ``m`` uses the two windows of length ``m - 1`` at level ``alpha / 2``
    each. Missing cutoffs raise :class:`MissingThresholdError` unless
    ``calibrate_missing`` is set, in which case they are calibrated and added
    to ``thresholds`` (or to a private copy of the default table).
    """
    alpha = _check_alpha(alpha)
    x = normalize_angles(series)
    m = int(x.size)
    if x.ndim != 1 or m < 4:
        raise InvalidInputError(f"DD test needs at least 4 observations, got {m}")
    table = thresholds if thresholds is not None else default_table()
    if m % 2 == 0:
        windows, level = [(0, x)], alpha
    else:
        windows, level = [(0, x[:-1]), (1, x[1:])], alpha / 2.0
    entry = _lookup(table, len(windows[0][1]), level, calibrate_missing, calibration_k, calibration_seed)
    groups = []
    for start, w in windows:
        st = dd_statistic(w)
        details = {"n_vertices": st.n, "scaled_sq_sum": st.scaled_sq_sum, "zero_mass": st.zero_mass,
                   "level": level}
        groups.append(GroupOutcome(start, int(w.size), st.distance, _verdict(st.distance > entry.c),
                                   "monte-carlo-cutoff", None, entry.c, details))
    prov = {"thresholds": {"table": table.label, "source": entry.source, "k": entry.k,
                           "seed": None if entry.seed is None else entry.seed.as_dict()}}
    decision = _verdict(any(g.decision == REJECT for g in groups))
    return TestOutcome("dd", m, alpha, decision, tuple(groups), None, None, prov)
