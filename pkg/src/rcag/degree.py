"""Empirical degree pmf of an RCAG and its Hellinger-type distance to the null law."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circular import InvalidInputError
from .graph import Rcag, build_rcag
from .theory import theoretical_degree_pmf


@dataclass(frozen=True)
class EmpiricalDegreePmf:
    """Mass at degrees ``1..n`` (``pmf[i - 1]``); degree-0 mass is kept apart."""

    n: int
    pmf: np.ndarray
    zero_mass: float


def empirical_degree_pmf(g: Rcag) -> EmpiricalDegreePmf:
    n = g.n
    if n < 2:
        raise InvalidInputError("need at least two vertices")
    counts = np.bincount(g.degrees, minlength=n + 1)
    return EmpiricalDegreePmf(n, counts[1 : n + 1] / n, counts[0] / n)


def _check_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InvalidInputError(f"pmf length mismatch: {p.shape} vs {q.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise InvalidInputError("pmf entries must be non-negative")
    return p, q


def hellinger_statistic(empirical, theoretical) -> float:
    """``(1/sqrt 2) * sum (sqrt p_i - sqrt q_i)^2``, without an outer root."""
    p, q = _check_pair(empirical, theoretical)
    return float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2) / math.sqrt(2.0))


def hellinger_distance(empirical, theoretical) -> float:
    """Classical Hellinger distance ``sqrt(sum (sqrt p_i - sqrt q_i)^2 / 2)``.

    A monotone function of :func:`hellinger_statistic`, so either one yields
    the same test once its own cutoff is calibrated. The DD test reports this
    one because the published cutoff tables sit on this scale.
    """
    p, q = _check_pair(empirical, theoretical)
    return float(math.sqrt(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2) / 2.0))


@dataclass(frozen=True)
class DegreeStatistic:
    distance: float
    scaled_sq_sum: float
    n: int
    zero_mass: float


def dd_statistic(series) -> DegreeStatistic:
    """Build the RCAG of an even-length series and compare its degree pmf to the null."""
    g = build_rcag(series)
    emp = empirical_degree_pmf(g)
    theo = theoretical_degree_pmf(g.n).pmf
    return DegreeStatistic(
        distance=hellinger_distance(emp.pmf, theo),
        scaled_sq_sum=hellinger_statistic(emp.pmf, theo),
        n=g.n,
        zero_mass=float(emp.zero_mass),
    )
