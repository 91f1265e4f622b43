"""Circular arcs, their intersection predicate and random circular arc graphs.

An arc ``[theta, phi]`` is the closed set swept anticlockwise from ``theta`` to
``phi``; ``theta == phi`` is a single point. Two arcs meet iff one of them
contains the start of the other, so boundary contact counts as an edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .circular import TWO_PI, InvalidInputError, normalize_angle, normalize_angles, wrap

# rows of the pairwise containment matrix processed per step
_BLOCK = 256


@dataclass(frozen=True)
class Arc:
    start: float
    end: float

    @property
    def length(self) -> float:
        return float(wrap(self.end - self.start))


def make_arc(theta: float, phi: float) -> Arc:
    return Arc(normalize_angle(theta), normalize_angle(phi))


def arc_contains(arc: Arc, x: float) -> bool:
    return bool(wrap(x - arc.start) <= arc.length)


def arcs_intersect(a: Arc, b: Arc) -> bool:
    return arc_contains(a, b.start) or arc_contains(b, a.start)


def _containment(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Boolean matrix ``C[a, b]``: arc ``a`` contains the start of arc ``b``.

    The offset ``s_b - s_a`` lies in (-2pi, 2pi); adding 2pi to negatives is
    bit-identical to ``np.mod`` there, and cheaper.
    """
    n = starts.size
    out = np.empty((n, n), dtype=bool)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        d = starts[None, :] - starts[lo:hi, None]
        d += (d < 0) * TWO_PI
        np.minimum(d, np.nextafter(TWO_PI, 0.0), out=d)
        np.less_equal(d, lengths[lo:hi, None], out=out[lo:hi])
    return out


def intersection_matrix(starts, ends) -> np.ndarray:
    """Dense adjacency of the arcs' intersection graph (no self loops)."""
    starts = np.asarray(starts, dtype=float)
    lengths = wrap(np.asarray(ends, dtype=float) - starts)
    adj = _containment(starts, lengths)
    np.logical_or(adj, adj.T, out=adj)
    np.fill_diagonal(adj, False)
    return adj


def arc_degrees(starts, ends) -> np.ndarray:
    """Vertex degrees of the intersection graph of arcs ``[starts[j], ends[j]]``."""
    return np.count_nonzero(intersection_matrix(starts, ends), axis=1)


@dataclass(frozen=True)
class Rcag:
    """Intersection graph of arcs built from consecutive observation pairs.

    Adjacency is not stored; :meth:`adjacency` rebuilds it on demand.
    """

    starts: np.ndarray = field(repr=False)
    ends: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    edge_count: int

    @property
    def n(self) -> int:
        return int(self.starts.size)

    @property
    def arcs(self) -> list[Arc]:
        return [Arc(float(s), float(e)) for s, e in zip(self.starts, self.ends)]

    def adjacency(self) -> np.ndarray:
        return intersection_matrix(self.starts, self.ends)


def rcag_from_arcs(starts, ends) -> Rcag:
    starts = normalize_angles(starts)
    ends = normalize_angles(ends)
    if starts.shape != ends.shape or starts.ndim != 1:
        raise InvalidInputError("starts and ends must be 1-D arrays of equal length")
    deg = arc_degrees(starts, ends)
    total = int(deg.sum())
    return Rcag(starts, ends, deg, total // 2)


def build_rcag(series) -> Rcag:
    """Vertex ``j`` gets the arc ``[x[2j], x[2j+1]]`` (0-based), in series order."""
    x = normalize_angles(series)
    if x.ndim != 1 or x.size < 4 or x.size % 2:
        raise InvalidInputError(
            f"build_rcag needs an even number (>= 4) of observations, got {x.size}"
        )
    return rcag_from_arcs(x[0::2], x[1::2])


@dataclass(frozen=True)
class GraphStats:
    edge_count: int
    min_degree: int
    max_degree: int
    connected: bool | None


def graph_stats(g: Rcag, connectivity: bool = True) -> GraphStats:
    if g.n < 1:
        raise InvalidInputError("graph has no vertices")
    connected = None
    if connectivity:
        k, _ = connected_components(g.adjacency(), directed=False)
        connected = bool(k == 1)
    return GraphStats(
        edge_count=g.edge_count,
        min_degree=int(g.degrees.min()),
        max_degree=int(g.degrees.max()),
        connected=connected,
    )
