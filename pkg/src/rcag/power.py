"""Rejection-rate estimates: generate a series, test it, repeat.

Replicate ``i`` draws its series from ``seed.child("rep", i).child("series")``
and its test randomness from ``seed.child("rep", i).child("test")``, so the
rejection count does not depend on the number of workers.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .calibration import MissingThresholdError, ThresholdTable, default_table
from .circular import InvalidInputError, RngSeed
from .procgen import ProcessSpec, format_process_spec, generate
from .randomness import dd_test, ep_test

TESTS = ("ep", "dd")


@dataclass(frozen=True)
class PowerReport:
    process: str
    m: int
    replicates: int
    alpha: float
    test: str
    rejections: int
    seed: RngSeed
    thresholds: str | None = None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.replicates

    @property
    def standard_error(self) -> float:
        r = self.rejection_rate
        return math.sqrt(r * (1.0 - r) / self.replicates)

    def to_dict(self) -> dict:
        """JSON-ready fields; wall time is left out so reports are reproducible."""
        return {
            "process": self.process,
            "m": self.m,
            "replicates": self.replicates,
            "alpha": self.alpha,
            "test": self.test,
            "rejections": self.rejections,
            "rejection_rate": self.rejection_rate,
            "standard_error": self.standard_error,
            "seed": self.seed.as_dict(),
            "thresholds": self.thresholds,
        }


def replicate_rejects(
    spec: ProcessSpec, m: int, alpha: float, test: str, seed: RngSeed, index: int,
    table: ThresholdTable | None,
) -> bool:
    rs = seed.child("rep", index)
    x = generate(spec, m, rs.child("series"))
    if test == "ep":
        return ep_test(x, alpha, rs.child("test")).rejected
    return dd_test(x, alpha, table).rejected


def _chunk(args) -> int:
    spec, m, alpha, test, seed, indices, table = args
    return sum(replicate_rejects(spec, m, alpha, test, seed, i, table) for i in indices)


def run_power(
    spec: ProcessSpec,
    m: int,
    reps: int,
    alpha: float = 0.05,
    test: str = "dd",
    seed: RngSeed = RngSeed(0),
    workers: int = 1,
    thresholds: ThresholdTable | None = None,
) -> PowerReport:
    if test not in TESTS:
        raise InvalidInputError(f"test must be one of {TESTS}, got {test!r}")
    if int(reps) != reps or reps < 1:
        raise InvalidInputError(f"reps must be a positive integer, got {reps!r}")
    if int(m) != m or m < 8:
        raise InvalidInputError(f"m must be an integer >= 8, got {m!r}")
    table = None
    if test == "dd":
        table = thresholds if thresholds is not None else default_table()
        need_m, level = (m, alpha) if m % 2 == 0 else (m - 1, alpha / 2.0)
        if table.get(need_m, level) is None:
            raise MissingThresholdError(need_m, level)
    t0 = time.perf_counter()
    idx = list(range(int(reps)))
    if workers <= 1:
        hits = _chunk((spec, m, alpha, test, seed, idx, table))
    else:
        size = max(1, math.ceil(reps / (4 * workers)))
        jobs = [(spec, m, alpha, test, seed, idx[i : i + size], table) for i in range(0, reps, size)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            hits = sum(ex.map(_chunk, jobs))
    return PowerReport(
        process=format_process_spec(spec),
        m=int(m),
        replicates=int(reps),
        alpha=float(alpha),
        test=test,
        rejections=int(hits),
        seed=seed,
        thresholds=None if table is None else table.label,
        wall_time=time.perf_counter() - t0,
    )
