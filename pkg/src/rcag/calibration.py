"""Monte-Carlo cutoffs for the degree-distribution test and their on-disk cache.

A cutoff ``C(m, alpha)`` is the ``100 (1 - alpha)`` percentile of the test
statistic over ``k`` circular-uniform series of length ``m``. Replicate ``i``
always draws from ``seed.child("calib", i)``, so results do not depend on how
replicates are spread over workers.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .circular import InvalidInputError, RngSeed, sample_circular_uniform
from .degree import dd_statistic

CACHE_VERSION = 1
STATISTIC_TAG = "hellinger-distance"
PERCENTILE_TAG = "linear-interp"


class ThresholdCacheError(ValueError):
    """Malformed or incompatible threshold cache file."""


class MissingThresholdError(LookupError):
    def __init__(self, m: int, alpha: float):
        self.m = m
        self.alpha = alpha
        super().__init__(
            f"no calibrated cutoff for m={m}, alpha={alpha:g}; "
            f"calibrate one (e.g. `rcag calibrate --m {m} --alpha {alpha:g}`)"
        )


def alpha_key(alpha: float) -> float:
    return round(float(alpha), 12)


@dataclass(frozen=True)
class ThresholdEntry:
    m: int
    alpha: float
    c: float
    k: int | None
    seed: RngSeed | None
    percentile: str = PERCENTILE_TAG
    source: str = "calibrated"

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "alpha": self.alpha,
            "c": self.c,
            "k": self.k,
            "seed": None if self.seed is None else self.seed.as_dict(),
            "percentile": self.percentile,
            "source": self.source,
        }


@dataclass
class ThresholdTable:
    entries: dict[tuple[int, float], ThresholdEntry] = field(default_factory=dict)
    label: str = "custom"

    def add(self, entry: ThresholdEntry) -> None:
        self.entries[(int(entry.m), alpha_key(entry.alpha))] = entry

    def get(self, m: int, alpha: float) -> ThresholdEntry | None:
        return self.entries.get((int(m), alpha_key(alpha)))

    def threshold(self, m: int, alpha: float) -> float:
        e = self.get(m, alpha)
        if e is None:
            raise MissingThresholdError(int(m), float(alpha))
        return e.c

    def __len__(self) -> int:
        return len(self.entries)

    def sorted_entries(self) -> list[ThresholdEntry]:
        return [self.entries[k] for k in sorted(self.entries)]

    def copy(self) -> "ThresholdTable":
        return ThresholdTable(dict(self.entries), self.label)

    def to_json(self) -> str:
        doc = {
            "version": CACHE_VERSION,
            "statistic": STATISTIC_TAG,
            "entries": [e.as_dict() for e in self.sorted_entries()],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str, label: str = "custom") -> "ThresholdTable":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ThresholdCacheError(
                f"threshold cache is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
            ) from exc
        if not isinstance(doc, dict) or "version" not in doc:
            raise ThresholdCacheError("threshold cache lacks a top-level 'version'")
        if doc["version"] != CACHE_VERSION:
            raise ThresholdCacheError(
                f"threshold cache version {doc['version']!r} is not supported (expected {CACHE_VERSION})"
            )
        if doc.get("statistic", STATISTIC_TAG) != STATISTIC_TAG:
            raise ThresholdCacheError(
                f"threshold cache is for statistic {doc['statistic']!r}, expected {STATISTIC_TAG!r}"
            )
        table = cls(label=label)
        for i, raw in enumerate(doc.get("entries", [])):
            try:
                seed = raw["seed"]
                table.add(
                    ThresholdEntry(
                        m=int(raw["m"]),
                        alpha=float(raw["alpha"]),
                        c=float(raw["c"]),
                        k=None if raw["k"] is None else int(raw["k"]),
                        seed=None if seed is None else RngSeed(int(seed["master_seed"]), int(seed["stream_id"])),
                        percentile=str(raw.get("percentile", PERCENTILE_TAG)),
                        source=str(raw["source"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ThresholdCacheError(f"entries[{i}]: bad or missing field ({exc})") from exc
        return table


def threshold_store_save(path, table: ThresholdTable) -> None:
    """Write the cache atomically (temp file in the same directory, then rename)."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(table.to_json())
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp creates 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def threshold_store_load(path) -> ThresholdTable:
    path = Path(path)
    return ThresholdTable.from_json(path.read_text(encoding="utf-8"), label=str(path))


# 100(1 - alpha) percentiles at k = 1000, as published; alpha order 0.10, 0.05, 0.01
_PUBLISHED = {
    40: (0.61479, 0.63671, 0.71622),
    60: (0.55796, 0.57901, 0.61061),
    80: (0.52982, 0.54835, 0.58169),
    100: (0.50929, 0.52625, 0.56101),
    200: (0.45365, 0.46431, 0.48605),
    300: (0.43288, 0.44144, 0.46347),
    400: (0.41672, 0.42533, 0.44297),
    500: (0.40645, 0.41239, 0.42510),
    600: (0.39746, 0.40262, 0.41657),
    700: (0.39256, 0.39836, 0.41047),
    800: (0.38662, 0.39131, 0.40196),
    900: (0.38347, 0.38864, 0.39882),
    1000: (0.37982, 0.38380, 0.39133),
    1200: (0.37465, 0.37881, 0.38782),
    1500: (0.36822, 0.37237, 0.37968),
    2000: (0.36317, 0.36693, 0.37196),
    2300: (0.35944, 0.36258, 0.36697),
    2700: (0.35640, 0.35988, 0.36477),
    3000: (0.35453, 0.35735, 0.36214),
    3300: (0.35353, 0.35639, 0.36121),
    3700: (0.35162, 0.35443, 0.36130),
    4000: (0.35037, 0.35249, 0.35696),
    5000: (0.34854, 0.35102, 0.35613),
    6000: (0.34642, 0.34827, 0.35230),
    7000: (0.34457, 0.34639, 0.34955),
    8000: (0.34365, 0.34519, 0.34817),
}
PUBLISHED_M = tuple(sorted(_PUBLISHED))


def paper_reference_table() -> ThresholdTable:
    """Published cutoffs. They do not match this statistic's null closely; see README."""
    table = ThresholdTable(label="paper-reference")
    for m, row in _PUBLISHED.items():
        for alpha, c in zip((0.10, 0.05, 0.01), row):
            table.add(ThresholdEntry(m, alpha, c, 1000, None, PERCENTILE_TAG, "paper-reference"))
    return table


def default_table() -> ThresholdTable:
    """Cutoffs shipped with the package, calibrated with this implementation."""
    text = resources.files("rcag").joinpath("data/thresholds.json").read_text(encoding="utf-8")
    return ThresholdTable.from_json(text, label="default")


def resolve_table(spec: str | None) -> ThresholdTable:
    """``None``/``"default"`` -> bundled table, ``"paper"`` -> published values, else a path."""
    if spec is None or spec == "default":
        return default_table()
    if spec == "paper":
        return paper_reference_table()
    return threshold_store_load(spec)


def percentile(sample, q: float) -> float:
    """Linear interpolation between order statistics at 1-based rank ``1 + q (n - 1) / 100``."""
    x = np.sort(np.asarray(sample, dtype=float))
    if x.size == 0:
        raise InvalidInputError("percentile of an empty sample")
    if not 0 <= q <= 100:
        raise InvalidInputError(f"q must lie in [0, 100], got {q!r}")
    rank = q * (x.size - 1) / 100.0
    lo = math.floor(rank)
    hi = min(lo + 1, x.size - 1)
    frac = rank - lo
    return float(x[lo] + frac * (x[hi] - x[lo]))


def _null_chunk(args) -> list[float]:
    m, seed, indices = args
    return [dd_statistic(sample_circular_uniform(seed.child("calib", i), m)).distance for i in indices]


def null_statistics(m: int, k: int, seed: RngSeed, workers: int = 1) -> np.ndarray:
    """DD statistics of ``k`` uniform series of length ``m``, in replicate order."""
    idx = list(range(k))
    if workers <= 1:
        return np.array(_null_chunk((m, seed, idx)))
    size = max(1, math.ceil(k / (4 * workers)))
    chunks = [(m, seed, idx[i : i + size]) for i in range(0, k, size)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_null_chunk, chunks))
    return np.array([v for part in parts for v in part])


def calibrate_threshold(
    m: int,
    alphas,
    k: int = 1000,
    seed: RngSeed = RngSeed(0),
    workers: int = 1,
) -> list[ThresholdEntry]:
    if int(m) != m or m < 4 or m % 2:
        raise InvalidInputError(f"calibration needs an even m >= 4, got {m!r}")
    if k < 100:
        raise InvalidInputError(f"need k >= 100 replicates, got {k!r}")
    alphas = sorted({float(a) for a in alphas})
    if not alphas or any(not 0 < a < 1 for a in alphas):
        raise InvalidInputError("alphas must lie in (0, 1)")
    stats = null_statistics(int(m), int(k), seed, workers)
    return [
        ThresholdEntry(int(m), a, percentile(stats, 100.0 * (1.0 - a)), int(k), seed)
        for a in alphas
    ]
