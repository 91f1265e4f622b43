import json
from fractions import Fraction
from pathlib import Path

import pytest

from rcag import RngSeed, ThresholdTable, calibrate_threshold

ORACLE = json.loads((Path(__file__).parent / "oracles" / "values.json").read_text())

# twenty observations and the matching used in the worked EP example
EXAMPLE_SERIES = [
    2.17, 6.12, 1.48, 5.61, 4.34, 6.20, 5.60, 5.48, 3.73, 0.10,
    0.24, 2.85, 6.24, 1.36, 6.10, 5.41, 2.11, 3.68, 0.54, 0.27,
]
EXAMPLE_PAIRING_1BASED = [(8, 7), (4, 3), (9, 2), (1, 10), (5, 6)]
EXAMPLE_PAIRING = [(a - 1, b - 1) for a, b in EXAMPLE_PAIRING_1BASED]


def oracle_float(key: str) -> float:
    return float(ORACLE[key])


def oracle_fraction(key: str) -> Fraction:
    return Fraction(ORACLE[key])


@pytest.fixture(scope="session")
def small_table() -> ThresholdTable:
    """Quick cutoffs for unit tests; not precise enough for size studies."""
    table = ThresholdTable(label="test-small")
    for m in (8, 40, 200):
        for e in calibrate_threshold(m, [0.1, 0.05, 0.025, 0.01], k=300, seed=RngSeed(99)):
            table.add(e)
    return table
