"""Reading and writing one-angle-per-line text files."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .circular import TWO_PI, InvalidInputError, normalize_angles

UNITS = ("radians", "degrees")
SCALES = ("lat", "lon")


class ParseError(ValueError):
    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


def _rescale(x: np.ndarray, scale: str) -> np.ndarray:
    """Map latitudes in [-pi/2, pi/2] or longitudes in [-pi, pi] linearly onto [0, 2pi)."""
    half = math.pi / 2 if scale == "lat" else math.pi
    if np.any(np.abs(x) > half):
        raise InvalidInputError(f"{scale} values must lie in [-{half:.6g}, {half:.6g}] radians")
    return (x + half) * (TWO_PI / (2 * half))


def parse_angles(path, unit: str = "radians", scale: str | None = None) -> np.ndarray:
    """Read angles in file order.

    Blank lines and lines starting with ``#`` are skipped. If the first
    remaining line is not a number it is taken as a header.
    """
    if unit not in UNITS:
        raise InvalidInputError(f"unit must be one of {UNITS}, got {unit!r}")
    if scale is not None and scale not in SCALES:
        raise InvalidInputError(f"scale must be one of {SCALES}, got {scale!r}")
    values: list[float] = []
    seen_content = False
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                v = float(line)
            except ValueError:
                if not seen_content:
                    seen_content = True
                    continue
                raise ParseError(path, line_no, f"not a number: {line!r}") from None
            seen_content = True
            if not math.isfinite(v):
                raise ParseError(path, line_no, f"not a finite number: {line!r}")
            values.append(v)
    if not values:
        raise InvalidInputError(f"{path}: no observations found")
    x = np.asarray(values)
    if unit == "degrees":
        x = np.deg2rad(x)
    if scale is not None:
        x = _rescale(x, scale)
    return normalize_angles(x)


def write_angles(path, series, unit: str = "radians") -> None:
    """One value per line with 12 significant digits."""
    if unit not in UNITS:
        raise InvalidInputError(f"unit must be one of {UNITS}, got {unit!r}")
    x = normalize_angles(series)
    if unit == "degrees":
        x = np.rad2deg(x)
    Path(path).write_text("".join(f"{v:.12g}\n" for v in x), encoding="utf-8")
