"""Circular time series for power studies.

Linked ARMA processes map a Gaussian ARMA path through ``g(x) = 2 atan(x)``
and shift by ``mu``. The circular autoregression draws each value from a
von Mises law centred at ``mu + g(sum_i alpha_i g^{-1}(theta_{t-i} - mu))``.

Specs have a short text form used on the command line::

    unif
    vm:mu=0,kappa=2
    wc:mu=0,rho=0.5
    lar1:rho=0.9            lar2:rho=0.5,0.2       lar:rho=0.5,0.1,0.1
    lma1:rho=0.9            lma:theta=0.4,0.4
    larma:ar=0.5,ma=0.3
    car:p=2,mu=0,kappa=3,alpha=0.5,0.5

``mu`` and ``burn`` (burn-in length, default 500) are accepted by every
non-i.i.d. kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .circular import (
    InvalidInputError,
    RngSeed,
    sample_circular_uniform,
    sample_von_mises,
    sample_wrapped_cauchy,
    signed_offset,
    wrap,
)

DEFAULT_BURN_IN = 500

_NEAR_MINUS_PI = float(np.nextafter(-math.pi, 0.0))


class SpecError(ValueError):
    """Process spec text that cannot be parsed; the message names the field."""


def link(x):
    return 2.0 * np.arctan(x)


def link_inverse(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~(np.abs(arr) < math.pi)):
        raise InvalidInputError("link_inverse needs offsets strictly inside (-pi, pi)")
    out = np.tan(arr / 2.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ProcessSpec:
    kind: str  # unif | vm | wc | larma | car
    mu: float = 0.0
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    kappa: float = 0.0
    rho: float = 0.0  # wrapped-Cauchy concentration
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if self.kind not in ("unif", "vm", "wc", "larma", "car"):
            raise InvalidInputError(f"unknown process kind {self.kind!r}")
        if self.burn_in < 0:
            raise InvalidInputError("burn_in must be non-negative")
        if self.kind in ("vm", "car") and not self.kappa >= 0:
            raise InvalidInputError(f"kappa must be non-negative, got {self.kappa!r}")
        if self.kind == "car" and len(self.ar) < 1:
            raise InvalidInputError("CAR needs at least one coefficient")
        if not all(math.isfinite(c) for c in self.ar + self.ma):
            raise InvalidInputError("coefficients must be finite")

    @property
    def label(self) -> str:
        if self.kind == "larma":
            p, q = len(self.ar), len(self.ma)
            if q == 0:
                return f"LAR({p})"
            if p == 0:
                return f"LMA({q})"
            return f"LARMA({p},{q})"
        if self.kind == "car":
            return f"CAR({len(self.ar)})"
        return {"unif": "iid-uniform", "vm": "iid-von-mises", "wc": "iid-wrapped-cauchy"}[self.kind]


def _num(s: str, name: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise SpecError(f"field {name!r}: {s!r} is not a number") from None
    if not math.isfinite(v):
        raise SpecError(f"field {name!r}: value must be finite")
    return v


def _fields(text: str) -> dict[str, list[str]]:
    """Split ``k=v,w,k2=v`` into ``{k: [v, w], k2: [v]}``."""
    out: dict[str, list[str]] = {}
    key = None
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if "=" in tok:
            key, val = (p.strip() for p in tok.split("=", 1))
            if not key:
                raise SpecError(f"empty field name in {tok!r}")
            if key in out:
                raise SpecError(f"field {key!r} given twice")
            out[key] = [val]
        elif key is None:
            raise SpecError(f"value {tok!r} has no field name")
        else:
            out[key].append(tok)
    return out


_ALLOWED = {
    "unif": set(),
    "vm": {"mu", "kappa"},
    "wc": {"mu", "rho"},
    "lar1": {"rho", "mu", "burn"},
    "lar2": {"rho", "mu", "burn"},
    "lar": {"rho", "mu", "burn"},
    "lma1": {"rho", "mu", "burn"},
    "lma": {"theta", "mu", "burn"},
    "larma": {"ar", "ma", "mu", "burn"},
    "car": {"p", "alpha", "kappa", "mu", "burn"},
}
_REQUIRED = {
    "vm": {"kappa"},
    "wc": {"rho"},
    "lar1": {"rho"},
    "lar2": {"rho"},
    "lar": {"rho"},
    "lma1": {"rho"},
    "lma": {"theta"},
    "car": {"alpha", "kappa"},
}


def parse_process_spec(text: str) -> ProcessSpec:
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    if name not in _ALLOWED:
        raise SpecError(f"unknown process {name!r}; expected one of {', '.join(sorted(_ALLOWED))}")
    f = _fields(rest)
    for key in f:
        if key not in _ALLOWED[name]:
            raise SpecError(f"field {key!r} is not valid for {name!r}")
    missing = _REQUIRED.get(name, set()) - set(f)
    if missing:
        raise SpecError(f"{name!r} needs field(s) {', '.join(sorted(missing))}")

    def scalar(key: str, default: float = 0.0) -> float:
        vals = f.get(key)
        if vals is None:
            return default
        if len(vals) != 1:
            raise SpecError(f"field {key!r} takes one value, got {len(vals)}")
        return _num(vals[0], key)

    def vector(key: str) -> tuple[float, ...]:
        return tuple(_num(v, key) for v in f.get(key, []))

    mu = scalar("mu")
    burn = scalar("burn", DEFAULT_BURN_IN)
    if burn != int(burn) or burn < 0:
        raise SpecError("field 'burn' must be a non-negative integer")
    common = {"mu": mu, "burn_in": int(burn)}
    try:
        if name == "unif":
            return ProcessSpec("unif")
        if name == "vm":
            return ProcessSpec("vm", mu=mu, kappa=scalar("kappa"))
        if name == "wc":
            return ProcessSpec("wc", mu=mu, rho=scalar("rho"))
        if name in ("lar1", "lma1", "lar2"):
            want = 2 if name == "lar2" else 1
            rho = vector("rho")
            if len(rho) != want:
                raise SpecError(f"field 'rho' of {name!r} takes {want} value(s), got {len(rho)}")
            if name == "lma1":
                return ProcessSpec("larma", ma=rho, **common)
            return ProcessSpec("larma", ar=rho, **common)
        if name == "lar":
            return ProcessSpec("larma", ar=vector("rho"), **common)
        if name == "lma":
            return ProcessSpec("larma", ma=vector("theta"), **common)
        if name == "larma":
            return ProcessSpec("larma", ar=vector("ar"), ma=vector("ma"), **common)
        alpha = vector("alpha")
        if "p" in f and scalar("p") != len(alpha):
            raise SpecError(f"field 'p' says {scalar('p'):g} but 'alpha' has {len(alpha)} value(s)")
        return ProcessSpec("car", ar=alpha, kappa=scalar("kappa"), **common)
    except InvalidInputError as exc:
        raise SpecError(str(exc)) from None


def _num_text(v: float) -> str:
    return repr(float(v))


def _nums(values) -> str:
    return ",".join(map(_num_text, values))


def format_process_spec(spec: ProcessSpec) -> str:
    """Canonical text form; ``parse_process_spec`` inverts it."""
    if spec.kind == "unif":
        return "unif"
    if spec.kind == "vm":
        return f"vm:mu={_num_text(spec.mu)},kappa={_num_text(spec.kappa)}"
    if spec.kind == "wc":
        return f"wc:mu={_num_text(spec.mu)},rho={_num_text(spec.rho)}"
    tail = f"mu={_num_text(spec.mu)},burn={spec.burn_in}"
    if spec.kind == "car":
        return f"car:p={len(spec.ar)},alpha={_nums(spec.ar)},kappa={_num_text(spec.kappa)},{tail}"
    parts = []
    if spec.ar:
        parts.append(f"ar={_nums(spec.ar)}")
    if spec.ma:
        parts.append(f"ma={_nums(spec.ma)}")
    return f"larma:{','.join(parts + [tail])}"


def is_stationary(ar) -> bool:
    """All roots of ``z^p - a_1 z^{p-1} - ... - a_p`` lie strictly inside the unit circle."""
    if len(ar) == 0:
        return True
    roots = np.roots(np.r_[1.0, -np.asarray(ar, dtype=float)])
    return bool(np.all(np.abs(roots) < 1.0))


def gen_larma(spec: ProcessSpec, length: int, seed: RngSeed) -> np.ndarray:
    if spec.kind != "larma":
        raise InvalidInputError(f"gen_larma needs a LARMA spec, got {spec.kind!r}")
    length = _check_length(length)
    if not is_stationary(spec.ar):
        raise InvalidInputError(f"AR coefficients {spec.ar} are not stationary")
    total = spec.burn_in + length
    eps = seed.generator().standard_normal(total)
    x = lfilter(np.r_[1.0, spec.ma], np.r_[1.0, -np.asarray(spec.ar, dtype=float)], eps)
    return wrap(link(x[spec.burn_in :]) + spec.mu)


def gen_car(spec: ProcessSpec, length: int, seed: RngSeed) -> np.ndarray:
    if spec.kind != "car":
        raise InvalidInputError(f"gen_car needs a CAR spec, got {spec.kind!r}")
    length = _check_length(length)
    p = len(spec.ar)
    total = spec.burn_in + length
    rng = seed.generator()
    theta = np.empty(p + total)
    theta[:p] = sample_von_mises(rng, spec.mu, spec.kappa, p)
    noise = sample_von_mises(rng, 0.0, spec.kappa, total)
    coef = np.asarray(spec.ar[::-1])  # aligns with theta[t-p:t]
    for t in range(p, p + total):
        theta[t] = car_mean_direction(theta[t - p : t], spec.mu, coef) + noise[t - p]
    return wrap(theta[p + spec.burn_in :])


def car_mean_direction(recent, mu: float, coef_oldest_first) -> float:
    """Conditional mean direction given the last ``p`` values, oldest first.

    Offsets from ``mu`` are taken as shortest signed differences, with an
    offset of exactly ``-pi`` moved just inside so the inverse link stays finite.
    """
    off = signed_offset(np.asarray(recent, dtype=float) - mu)
    off[off <= -math.pi] = _NEAR_MINUS_PI
    return float(wrap(mu + link(float(np.dot(coef_oldest_first, link_inverse(off))))))


def generate(spec: ProcessSpec, length: int, seed: RngSeed) -> np.ndarray:
    if spec.kind == "unif":
        return sample_circular_uniform(seed, length)
    if spec.kind == "vm":
        return sample_von_mises(seed, spec.mu, spec.kappa, length)
    if spec.kind == "wc":
        return sample_wrapped_cauchy(seed, spec.mu, spec.rho, length)
    if spec.kind == "larma":
        return gen_larma(spec, length, seed)
    return gen_car(spec, length, seed)


def _check_length(length: int) -> int:
    if int(length) != length or length < 1:
        raise InvalidInputError(f"length must be a positive integer, got {length!r}")
    return int(length)
