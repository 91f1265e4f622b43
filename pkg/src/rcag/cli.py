"""``rcag`` command line: test data files, estimate power, calibrate, validate, generate.

JSON goes to stdout and a short human summary to stderr. Exit status is 0
when nothing is rejected, 1 on rejection (or a failed validation check) and
2 on usage or data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .calibration import (
    MissingThresholdError,
    ThresholdCacheError,
    ThresholdTable,
    calibrate_threshold,
    resolve_table,
    threshold_store_load,
    threshold_store_save,
)
from .circular import InvalidInputError, RngSeed
from .io import SCALES, UNITS, ParseError, parse_angles, write_angles
from .power import TESTS, run_power
from .procgen import SpecError, generate, parse_process_spec
from .randomness import dd_test, ep_test
from .validate import validate_theory

EXIT_OK, EXIT_REJECT, EXIT_ERROR = 0, 1, 2


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _note(text: str) -> None:
    print(text, file=sys.stderr)


def _seed(value: str) -> int:
    try:
        v = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {value!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _alpha(value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {value}")
    return v


def _positive(value: str) -> int:
    try:
        v = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from None


def _alpha_list(value: str) -> list[float]:
    return [_alpha(v) for v in value.split(",") if v.strip()]


def parse_pairing(text: str) -> list[tuple[int, int]]:
    """``"8-7,4-3"`` (1-based arc numbers) -> ``[(7, 6), (3, 2)]``."""
    pairs = []
    for tok in text.split(","):
        a, sep, b = tok.strip().partition("-")
        if not sep:
            raise InvalidInputError(f"pairing item {tok!r} should look like 'i-j'")
        try:
            i, j = int(a), int(b)
        except ValueError:
            raise InvalidInputError(f"pairing item {tok!r} should hold two integers") from None
        if i < 1 or j < 1:
            raise InvalidInputError("pairing uses 1-based arc numbers")
        pairs.append((i - 1, j - 1))
    return pairs


# -- subcommands ------------------------------------------------------------------


def _summarize_test(report: dict) -> None:
    _note(f"{report['test'].upper()} test  m={report['m']}  alpha={report['alpha']:g}")
    for g in report["groups"]:
        ref = f"p={g['p_value']:.4g}" if "p_value" in g else f"C={g['threshold']:.5f}"
        _note(f"  group @{g['start']:<3d} statistic={g['statistic']:.5f}  {ref}  {g['decision']}")
    if "adjusted_p_values" in report:
        _note("  BH-adjusted: " + ", ".join(f"{p:.4g}" for p in report["adjusted_p_values"]))
    _note(f"  decision: {report['decision']}")


def cmd_test(args) -> int:
    x = parse_angles(args.path, args.unit, args.scale)
    seed = RngSeed(args.seed)
    reports = []
    if args.test in ("ep", "both"):
        pairing = parse_pairing(args.pairing) if args.pairing else None
        reports.append(ep_test(x, args.alpha, seed, pairing).to_dict())
    if args.test in ("dd", "both"):
        table = resolve_table(args.thresholds)
        out = dd_test(x, args.alpha, table, args.calibrate_if_missing, args.calibration_k,
                      RngSeed(args.seed).child("calibration"))
        reports.append(out.to_dict())
    for r in reports:
        _summarize_test(r)
    rejected = any(r["decision"] == "reject" for r in reports)
    _emit(reports[0] if len(reports) == 1 else {"reports": reports, "decision": "reject" if rejected else "not-reject"})
    return EXIT_REJECT if rejected else EXIT_OK


def cmd_power(args) -> int:
    spec = parse_process_spec(args.process)
    table = resolve_table(args.thresholds) if args.test == "dd" else None
    rep = run_power(spec, args.m, args.reps, args.alpha, args.test, RngSeed(args.seed), args.workers, table)
    _emit(rep.to_dict())
    _note(f"{spec.label} m={rep.m} {rep.test.upper()}: {rep.rejections}/{rep.replicates} rejected "
          f"({100 * rep.rejection_rate:.1f}% +/- {100 * rep.standard_error:.1f})  [{rep.wall_time:.1f}s]")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    bad = [m for m in args.m if m < 4 or m % 2]
    if bad:
        raise InvalidInputError(f"calibration needs even m >= 4; got {', '.join(map(str, bad))}")
    table = ThresholdTable(label=str(args.out)) if args.out is None or not Path(args.out).exists() \
        else threshold_store_load(args.out)
    seed = RngSeed(args.seed)
    fresh = []
    for m in args.m:
        entries = calibrate_threshold(m, args.alpha, args.k, seed, args.workers)
        for e in entries:
            table.add(e)
            _note(f"m={e.m:<6d} alpha={e.alpha:<6g} C={e.c:.5f}  (k={e.k})")
        fresh += entries
    if args.out is not None:
        threshold_store_save(args.out, table)
    _emit({"entries": [e.as_dict() for e in fresh]})
    return EXIT_OK


def cmd_validate(args) -> int:
    results = validate_theory(RngSeed(args.seed), args.draws, args.graphs)
    for r in results:
        _note(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: observed {r.observed}, expected {r.expected}")
    ok = all(r.passed for r in results)
    _emit({"checks": [r.as_dict() for r in results], "passed": ok})
    return EXIT_OK if ok else EXIT_REJECT


def cmd_generate(args) -> int:
    spec = parse_process_spec(args.process)
    x = generate(spec, args.m, RngSeed(args.seed))
    write_angles(args.out, x, args.unit)
    _note(f"wrote {x.size} values of {spec.label} to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rcag", description="Randomness tests for circular data via random circular arc graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test a data file for randomness")
    t.add_argument("path", type=Path)
    t.add_argument("--test", choices=("ep", "dd", "both"), default="both")
    t.add_argument("--alpha", type=_alpha, default=0.05)
    t.add_argument("--unit", choices=UNITS, default="radians")
    t.add_argument("--scale", choices=SCALES, default=None, help="rescale latitudes or longitudes onto the circle")
    t.add_argument("--seed", type=_seed, default=0)
    t.add_argument("--pairing", help="explicit EP matching as 1-based arc pairs, e.g. '8-7,4-3,9-2,1-10,5-6'")
    t.add_argument("--thresholds", default="default", help="'default', 'paper' or a threshold cache file")
    t.add_argument("--calibrate-if-missing", action="store_true")
    t.add_argument("--calibration-k", type=_positive, default=1000)
    t.set_defaults(func=cmd_test)

    w = sub.add_parser("power", help="estimate a rejection rate by simulation")
    w.add_argument("--process", required=True, help="e.g. 'lar1:rho=0.9' or 'car:p=2,alpha=0.5,0.5,kappa=3'")
    w.add_argument("--m", type=_positive, required=True)
    w.add_argument("--reps", type=_positive, default=1000)
    w.add_argument("--alpha", type=_alpha, default=0.05)
    w.add_argument("--test", choices=TESTS, default="dd")
    w.add_argument("--seed", type=_seed, default=0)
    w.add_argument("--workers", type=_positive, default=1)
    w.add_argument("--thresholds", default="default")
    w.set_defaults(func=cmd_power)

    c = sub.add_parser("calibrate", help="calibrate DD cutoffs by Monte Carlo")
    c.add_argument("--m", type=_int_list, required=True, help="comma-separated even series lengths")
    c.add_argument("--alpha", type=_alpha_list, default=[0.10, 0.05, 0.01])
    c.add_argument("--k", type=_positive, default=1000)
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--workers", type=_positive, default=1)
    c.add_argument("--out", type=Path, default=None, help="cache file to create or extend")
    c.set_defaults(func=cmd_calibrate)

    v = sub.add_parser("validate-theory", help="check the null-model facts by simulation")
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--draws", type=_positive, default=1_000_000)
    v.add_argument("--graphs", type=_positive, default=100)
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("generate", help="write a simulated series to a file")
    g.add_argument("--process", required=True)
    g.add_argument("--m", type=_positive, required=True)
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--unit", choices=UNITS, default="radians")
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, ParseError, SpecError, ThresholdCacheError, MissingThresholdError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, MissingThresholdError) else str(exc)
        _note(f"rcag: error: {msg}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
