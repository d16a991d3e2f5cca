"""Command-line interface.

Exit codes:
  0  success
  1  selftest failure
  2  invalid direction text, or a symbolic direction where an orbit is needed
  3  every sampled parameter came within the margin of a piece boundary
     (or a cell vertex sat on a cutting line)
  4  direction outside the supported chamber for cell construction
  5  at least one BRS verdict is Undetermined
"""

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

from . import __version__
from .direction import IRRATIONALITY_CAVEAT
from .dynamics import SamplingExhausted, format_word_file, sample_word
from .geometry import NearBoundary
from .language import ChamberError, complexity, frequency_csv, frequency_rows
from .scalars.parser import DirectionError, parse_direction

EXIT_SELFTEST = 1
EXIT_PARSE = 2
EXIT_BOUNDARY = 3
EXIT_CHAMBER = 4
EXIT_UNDETERMINED = 5

REFERENCE_THETA = "1,sqrt(3),sqrt(2)"


class UsageError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    theta: str
    precision: int
    epsilon: float
    N: int
    checkpoints: list
    max_factor_len: int
    seed: int
    output: str
    format: str
    series: str = None
    stride: int = 1

    def validate(self):
        if self.N is not None and self.N < 1:
            raise UsageError("--n must be positive", EXIT_PARSE)
        if self.checkpoints:
            if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
                raise UsageError("--checkpoints must be strictly increasing", EXIT_PARSE)
            if self.checkpoints[0] < 1 or self.checkpoints[-1] > self.N:
                raise UsageError("checkpoints must lie in 1..N", EXIT_PARSE)


def _checkpoints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", default=REFERENCE_THETA,
                        help='direction "1,theta_1,...,theta_d" (default: %(default)s)')
    common.add_argument("--precision", type=int, default=128, help="working precision in bits")
    common.add_argument("--epsilon", type=float, default=None,
                        help="comparison margin (default derived from the precision)")
    common.add_argument("--seed", type=int, default=0, help="seed for the orbit parameter")
    common.add_argument("--n", type=int, default=None, help="word length")
    common.add_argument("--checkpoints", type=_checkpoints, default=None,
                        help="comma-separated prefix lengths for running maxima")
    common.add_argument("--max-factor-len", type=int, default=2, help="longest factor analysed")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("-o", "--output", default="-", help="output file (default stdout)")

    parser = argparse.ArgumentParser(prog="hyperbilliard",
                                     description="Billiard words in the hypercube: "
                                     "generation, frequencies, balance and BRS checks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="write a billiard word file")
    bal = sub.add_parser("balance", parents=[common],
                         help="per-factor discrepancy verdicts")
    bal.add_argument("--series", default=None,
                     help="instead of verdicts, export the D_n series of this factor")
    bal.add_argument("--stride", type=int, default=1, help="row spacing of --series output")
    sub.add_parser("freqs", parents=[common],
                   help="closed-form versus empirical factor frequencies")
    sub.add_parser("brs", parents=[common], help="exact BRS verdicts for the length-2 cells")
    sub.add_parser("complexity", parents=[common], help="factor counts p(n)")
    sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    return parser


def _config(ns):
    defaults = {"generate": 100_000, "balance": 100_000, "freqs": 1_000_000,
                "complexity": 100_000}
    N = ns.n if ns.n is not None else defaults.get(ns.command)
    return RunConfig(ns.command, ns.theta, ns.precision, ns.epsilon, N, ns.checkpoints,
                     ns.max_factor_len, ns.seed, ns.output, ns.format,
                     getattr(ns, "series", None), getattr(ns, "stride", 1))


def _direction(cfg, numeric=True):
    try:
        direction = parse_direction(cfg.theta, cfg.precision, cfg.epsilon)
    except DirectionError as exc:
        raise UsageError(f"invalid direction: {exc}", EXIT_PARSE) from exc
    if numeric and direction.symbolic:
        raise UsageError("symbolic directions cannot be orbit-sampled", EXIT_PARSE)
    return direction


def _meta(cfg, direction):
    return {
        "direction": cfg.theta,
        "precision": cfg.precision,
        "epsilon": float(direction.epsilon),
        "seed": cfg.seed,
        "N": cfg.N,
        "caveat": IRRATIONALITY_CAVEAT,
        "notes": list(direction.notes),
    }


def _header_lines(meta):
    return [f"{k}={v}" for k, v in meta.items() if k not in ("notes",)] + \
        [f"note={n}" for n in meta["notes"]]


def _word(cfg, direction):
    try:
        return sample_word(direction, cfg.seed, cfg.N)
    except (SamplingExhausted, NearBoundary) as exc:
        raise UsageError(str(exc), EXIT_BOUNDARY) from exc


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def cmd_generate(cfg):
    direction = _direction(cfg)
    word = _word(cfg, direction)
    return format_word_file(word, cfg.theta), 0


def cmd_balance(cfg):
    from .balance import balance_report, default_checkpoints, discrepancy_series, report_rows
    from .language import empirical_frequency, exact_frequency

    direction = _direction(cfg)
    checkpoints = cfg.checkpoints or default_checkpoints(cfg.N)
    if len(checkpoints) < 3:
        raise UsageError("balance needs at least three checkpoints", EXIT_PARSE)
    word = _word(cfg, direction)
    meta = _meta(cfg, direction)
    meta["checkpoints"] = checkpoints
    if cfg.series:
        w = cfg.series
        mu = exact_frequency(direction, w) or empirical_frequency(word, w)
        series = discrepancy_series(word, w, mu, checkpoints, stride=max(1, cfg.stride))
        meta.update(factor=w, mu=float(series.mu), mu_provenance=series.mu_provenance)
        return series.to_csv(_header_lines(meta)), 0
    report = balance_report(direction, cfg.max_factor_len, cfg.N, cfg.seed, checkpoints, word)
    rows = report_rows(report)
    meta["notes"] = meta["notes"] + report.notes
    if cfg.format == "json":
        return _dump_json({"meta": meta, "verdict_counts": report.verdict_counts(),
                           "factors": rows}), 0
    return _rows_csv(rows, _header_lines(meta)), 0


def _rows_csv(rows, header_lines):
    import csv
    import io

    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                             for k, v in r.items()})
    return buf.getvalue()


def cmd_freqs(cfg):
    direction = _direction(cfg)
    word = _word(cfg, direction)
    rows = frequency_rows(direction, word, cfg.max_factor_len)
    meta = _meta(cfg, direction)
    if cfg.format == "json":
        return _dump_json({"meta": meta, "factor_length": cfg.max_factor_len,
                           "rows": rows}), 0
    return frequency_csv(rows, _header_lines(meta)), 0


def cmd_complexity(cfg):
    direction = _direction(cfg)
    word = _word(cfg, direction)
    rows = [{"n": n, "complexity": complexity(word, n)}
            for n in range(1, cfg.max_factor_len + 1)]
    meta = _meta(cfg, direction)
    if cfg.format == "json":
        return _dump_json({"meta": meta, "rows": rows}), 0
    return _rows_csv(rows, _header_lines(meta)), 0


def cmd_brs(cfg):
    from .brs import DegenerateIntersection, Status, build_cells_d2, gl_polygon_verdict
    from .brs import verdict_report

    direction = _direction(cfg)
    try:
        cells = build_cells_d2(direction)
    except ChamberError as exc:
        raise UsageError(str(exc), EXIT_CHAMBER) from exc
    except DegenerateIntersection as exc:
        raise UsageError(str(exc), EXIT_BOUNDARY) from exc
    verdicts = [gl_polygon_verdict(c) for c in cells]
    meta = _meta(cfg, direction)
    meta["N"] = None
    if cells:
        meta["notes"] = meta["notes"] + list(cells[0].direction.notes[len(direction.notes):])
    code = EXIT_UNDETERMINED if any(v.status is Status.UNDETERMINED for v in verdicts) else 0
    report = verdict_report(direction, cells, verdicts)
    if cfg.format == "csv":
        rows = [{"label": r["label"], "status": r["status"], "reason": r["reason"],
                 "edge_pair": "" if r["edge_pair"] is None else "-".join(map(str, r["edge_pair"]))}
                for r in report]
        return _rows_csv(rows, _header_lines(meta)), code
    return _dump_json({"meta": meta, "cells": report}), code


def cmd_selftest(cfg):
    from .selftest import run_selftest

    results = run_selftest()
    lines = [f"{'PASS' if ok else 'FAIL'} {name}{(': ' + detail) if detail else ''}"
             for name, ok, detail in results]
    code = 0 if all(ok for _, ok, _ in results) else EXIT_SELFTEST
    return "\n".join(lines) + "\n", code


COMMANDS = {
    "generate": cmd_generate,
    "balance": cmd_balance,
    "freqs": cmd_freqs,
    "brs": cmd_brs,
    "complexity": cmd_complexity,
    "selftest": cmd_selftest,
}


def write_atomic(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None):
    ns = build_parser().parse_args(argv)
    cfg = _config(ns)
    try:
        cfg.validate()
        text, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    write_atomic(cfg.output, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
