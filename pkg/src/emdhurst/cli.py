"""Command line entry point: ``emdhurst {analyze,synth,zabreak,hurst}``.

Exit codes: 0 success, 1 some inputs failed, 2 configuration error.
Set ``EMDHURST_LOG_LEVEL`` (DEBUG, INFO, WARNING, ...) for log verbosity.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .breaktest import za_test
from .emd import EmdConfig
from .exceptions import ConfigError, EmdHurstError
from .hurst import hurst_exponent
from .pipeline import PipelineConfig, run_pipeline
from .scales import parse_split_policy
from .series_io import COLUMNS, read_csv, to_csv, write_csv
from .synth import KINDS, SynthSpec, generate

logger = logging.getLogger("emdhurst")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _lag_policy(text):
    if text == "tsig":
        return "tsig"
    if text.startswith("fixed:"):
        text = text.split(":", 1)[1]
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--lags must be 'tsig' or an integer, got {text!r}")
    if k < 0:
        raise argparse.ArgumentTypeError("--lags must be >= 0")
    return k


def _split_policy(text):
    try:
        parse_split_policy(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    return text


def build_parser():
    parser = argparse.ArgumentParser(
        prog="emdhurst",
        description="Short/long-term time-scale separation of daily price series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="full pipeline over one or more CSV files")
    an.add_argument("--input", nargs="+", default=[], metavar="CSV")
    an.add_argument("--column", choices=sorted(COLUMNS), default=None)
    an.add_argument("--trim", type=float, default=0.15)
    an.add_argument("--lags", type=_lag_policy, default="tsig", help="'tsig' or a fixed lag count")
    an.add_argument("--max-lags", type=int, default=None)
    an.add_argument("--sd", type=float, default=0.2, help="sifting stop threshold")
    an.add_argument("--max-imfs", type=int, default=None)
    an.add_argument("--split", type=_split_policy, default="auto",
                    help="auto | threshold:<h> | fixed:<j>")
    an.add_argument("--no-break", action="store_true", help="skip the break test (TSO only)")
    an.add_argument("--paper-repro", action="store_true",
                    help="pin 9 IMFs and a fixed split after IMF5")
    an.add_argument("--out", required=True)
    an.add_argument("--format", choices=("json", "csv", "both"), default="both")
    an.add_argument("--jobs", type=int, default=1)

    sy = sub.add_parser("synth", help="write a seeded synthetic series as CSV")
    sy.add_argument("--kind", required=True, type=lambda s: s.replace("-", "_").lower(),
                    choices=KINDS)
    sy.add_argument("--n", type=int, required=True)
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--h", type=float, default=0.5)
    sy.add_argument("--period", type=float, default=20.0)
    sy.add_argument("--f0", type=float, default=0.01)
    sy.add_argument("--f1", type=float, default=0.1)
    sy.add_argument("--break-frac", type=float, default=0.5)
    sy.add_argument("--level-shift", type=float, default=10.0)
    sy.add_argument("--slope-shift", type=float, default=0.0)
    sy.add_argument("--noise-sd", type=float, default=1.0)
    sy.add_argument("--intercept", type=float, default=0.0)
    sy.add_argument("--slope", type=float, default=0.0)
    sy.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    za = sub.add_parser("zabreak", help="Zivot-Andrews break test on one CSV")
    za.add_argument("--input", required=True)
    za.add_argument("--column", choices=sorted(COLUMNS), default=None)
    za.add_argument("--trim", type=float, default=0.15)
    za.add_argument("--lags", type=_lag_policy, default="tsig")
    za.add_argument("--max-lags", type=int, default=None)

    hu = sub.add_parser("hurst", help="R/S Hurst exponent of one CSV")
    hu.add_argument("--input", required=True)
    hu.add_argument("--column", choices=sorted(COLUMNS), default=None)
    hu.add_argument("--diff", action="store_true", help="use first differences")
    hu.add_argument("--anis-lloyd", action="store_true")
    hu.add_argument("--points", action="store_true", help="print the ln_n,ln_rs cloud as CSV")
    return parser


def _cmd_analyze(args):
    if not args.input:
        logger.error("no input files given")
        return EXIT_CONFIG
    try:
        emd = EmdConfig(sd_threshold=args.sd, max_imfs=args.max_imfs)
        config = PipelineConfig(
            inputs=tuple(args.input),
            output_dir=args.out,
            column=args.column,
            mode="nobreak" if args.no_break else "full",
            trim=args.trim,
            lags=args.lags,
            max_lags=args.max_lags,
            emd=emd,
            split_policy=args.split,
            paper_repro=args.paper_repro,
            format=args.format,
            jobs=args.jobs,
        ).validate()
    except (ConfigError, ValueError) as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    result = run_pipeline(config)
    for o in result.outcomes:
        kinds = ",".join(o.reports) or "-"
        status = "ok" if o.ok else f"FAILED ({o.error})"
        print(f"{o.label}: {status}; reports: {kinds}")
    return result.exit_code


def _cmd_synth(args):
    spec = SynthSpec(
        kind=args.kind, n=args.n, seed=args.seed, h=args.h, period=args.period,
        f0=args.f0, f1=args.f1, break_frac=args.break_frac, level_shift=args.level_shift,
        slope_shift=args.slope_shift, noise_sd=args.noise_sd, intercept=args.intercept,
        slope=args.slope,
    )
    try:
        series = generate(spec)
    except EmdHurstError as exc:
        logger.error("invalid spec: %s", exc)
        return EXIT_CONFIG
    if args.out == "-":
        sys.stdout.write(to_csv(series))
    else:
        write_csv(series, args.out)
    return EXIT_OK


def _cmd_zabreak(args):
    try:
        series = read_csv(args.input, column=args.column)
        result = za_test(series, trim=args.trim, lags=args.lags, max_lags=args.max_lags)
    except (EmdHurstError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_PARTIAL
    print(result.to_json(indent=2))
    return EXIT_OK


def _cmd_hurst(args):
    try:
        series = read_csv(args.input, column=args.column)
        x = np.diff(series.values) if args.diff else series.values
        est = hurst_exponent(x, anis_lloyd=args.anis_lloyd)
    except (EmdHurstError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_PARTIAL
    if args.points:
        sys.stdout.write(est.to_csv())
    else:
        lo, hi = est.band()
        print(json.dumps({"h": est.h, "stderr": est.stderr, "band_2sigma": [lo, hi],
                          "intercept": est.intercept, "n_points": len(est.points)}, indent=2))
    return EXIT_OK


COMMANDS = {
    "analyze": _cmd_analyze,
    "synth": _cmd_synth,
    "zabreak": _cmd_zabreak,
    "hurst": _cmd_hurst,
}


def main(argv=None):
    level = os.environ.get("EMDHURST_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
