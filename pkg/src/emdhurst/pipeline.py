"""Batch driver: break test, TSO/TSB/TSA decomposition and report files."""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .breaktest import MIN_TEST_LENGTH, split_at_break, za_test
from .emd import EmdConfig
from .exceptions import ConfigError, EmdHurstError, TooShortError
from .hurst import MIN_AUTO_LENGTH
from .scales import analyze_scales, parse_split_policy
from .series_io import read_csv

logger = logging.getLogger(__name__)

__all__ = ["PipelineConfig", "SeriesOutcome", "PipelineResult", "run_pipeline", "process_file"]

REPRO_MAX_IMFS = 9
REPRO_SPLIT = "fixed:5"
FORMATS = ("json", "csv", "both")
MODES = ("full", "nobreak")


@dataclass(frozen=True)
class PipelineConfig:
    inputs: tuple
    output_dir: str
    column: str | None = None
    mode: str = "full"
    trim: float = 0.15
    lags: object = "tsig"  # "tsig" or a fixed lag count for the break test
    max_lags: int | None = None
    emd: EmdConfig = field(default_factory=EmdConfig)
    split_policy: str = "auto"
    paper_repro: bool = False
    format: str = "both"
    jobs: int = 1

    def validate(self):
        if not self.inputs:
            raise ConfigError("no input files given")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if not 0 < self.trim < 0.5:
            raise ConfigError("trim must lie in (0, 0.5)")
        try:
            parse_split_policy(self.split_policy)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        stems = [_stem(p) for p in self.inputs]
        if len(set(stems)) != len(stems):
            raise ConfigError("input file names must be unique (outputs are keyed by name)")
        return self

    def effective(self):
        """Config with the --paper-repro pins (9 IMFs, split after IMF5) applied."""
        if not self.paper_repro:
            return self
        return replace(
            self,
            emd=replace(self.emd, max_imfs=REPRO_MAX_IMFS),
            split_policy=REPRO_SPLIT,
        )


@dataclass
class SeriesOutcome:
    path: str
    label: str
    ok: bool
    reports: dict = field(default_factory=dict)  # kind -> ScaleReport
    break_info: object = None
    files: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    error: str | None = None


@dataclass
class PipelineResult:
    outcomes: list

    @property
    def exit_code(self):
        return 0 if all(o.ok for o in self.outcomes) else 1


def _stem(path):
    return os.path.splitext(os.path.basename(str(path)))[0]


def _write(path, text, files):
    with open(path, "w", newline="") as fh:
        fh.write(text)
    files.append(path)


def _emit(outcome, kind, report, decomp, out_dir, fmt):
    stem = os.path.join(out_dir, kind)
    if fmt in ("json", "both"):
        _write(f"{stem}_report.json", report.to_json(), outcome.files)
    if fmt in ("csv", "both"):
        _write(f"{stem}_imfs.csv", decomp.to_csv(), outcome.files)
        _write(f"{stem}_imf_table.csv", report.imf_table_csv(), outcome.files)
        lines = ["component,ln_n,ln_rs"]
        named = [(f"imf{i + 1}", e) for i, e in enumerate(report.imf_hurst)]
        named += [("x_st", report.h_st), ("x_lt", report.h_lt), ("residue", report.h_residue)]
        for name, est in named:
            if est is None:
                continue
            ln_n, ln_rs = est.log_points
            lines += [f"{name},{a!r},{b!r}" for a, b in zip(ln_n.tolist(), ln_rs.tolist())]
        _write(f"{stem}_rs_points.csv", "\n".join(lines) + "\n", outcome.files)


def process_file(path, config):
    """Run the whole analysis for one input file; never raises on data problems."""
    config = config.effective()
    label = _stem(path)
    outcome = SeriesOutcome(path=str(path), label=label, ok=True)
    try:
        series = read_csv(path, column=config.column, label=label)
    except (EmdHurstError, OSError, UnicodeDecodeError) as exc:
        outcome.ok = False
        outcome.error = f"parse error: {exc}"
        logger.error("%s: %s", label, outcome.error)
        return outcome

    out_dir = os.path.join(config.output_dir, label)
    os.makedirs(out_dir, exist_ok=True)

    kinds = {"TSO": series}
    if config.mode == "full":
        if len(series) < MIN_TEST_LENGTH:
            outcome.warnings.append(
                f"series too short for the break test ({len(series)} < {MIN_TEST_LENGTH}); "
                "analysing TSO only"
            )
        else:
            try:
                brk = za_test(series, trim=config.trim, lags=config.lags, max_lags=config.max_lags)
            except EmdHurstError as exc:
                outcome.warnings.append(f"break test failed ({exc}); analysing TSO only")
            else:
                outcome.break_info = brk
                if config.format in ("json", "both"):
                    _write(
                        os.path.join(out_dir, "break.json"),
                        brk.to_json(indent=2) + "\n",
                        outcome.files,
                    )
                kinds["TSB"], kinds["TSA"] = split_at_break(series, brk)

    for kind, piece in kinds.items():
        if len(piece) < MIN_AUTO_LENGTH:
            # too few points for a meaningful R/S fit; skip rather than report noise
            outcome.warnings.append(
                f"{kind}: too short to analyse ({len(piece)} < {MIN_AUTO_LENGTH} points); "
                "report skipped"
            )
            continue
        try:
            report, decomp = analyze_scales(
                piece,
                config.emd,
                split_policy=config.split_policy,
                kind=kind,
                break_info=outcome.break_info,
            )
        except TooShortError as exc:
            msg = f"{kind}: too short to analyse ({len(piece)} points: {exc}); report skipped"
            outcome.warnings.append(msg)
            logger.warning("%s: %s", label, msg)
            continue
        except EmdHurstError as exc:
            outcome.ok = False
            outcome.error = f"{kind}: decomposition error: {exc}"
            logger.error("%s: %s", label, outcome.error)
            continue
        _emit(outcome, kind, report, decomp, out_dir, config.format)
        outcome.reports[kind] = report
    if not outcome.reports and outcome.ok:
        outcome.ok = False
        outcome.error = "no series kind was long enough to analyse"
    for w in outcome.warnings:
        logger.warning("%s: %s", label, w)
    summary = {
        "label": label,
        "ok": outcome.ok,
        "error": outcome.error,
        "reports": sorted(outcome.reports),
        "warnings": outcome.warnings,
    }
    _write(os.path.join(out_dir, "summary.json"), json.dumps(summary, indent=2) + "\n",
           outcome.files)
    return outcome


def run_pipeline(config):
    """Process every input; per-file failures are recorded, not raised."""
    config.validate()
    os.makedirs(config.output_dir, exist_ok=True)
    paths = list(config.inputs)
    if config.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(process_file, paths, [config] * len(paths)))
    else:
        outcomes = [process_file(p, config) for p in paths]
    return PipelineResult(outcomes)
