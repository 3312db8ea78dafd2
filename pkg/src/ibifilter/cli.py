"""Command-line front end.

Exit codes: 0 success, 2 malformed input, 3 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .benchmark import hrv_curves
from .fileio import MalformedInput, column, read_beats, read_records, write_numbers, write_records
from .filter import FilterConfig, InvalidConfig, run_filter
from .igmath import IGParams, ModeVariant
from .metrics import SingleClass, roc
from .synth import BeatSeries, corrupt, gen_drifting

EXIT_MALFORMED = 2
EXIT_CONFIG = 3

TRACE_COLUMNS = ("index", "end_time", "r", "beta0", "mu_star", "lambda_star", "mean_ibi", "std_ibi")
LABEL_COLUMNS = ("index", "end_time", "ibi", "anomalous")
EVAL_COLUMNS = ("time", "sdnn_clean", "sdnn_corrupted", "filter_std")
ROC_COLUMNS = ("threshold", "false_alarm_rate", "detection_rate")


class ConfigError(Exception):
    pass


@contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _load_beats(path: str, ibis: bool) -> BeatSeries:
    if path == "-":
        times = read_beats(sys.stdin, "<stdin>", ibis=ibis)
    else:
        with open(path) as fh:
            times = read_beats(fh, path, ibis=ibis)
    if len(times) < 2:
        raise MalformedInput(path, len(times), "need at least two beats")
    return BeatSeries(np.asarray(times))


def _load_records(path: str) -> list[dict]:
    with open(path) as fh:
        return read_records(fh, path)


def _probability(name: str, value: float | None) -> float:
    if value is None:
        return 0.0
    if not 0.0 <= value < 1.0:
        raise ConfigError(f"{name} must lie in [0, 1), got {value}")
    return value


def _filter_config(args) -> FilterConfig:
    return FilterConfig(
        gamma=args.gamma,
        p_e=args.p_e,
        lambda_e=args.lambda_e,
        mode_variant=ModeVariant(args.mode),
        warmup_beats=args.warmup,
        lambda_bounds=(args.lambda_min, args.lambda_max),
        r_bounds=(args.r_min, args.r_max),
    )


def _seed_ibi(args, config: FilterConfig) -> float | None:
    if args.seed_ibi is not None and not config.r_bounds[0] < args.seed_ibi < config.r_bounds[1]:
        raise ConfigError(f"--seed-ibi must lie in ({config.r_bounds[0]}, {config.r_bounds[1]})")
    return args.seed_ibi


def _summary(args, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True)
    if args.summary:
        Path(args.summary).write_text(text + "\n")
    else:
        print(text, file=sys.stderr)


# --- subcommands -------------------------------------------------------------


def cmd_simulate(args) -> None:
    if args.n < 1:
        raise ConfigError("-n must be >= 1")
    mu_end = args.mu if args.mu_end is None else args.mu_end
    lam_end = args.lam if args.lam_end is None else args.lam_end
    try:
        IGParams(args.mu, args.lam)
        IGParams(mu_end, lam_end)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rng = np.random.default_rng(args.seed)
    beats = gen_drifting(np.linspace(args.mu, mu_end, args.n), np.linspace(args.lam, lam_end, args.n), rng)
    with _open_out(args.output) as fh:
        write_numbers(fh, beats.times)


def cmd_corrupt(args) -> None:
    p_m = _probability("--p-m", args.p if args.p_m is None else args.p_m)
    p_f = _probability("--p-f", args.p if args.p_f is None else args.p_f)
    beats = _load_beats(args.input, args.ibis)
    noisy, labeled = corrupt(beats, p_m, p_f, np.random.default_rng(args.seed))
    with _open_out(args.output) as fh:
        write_numbers(fh, noisy.times)
    if args.labels:
        rows = (
            (i, float(t), float(r), bool(lab))
            for i, (t, r, lab) in enumerate(zip(noisy.times[1:], labeled.ibis, labeled.labels))
        )
        with open(args.labels, "w", newline="") as fh:
            write_records(fh, LABEL_COLUMNS, rows, args.format)
    print(json.dumps(labeled.meta, sort_keys=True), file=sys.stderr)


def _trace_rows(beats: BeatSeries, config: FilterConfig, seed_ibi):
    trace = run_filter(beats.ibis, config, seed_ibi)
    cols = (beats.times[1:], trace.ibis, trace.beta0, trace.mu_star, trace.lambda_star, trace.mean_ibi, trace.std_ibi)
    return [(i, *map(float, vals)) for i, vals in enumerate(zip(*cols))]


def _filter_one(job) -> str:
    src, dst, ibis, config, seed_ibi, fmt = job
    beats = _load_beats(src, ibis)
    with _open_out(dst) as fh:
        write_records(fh, TRACE_COLUMNS, _trace_rows(beats, config, seed_ibi), fmt)
    return dst


def cmd_filter(args) -> None:
    config = _filter_config(args)
    seed_ibi = _seed_ibi(args, config)
    if len(args.inputs) == 1:
        jobs = [(args.inputs[0], args.output, args.ibis, config, seed_ibi, args.format)]
    else:
        if not args.output or not Path(args.output).is_dir():
            raise ConfigError("several inputs need --output pointing at an existing directory")
        ext = "csv" if args.format == "csv" else "ndjson"
        jobs = [
            (src, str(Path(args.output) / f"{Path(src).stem}.trace.{ext}"), args.ibis, config, seed_ibi, args.format)
            for src in args.inputs
        ]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(_filter_one, jobs))
    else:
        for job in jobs:
            _filter_one(job)


def cmd_eval(args) -> None:
    if not args.window > 0:
        raise ConfigError("--window must be positive")
    config = _filter_config(args)
    seed_ibi = _seed_ibi(args, config)
    clean = _load_beats(args.clean, args.ibis)
    noisy = _load_beats(args.corrupted, args.ibis)
    trace = run_filter(noisy.ibis, config, seed_ibi)
    curves = hrv_curves(clean, noisy, trace, args.window)
    rows = zip(
        map(float, curves.times),
        map(float, curves.clean.values),
        map(float, curves.corrupted.values),
        map(float, curves.filtered.values),
    )
    with _open_out(args.output) as fh:
        write_records(fh, EVAL_COLUMNS, rows, args.format)
    _summary(args, {"mad": curves.mads(), "window": args.window})


def cmd_roc(args) -> None:
    scores = column(_load_records(args.trace), args.score_column, args.trace)
    labels = column(_load_records(args.labels), "anomalous", args.labels, cast=_parse_label)
    if len(scores) != len(labels):
        raise MalformedInput(args.labels, min(len(scores), len(labels)) + 1, "trace and labels differ in length", "record")
    try:
        curve = roc(scores, labels)
    except SingleClass as exc:
        raise MalformedInput(args.labels, 1, str(exc), "record") from None
    rows = ((pt.threshold, pt.false_alarm_rate, pt.detection_rate) for pt in curve.points)
    with _open_out(args.output) as fh:
        write_records(fh, ROC_COLUMNS, rows, args.format)
    _summary(args, {"auc": curve.auc, "n": len(scores), "n_anomalous": int(sum(labels))})


def _parse_label(raw) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("1", "true", "anomalous"):
        return True
    if text in ("0", "false", "normal"):
        return False
    raise ValueError(raw)


# --- parser ------------------------------------------------------------------


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "ndjson"), default="csv", help="record format (default: csv)")


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    d = FilterConfig()
    g = p.add_argument_group("filter")
    g.add_argument("--gamma", type=float, default=d.gamma, help="forgetting factor in (0, 1)")
    g.add_argument("--p-e", type=float, default=d.p_e, help="prior anomaly probability in [0, 1)")
    g.add_argument("--lambda-e", type=float, default=d.lambda_e, help="rate of the exponential anomaly law, 1/s")
    g.add_argument("--mode", choices=[m.value for m in ModeVariant], default=d.mode_variant.value)
    g.add_argument("--warmup", type=int, default=d.warmup_beats, help="warm-up beats with forced acceptance")
    g.add_argument("--lambda-min", type=float, default=d.lambda_bounds[0])
    g.add_argument("--lambda-max", type=float, default=d.lambda_bounds[1])
    g.add_argument("--r-min", type=float, default=d.r_bounds[0], help="smallest admissible IBI, s")
    g.add_argument("--r-max", type=float, default=d.r_bounds[1], help="largest admissible IBI, s")
    g.add_argument("--seed-ibi", type=float, default=None, help="nominal IBI for the initial state (default 0.8 s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ibifilter", description="Inverse-Gaussian IBI filtering toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw beat times from an inverse Gaussian IBI model")
    p.add_argument("--mu", type=float, default=0.8, help="mean IBI, s")
    p.add_argument("--lam", type=float, default=400.0, help="IG shape, s")
    p.add_argument("--mu-end", type=float, help="linearly drift mu to this value")
    p.add_argument("--lam-end", type=float, help="linearly drift lam to this value")
    p.add_argument("-n", type=int, default=10_000, help="number of beats")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("corrupt", help="inject missed and false detections")
    p.add_argument("input")
    p.add_argument("--ibis", action="store_true", help="input holds intervals, not timestamps")
    p.add_argument("--p", type=float, default=None, help="sets both --p-m and --p-f")
    p.add_argument("--p-m", type=float, default=None, help="per-beat deletion probability")
    p.add_argument("--p-f", type=float, default=None, help="false beats as a fraction of the beat count")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--labels", help="write per-interval ground-truth labels here")
    _add_format(p)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser(
        "filter",
        help="run the IBI filter",
        description="Columns: " + ",".join(TRACE_COLUMNS) + ". One record per interval.",
    )
    p.add_argument("inputs", nargs="+")
    p.add_argument("--ibis", action="store_true", help="inputs hold intervals, not timestamps")
    p.add_argument("-o", "--output", help="output file, or directory when several inputs are given")
    p.add_argument("--jobs", type=int, default=1)
    _add_format(p)
    _add_filter_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser(
        "eval",
        help="sliding SDNN curves and their MAD",
        description="Columns: " + ",".join(EVAL_COLUMNS) + ". Evaluated at every clean beat.",
    )
    p.add_argument("--clean", required=True)
    p.add_argument("--corrupted", required=True)
    p.add_argument("--ibis", action="store_true")
    p.add_argument("--window", type=float, default=300.0, help="SDNN window, s (default 300)")
    p.add_argument("-o", "--output")
    p.add_argument("--summary", help="write the MAD summary JSON here instead of stderr")
    _add_format(p)
    _add_filter_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser(
        "roc", help="ROC of anomaly probabilities", description="Columns: " + ",".join(ROC_COLUMNS) + "."
    )
    p.add_argument("--trace", required=True, help="filter trace (CSV or NDJSON)")
    p.add_argument("--labels", required=True, help="labels written by 'corrupt --labels'")
    p.add_argument("--score-column", default="beta0")
    p.add_argument("-o", "--output")
    p.add_argument("--summary", help="write the AUC summary JSON here instead of stderr")
    _add_format(p)
    p.set_defaults(func=cmd_roc)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, InvalidConfig) as exc:
        print(f"ibifilter: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MalformedInput as exc:
        print(f"ibifilter: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"ibifilter: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    return 0


if __name__ == "__main__":
    sys.exit(main())
