"""Command-line interface.

Exit codes
----------
0  all requested artifacts written
1  unexpected internal error
2  invalid command-line flags
3  input data error (missing file, malformed CSV, unknown column)
4  tail selection too small for the requested computation
5  numerical failure (singular matrix, failed replication)
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import DataError, align_and_log_diff, load_csv
from .empirical import (
    EmptySelectionError,
    diagonal_selection,
    mtd_maximizer,
    pseudo_observations,
)
from .estimators import DEFAULT_THETA, relative_difference, todd_estimate, tomd_estimate
from .gof import KS_MODES, NULL_SCHEMES, Direction, gof_table
from .portmanteau import portmanteau_suite
from .reporting import histogram_svg, histogram_table, write_csv, write_json
from .simulation import ReplicationError, SimConfig, resolve_workers, simulation_study
from .synthetic import write_synthetic_prices

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_DATA, EXIT_SELECTION, EXIT_NUMERIC = 0, 1, 2, 3, 4, 5


class SelectionTooSmall(Exception):
    pass


def _threshold(text):
    try:
        q = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < q <= 1.0:
        raise argparse.ArgumentTypeError(f"q must lie in (0, 1], got {q}")
    return q


def _positive_int(text):
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {k}")
    return k


def _nonneg_float(text):
    x = float(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {x}")
    return x


def _level(text):
    x = float(text)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {x}")
    return x


def _seed(text):
    k = int(text)
    if not 0 <= k < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return k


def _int_list(text):
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def _add_input_flags(p):
    p.add_argument("--input", required=True, type=Path, help="CSV with a 'date' column")
    p.add_argument("--col-x", required=True)
    p.add_argument("--col-y", required=True)
    p.add_argument("--q", required=True, type=_threshold)
    p.add_argument(
        "--input-kind",
        choices=("prices", "returns"),
        default="prices",
        help="prices are log-differenced; returns are used as given",
    )
    p.add_argument(
        "--negate-returns",
        action="store_true",
        help="analyze joint gains instead of joint losses",
    )
    p.add_argument("--out", type=Path, default=Path("."))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailmax",
        description="Maximal and diagonal tail-order estimation for bivariate series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="replication study on generalized Clayton AR(1) data")
    p.add_argument("--gamma0", required=True, type=float)
    p.add_argument("--gamma1", required=True, type=float)
    p.add_argument("--phi", type=float, default=0.6)
    p.add_argument("--n", type=_positive_int, default=500_000)
    p.add_argument("--reps", type=_positive_int, default=1000)
    p.add_argument("--q", required=True, type=_threshold)
    p.add_argument("--m", type=_positive_int, default=5)
    p.add_argument("--theta", type=_nonneg_float, default=DEFAULT_THETA)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--svg", action="store_true", help="also write histogram.svg")
    p.add_argument("--out", type=Path, default=Path("."))

    p = sub.add_parser("estimate", help="TOMD, TODD and their relative difference")
    _add_input_flags(p)
    p.add_argument("--m", type=_positive_int, default=5)
    p.add_argument("--theta", type=_nonneg_float, default=DEFAULT_THETA)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--m-sweep", type=_int_list, default=None, help="comma-separated block sizes")

    p = sub.add_parser("gof", help="one-sided tests of F* >= uv and F* = uv")
    _add_input_flags(p)
    p.add_argument("--direction", choices=("below", "above", "both"), default="both")
    p.add_argument("--resamples", type=_positive_int, default=10_000)
    p.add_argument("--level", type=_level, default=0.95)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--null", choices=NULL_SCHEMES, default="uniform")
    p.add_argument("--ks-mode", choices=KS_MODES, default="members")

    p = sub.add_parser("whitenoise", help="portmanteau tests on the extreme-pair series")
    _add_input_flags(p)
    p.add_argument("--max-lag", type=_positive_int, default=20)

    p = sub.add_parser("synthetic", help="write the synthetic price panel")
    p.add_argument("--n", type=_positive_int, default=5000)
    p.add_argument("--seed", type=_seed, default=20240101)
    p.add_argument("--out", type=Path, required=True, help="CSV path")
    return parser


def _load_pair(args):
    series = load_csv(args.input, [args.col_x, args.col_y])
    if args.input_kind == "prices":
        panel = align_and_log_diff(series)
        dates = panel.dates
        x, y = panel.column(args.col_x), panel.column(args.col_y)
    else:
        keep = ~(np.isnan(series[0].values) | np.isnan(series[1].values))
        dates = tuple(d for d, k in zip(series[0].dates, keep) if k)
        x, y = series[0].values[keep], series[1].values[keep]
    if args.negate_returns:
        x, y = -x, -y
    label = f"{args.input.name}:{args.col_x},{args.col_y}"
    return dates, pseudo_observations(x, y, label)


def _selection_or_fail(sample, q):
    sel = mtd_maximizer(sample, q)
    if sel.m_q == 0:
        raise SelectionTooSmall(f"empty MTD rectangle at q={q} (n={sample.n}, m_q=0)")
    return sel


def cmd_simulate(args):
    config = SimConfig(
        gamma0=args.gamma0,
        gamma1=args.gamma1,
        q=args.q,
        phi=args.phi,
        n=args.n,
        replications=args.reps,
        m=args.m,
        theta=args.theta,
        seed=args.seed,
    )
    row = simulation_study(config, workers=resolve_workers(args.threads))
    out = args.out
    study = {
        "gamma0": row.gamma0,
        "gamma1": row.gamma1,
        "kappa_star_true": row.kappa_star_true,
        "replications": len(row.replication_estimates),
        "mean": row.mean,
        "config": row.config,
    }
    if row.stdev is not None:
        study["stdev"] = row.stdev
    outputs = {
        "study": write_json(study, out / "study.json", "study"),
        "replications": write_csv(
            ["index", "estimate"],
            [(i, repr(e)) for i, e in enumerate(row.replication_estimates)],
            out / "replications.csv",
        ),
        "histogram": write_csv(
            ["bin_left", "bin_right", "count", "density", "normal_density"],
            [tuple(repr(x) if isinstance(x, float) else x for x in r) for r in histogram_table(row.replication_estimates)],
            out / "histogram.csv",
        ),
    }
    if args.svg:
        title = f"TOMD estimates, (gamma0, gamma1) = ({row.gamma0}, {row.gamma1}), q = {config.q}"
        path = out / "histogram.svg"
        path.write_text(histogram_svg(row.replication_estimates, title), encoding="utf-8")
        outputs["histogram_svg"] = path
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return params, outputs, args.seed


def cmd_estimate(args):
    dates, sample = _load_pair(args)
    sel = _selection_or_fail(sample, args.q)
    diag = diagonal_selection(sample, args.q)
    if diag.n_q < 3:
        raise SelectionTooSmall(
            f"TODD needs at least 3 points in [0, q]^2 at q={args.q}, got n_q={diag.n_q}"
        )
    tomd = tomd_estimate(sel, args.m, args.theta, args.seed)
    todd = todd_estimate(diag)
    doc = {
        "source": sample.source_label,
        "n": sample.n,
        "q": args.q,
        "m": args.m,
        "theta": args.theta,
        "seed": args.seed,
        "phi_star_n": sel.phi_star_n,
        "pi_star_n": sel.pi_star_n,
        "m_q": sel.m_q,
        "n_q": diag.n_q,
        "tomd": tomd.value,
        "todd": todd.value,
        "rd_percent": relative_difference(tomd.value, todd.value),
    }
    if args.m_sweep:
        doc["m_sweep"] = [
            {"m": m, "tomd": tomd_estimate(sel, m, args.theta, args.seed).value}
            for m in args.m_sweep
        ]
    out = args.out
    rect_rows = [
        (int(i), dates[i].isoformat(), repr(float(sample.u[i])), repr(float(sample.v[i])), repr(float(ut)), repr(float(vt)))
        for i, ut, vt in zip(sel.member_indices, sel.u_tilde, sel.v_tilde)
    ]
    diag_rows = [
        (int(i), dates[i].isoformat(), repr(float(sample.u[i])), repr(float(sample.v[i])),
         repr(float(sample.u[i] / args.q)), repr(float(sample.v[i] / args.q)))
        for i in diag.member_indices
    ]
    outputs = {
        "estimate": write_json(doc, out / "estimate.json", "estimate"),
        "rectangle_pairs": write_csv(
            ["index", "date", "u", "v", "u_tilde", "v_tilde"], rect_rows, out / "rectangle_pairs.csv"
        ),
        "diagonal_pairs": write_csv(
            ["index", "date", "u", "v", "u_over_q", "v_over_q"], diag_rows, out / "diagonal_pairs.csv"
        ),
    }
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return params, outputs, args.seed


def cmd_gof(args):
    _, sample = _load_pair(args)
    sel = _selection_or_fail(sample, args.q)
    directions = (
        (Direction.BELOW, Direction.ABOVE)
        if args.direction == "both"
        else (Direction(args.direction),)
    )
    rows = gof_table(sel, directions, args.resamples, args.level, args.seed, args.null, args.ks_mode)
    doc = {
        "source": sample.source_label,
        "q": args.q,
        "m_q": sel.m_q,
        "phi_star_n": sel.phi_star_n,
        "rows": [
            {
                "test": r.statistic_kind.value,
                "direction": r.direction.value,
                "stat": r.statistic,
                "crit": r.critical_value,
                "deci": r.decision.value,
                "level": r.level,
                "n_resamples": r.n_resamples,
                "seed": r.seed,
                "null": r.null,
                "ks_mode": r.ks_mode,
            }
            for r in rows
        ],
    }
    out = args.out
    outputs = {
        "gof": write_json(doc, out / "gof.json", "gof"),
        "gof_table": write_csv(
            ["Test", "Direction", "Stat", "Crit", "Deci"],
            [(d["test"], d["direction"], f"{d['stat']:.4f}", f"{d['crit']:.4f}", d["deci"]) for d in doc["rows"]],
            out / "gof.csv",
        ),
    }
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return params, outputs, args.seed


def cmd_whitenoise(args):
    _, sample = _load_pair(args)
    sel = _selection_or_fail(sample, args.q)
    need = 5 * args.max_lag
    if sel.m_q < need:
        raise SelectionTooSmall(
            f"extreme-pair series too short at q={args.q}: m_q={sel.m_q}, need at least {need}"
        )
    idx = sel.member_indices
    series = np.column_stack([sample.u[idx], sample.v[idx]])
    report = portmanteau_suite(series, args.max_lag)
    doc = {
        "source": sample.source_label,
        "q": args.q,
        "m_q": sel.m_q,
        "max_lag": args.max_lag,
        "level": report.level,
        "retained_pct_pooled": report.retained_pct_pooled,
        "retained_pct_by_test": report.retained_pct_by_test,
        "results": [r.to_row() for r in report.results],
    }
    out = args.out
    outputs = {
        "whitenoise": write_json(doc, out / "whitenoise.json", "whitenoise"),
        "whitenoise_table": write_csv(
            ["test", "lag", "statistic", "df", "p_value"],
            [(r.test_kind.value, r.lag, repr(r.statistic), repr(r.df), repr(r.p_value)) for r in report.results],
            out / "whitenoise.csv",
        ),
    }
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    return params, outputs, None


def cmd_synthetic(args):
    args.out.parent.mkdir(parents=True, exist_ok=True)
    path = write_synthetic_prices(args.out, args.n, args.seed)
    return {"n": args.n, "seed": args.seed}, {"prices": path}, args.seed


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "gof": cmd_gof,
    "whitenoise": cmd_whitenoise,
    "synthetic": cmd_synthetic,
}


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        if args.command != "synthetic":
            args.out.mkdir(parents=True, exist_ok=True)
        params, outputs, seed = COMMANDS[args.command](args)
    except (DataError, FileNotFoundError) as exc:
        print(f"tailmax: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SelectionTooSmall, EmptySelectionError) as exc:
        print(f"tailmax: selection error: {exc}", file=sys.stderr)
        return EXIT_SELECTION
    except (np.linalg.LinAlgError, ReplicationError, ZeroDivisionError) as exc:
        print(f"tailmax: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"tailmax: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "command": args.command,
        "version": __version__,
        "parameters": {k: _jsonable(v) for k, v in params.items()},
        "outputs": {k: str(v) for k, v in outputs.items()},
        "seed": seed,
        "timing_seconds": time.perf_counter() - start,
    }
    if args.command != "synthetic":
        write_json(report, args.out / "run.json", "run_report")
    print(json.dumps(report, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
