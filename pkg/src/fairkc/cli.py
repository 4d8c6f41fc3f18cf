"""Command-line entry point: ``fairkc run``, ``fairkc sweep``, ``fairkc synth``."""
from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from pathlib import Path

from .data import load_dataset, make_synthetic, write_dataset
from .errors import InputError
from .runner import ALGORITHMS, DEFAULT_TLE_SECONDS, RunConfig, emit_plot_data, run

log = logging.getLogger("fairkc")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _add_run_flags(p):
    p.add_argument("--input", required=True, help="CSV with a header row")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1, help="binary-search tolerance on the radius")
    p.add_argument("--alpha", type=_floats, help="comma list, one per group, or a single shared value")
    p.add_argument("--beta", type=_floats, help="comma list; defaults to 0 when --alpha is given")
    p.add_argument("--delta", type=float, help="set alpha/beta from group ratios instead")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="fair")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--output", help="JSON report path (stdout if omitted)")
    p.add_argument("--trace", action="store_true", help="include the binary-search trace")
    p.add_argument("--tle-seconds", type=float, default=DEFAULT_TLE_SECONDS)
    p.add_argument("--group-cols", required=True,
                   help="protected columns; suffix :cat or :bin to force categorical or indicator")
    p.add_argument("--feature-cols", help="defaults to every non-group column")
    p.add_argument("--minmax", action="store_true", help="rescale features to [0, 1] (off by default)")
    p.add_argument("--facilities", help="CSV of candidate centers; default is the input points")


def _config(args) -> RunConfig:
    return RunConfig(
        input=args.input, k=args.k, epsilon=args.epsilon, alpha=args.alpha, beta=args.beta,
        delta=args.delta, algorithm=args.algorithm, seed=args.seed, repeats=args.repeats,
        output=getattr(args, "output", None), trace=args.trace, tle_seconds=args.tle_seconds,
        group_cols=args.group_cols, feature_cols=args.feature_cols, minmax=args.minmax,
        facilities=args.facilities,
    )


def _write(path, text):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _summary(report):
    eps = report.epsilon_violation
    eps_text = "n/a" if not eps else f"{eps['median_ceil']}({eps['max_ceil']}) raw {eps['median']:.3g}({eps['max']:.3g})"
    cost = "n/a" if report.cost is None else f"{report.cost:.6g}"
    return (f"{report.dataset} k={report.k} {report.algorithm}: status={report.status} cost={cost} "
            f"epsilon={eps_text} runtime={report.runtime_seconds:.3f}s")


def cmd_run(args):
    config = _config(args)
    report = run(config)
    _write(config.output, report.to_json())
    clustering = getattr(report, "clustering", None)
    if args.dump_table and clustering is not None:
        Path(args.dump_table).write_text(clustering.table.to_csv(report.group_names), encoding="utf-8")
    if args.dump_lp and clustering is not None:
        Path(args.dump_lp).write_text(clustering.lp.to_text(), encoding="utf-8")
    print(_summary(report), file=sys.stderr)
    return 0 if report.status == "ok" else 2


def cmd_sweep(args):
    base = _config(args)
    data = load_dataset(base.input, base.group_cols, base.feature_cols, base.minmax)
    reports = []
    for value in _floats(args.values):
        config = copy.copy(base)
        if args.axis == "k":
            config.k = int(value)
        elif args.axis == "delta":
            config.delta, config.alpha, config.beta = value, None, None
        elif args.axis == "alpha":
            config.alpha = [value]
        else:
            raise InputError(f"cannot sweep over {args.axis!r}")
        report = run(config, data=data)
        print(_summary(report), file=sys.stderr)
        reports.append(report)
    _write(args.plot_output, emit_plot_data(reports, args.axis))
    if args.output:
        Path(args.output).write_text(json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2) + "\n",
                                     encoding="utf-8")
    return 0


def cmd_synth(args):
    points, model = make_synthetic(args.n, n_groups=args.groups, dim=args.dim, n_blobs=args.blobs,
                                   mixing=args.mixing, overlap=args.overlap, seed=args.seed)
    write_dataset(args.output, points, model)
    print(f"wrote {points.count} points, {model.n_groups} groups to {args.output}", file=sys.stderr)
    print("group columns: " + ",".join(model.names), file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="fairkc", description="Fair k-center clustering")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="cluster one dataset and write a JSON report")
    _add_run_flags(p)
    p.add_argument("--dump-table", help="write the final (signature, joiner) table as CSV")
    p.add_argument("--dump-lp", help="write the final LP in plain-text form")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run over several k/delta/alpha values and emit tidy plot data")
    _add_run_flags(p)
    p.add_argument("--axis", choices=("k", "delta", "alpha"), required=True)
    p.add_argument("--values", required=True, help="comma list of sweep values")
    p.add_argument("--plot-output", help="tidy CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic Gaussian-blob dataset")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--groups", type=int, default=2)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--blobs", type=int)
    p.add_argument("--mixing", type=float, default=1.0)
    p.add_argument("--overlap", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
