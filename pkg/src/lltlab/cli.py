"""Command line front end.

Subcommands: ``build`` (emit a model pmf to CSV plus metadata sidecar),
``llt`` (one-shot pointwise statistic), ``sup`` (one-shot interval supremum),
``study`` (full sweep).  Everything is deterministic; there is no randomness
anywhere, so no seed flag exists.  Exit codes: 0 success, 2 config error,
3 numerical or regime error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigInvalid, LltLabError
from .grids import write_pmf_csv
from .histogram import pointwise_llt_stat
from .intervalsup import sup_ratio_deviation
from .study import load_config, model_at, run_study, write_rows_csv


def _pick_n(config, arg_n):
    if arg_n is not None:
        return int(arg_n)
    return int(config.n_grid[-1])


def _cmd_build(args) -> int:
    config = load_config(args.config)
    pmf, _, _ = model_at(config, _pick_n(config, args.n))
    if pmf is None:
        raise LltLabError("the configured model family has no lattice pmf")
    write_pmf_csv(pmf, args.out, include_zeros=args.include_zeros)
    print(f"wrote {args.out} (+ metadata sidecar)")
    return 0


def _cmd_llt(args) -> int:
    config = load_config(args.config)
    n = _pick_n(config, args.n)
    pmf, density, _ = model_at(config, n)
    if pmf is None:
        raise LltLabError("pointwise statistic needs a lattice model family")
    stat = pointwise_llt_stat(pmf, density)
    row = {"n": n, "statistic_name": "pointwise_llt", "value": stat.value}
    for k, c in enumerate(stat.argmax):
        row[f"argmax_{k + 1}"] = float(c)
    if args.out:
        write_rows_csv([row], args.out)
    print(",".join(f"{k}={v!r}" for k, v in row.items()))
    return 0


def _cmd_sup(args) -> int:
    config = load_config(args.config)
    n = _pick_n(config, args.n)
    pmf, density, w = model_at(config, n)
    if pmf is None:
        raise LltLabError("interval supremum needs a lattice model family")
    if config.rule is None:
        raise LltLabError("config has no min_length_rule")
    m = config.rule.lengths(w, n)
    res = sup_ratio_deviation(pmf, density, config.box, m,
                              offsets=config.offsets,
                              box_prob_tol=config.box_prob_tol)
    row = {"n": n}
    for k in range(pmf.dim):
        row[f"m_{k + 1}"] = float(m[k])
    row["value"] = res.value
    for k in range(pmf.dim):
        row[f"witness_lo_{k + 1}"] = float(res.witness.lower[k])
    for k in range(pmf.dim):
        row[f"witness_hi_{k + 1}"] = float(res.witness.upper[k])
    row["candidates_evaluated"] = res.candidate_count
    if args.out:
        write_rows_csv([row], args.out)
    print(",".join(f"{k}={v!r}" for k, v in row.items()))
    return 0


def _cmd_study(args) -> int:
    config = load_config(args.config)
    rows = run_study(config, out=args.out, threads=args.threads)
    dest = args.out or config.out
    if dest:
        print(f"wrote {len(rows)} rows to {dest}")
    else:
        for row in rows:
            print(",".join(f"{k}={v!r}" for k, v in row.items()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lltlab",
        description="Exact lattice laws and interval-type local limit statistics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="emit a model pmf to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=None,
                   help="model size (default: last n_grid entry)")
    p.add_argument("--include-zeros", action="store_true")
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("llt", help="one-shot pointwise statistic")
    p.add_argument("--config", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_llt)

    p = sub.add_parser("sup", help="one-shot interval supremum")
    p.add_argument("--config", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_sup)

    p = sub.add_parser("study", help="run a full sweep, one CSV row per n")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(fn=_cmd_study)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigInvalid as exc:
        for path, msg in exc.violations:
            print(f"config error at {path or '<root>'}: {msg}", file=sys.stderr)
        return 2
    except LltLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
