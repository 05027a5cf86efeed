"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 partial sweep (the errors sidecar has entries).
"""

import argparse
import logging
import sys

from reinfanneal import __version__
from reinfanneal.errors import NumericalError
from reinfanneal.harness.config import ConfigError, load_config, with_overrides
from reinfanneal.harness.presets import FIGURE_IDS, SCALES, reproduce
from reinfanneal.harness.records import SchemaError
from reinfanneal.harness.summarize import SUMMARY_FIELDS, summarize, write_summary
from reinfanneal.harness.sweep import run_sweep, write_outputs

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_options(p):
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--seed", type=int, help="master seed (overrides master_seed)")
    p.add_argument("--threads", type=int, help="worker processes (default: $REINFANNEAL_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reinfanneal", description="Reinforced quantum annealing teacher/student sweeps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (("teacher", "run the teacher model over a sweep config"),
                            ("train", "train and evaluate the student model"),
                            ("sweep", "run a sweep with the model named in the config")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        _add_run_options(p)
    p = sub.add_parser("reproduce", help="run a figure preset")
    p.add_argument("figure_id", help=f"one of: {', '.join(FIGURE_IDS)}")
    p.add_argument("--scale", choices=SCALES, default="paper")
    _add_run_options(p)
    p = sub.add_parser("summarize", help="aggregate a results CSV over realizations")
    p.add_argument("csv")
    p.add_argument("--out", help="write the summary CSV here instead of stdout")
    return parser


def _run_config(args) -> int:
    spec = load_config(args.config)
    forced = {"teacher": "teacher", "train": "student"}.get(args.command)
    if forced is not None and spec.model != forced:
        if spec.model == "both" and forced == "student":
            forced = "both"
        spec = with_overrides(spec, model=forced)
    spec = with_overrides(spec, master_seed=args.seed, out_dir=args.out)
    result = run_sweep(spec, threads=args.threads)
    path = write_outputs(spec, result)
    print(f"wrote {path} ({len(result.rows)} rows)")
    if result.partial:
        print(f"{len(result.failures)} point(s) failed; see {path.with_suffix('.errors.txt')}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _run_reproduce(args) -> int:
    if args.figure_id not in FIGURE_IDS:
        print(f"unknown figure id {args.figure_id!r}; valid ids: {', '.join(FIGURE_IDS)}", file=sys.stderr)
        return EXIT_USAGE
    outputs = reproduce(args.figure_id, args.scale, out_dir=args.out, threads=args.threads,
                        master_seed=args.seed)
    return EXIT_PARTIAL if any(res.partial for _, res in outputs) else EXIT_OK


def _run_summarize(args) -> int:
    records = summarize(args.csv)
    if args.out:
        write_summary(args.out, records)
    else:
        print(",".join(SUMMARY_FIELDS))
        for rec in records:
            print(",".join("" if rec[f] is None else str(rec[f]) for f in SUMMARY_FIELDS))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"reproduce": _run_reproduce, "summarize": _run_summarize}
    try:
        return handlers.get(args.command, _run_config)(args)
    except (ConfigError, SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
