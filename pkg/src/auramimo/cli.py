"""Command-line interface.

    auramimo run --config cfg.json [--seed N] [--out-dir DIR]
                 [--format binary|text] [--workers N]
    auramimo plan --config cfg.json [--seed N]
    auramimo metrics --tensor channel.bin

`run` executes the full pipeline and writes all outputs; `plan` prints
the sharing tables without synthesizing coefficients; `metrics`
recomputes correlation metrics from an existing tensor file. Errors exit
nonzero with "ErrorClass: message" on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import FORMATS, load_config
from .errors import ChannelModelError
from .grouping import share_table_for_segment
from .lsp import draw_lsp  # noqa: F401  (re-exported for scripting convenience)
from .metrics import correlation_metrics
from .pipeline import run, write_outputs
from .tensorio import read_tensor_binary


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auramimo",
        description="Geometry-based stochastic channel simulator for massive MIMO",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="full pipeline: clusters, channel tensor, metrics")
    _add_config_options(p_run)
    p_run.add_argument("--out-dir", default=None, help="override output directory")
    p_run.add_argument("--format", choices=FORMATS, default=None, help="tensor format")
    p_run.add_argument("--workers", type=int, default=None, help="synthesis workers")

    p_plan = sub.add_parser("plan", help="print sharing tables without synthesis")
    _add_config_options(p_plan)

    p_metrics = sub.add_parser("metrics", help="recompute metrics from a tensor file")
    p_metrics.add_argument("--tensor", required=True, help="binary tensor file")
    return parser


def _load(args) -> "RunConfig":
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out_dir", None) is not None:
        overrides["out_dir"] = args.out_dir
    if getattr(args, "format", None) is not None:
        overrides["out_format"] = args.format
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _cmd_run(args) -> int:
    config = _load(args)
    result = run(config)
    paths = write_outputs(result)
    for kind in sorted(paths):
        print(f"{kind}\t{paths[kind]}")
    return 0


def _cmd_plan(args) -> int:
    config = _load(args)
    print("segment\tmembers\tproportion\tscaled_proportion\tcount\tcluster_ids")
    id_base = 0
    for segment in config.layout.segments:
        table = share_table_for_segment(
            config.layout,
            segment.index,
            config.total_clusters_per_user,
            id_base=id_base,
        )
        if table.cluster_ids:
            id_base = max(table.cluster_ids) + 1
        for row in table.report_rows():
            print(
                f"{segment.index}\t{row['members']}\t{row['proportion']!r}\t"
                f"{row['scaled_proportion']!r}\t{row['count']}\t{row['cluster_ids']}"
            )
    return 0


def _cmd_metrics(args) -> int:
    tensor = read_tensor_binary(args.tensor)
    report = correlation_metrics(tensor)
    print("metric\tkey1\tkey2\tvalue")
    for row in report.report_rows():
        print("\t".join(str(x) for x in row))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "plan": _cmd_plan, "metrics": _cmd_metrics}
    try:
        return handlers[args.command](args)
    except ChannelModelError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
