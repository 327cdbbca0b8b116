"""Command line entry points: ingest, worker, coordinator, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from decimal import Decimal
from pathlib import Path

from . import bench as bench_mod
from . import coordinator as coord_mod
from . import fleet as fleet_mod
from . import ingest as ingest_mod
from . import worker as worker_mod


def _cmd_ingest(args) -> int:
    manifest_path = Path(args.manifest)
    spec = json.loads(manifest_path.read_text(encoding="utf-8"))
    corpora = []
    for src in spec["sources"]:
        path = Path(src["path"])
        if not path.is_absolute():
            path = manifest_path.parent / path
        corpora.append(ingest_mod.load_corpus(path, name=src.get("name")))
    union, manifest = ingest_mod.build_union(corpora)
    out_dir = Path(args.out)
    ingest_mod.split_shards(union, args.shards, out_dir)
    (out_dir / "manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")
    print(manifest.to_json())
    return 0


def _cmd_worker(args) -> int:
    try:
        worker_mod.worker_serve(args.shard_file, args.listen)
    except ingest_mod.CorruptShardFile as e:
        print(f"refusing to start: {e}", file=sys.stderr)
        return 2
    except worker_mod.BindFailure as e:
        print(f"refusing to start: {e}", file=sys.stderr)
        return 2
    return 0


def _cmd_coordinator(args) -> int:
    workers = coord_mod.build_workers(args.workers)
    try:
        coord_mod.coordinator_serve(
            args.listen,
            workers,
            timeout=args.timeout_ms / 1000.0,
            k_default=args.k,
        )
    except ValueError as e:
        print(f"refusing to start: {e}", file=sys.stderr)
        return 2
    return 0


def _cmd_bench_enumerate(args) -> int:
    configs = fleet_mod.load_price_table(args.prices)
    budget = fleet_mod.BudgetSpec(
        budget_per_hour=Decimal(args.budget), core_cap=args.core_cap
    )
    fleets = fleet_mod.enumerate_price_table(configs, budget)
    print("name,cores,group,ssd,price_per_hour,machines")
    for f in fleets:
        c = f.config
        print(f"{c.name},{c.cores},{c.group},{str(c.ssd).lower()},{c.price_per_hour},{f.machines}")
    return 0


def _cmd_bench_run(args) -> int:
    queries = bench_mod.load_query_set(args.queries)
    fleet = bench_mod.FleetDescriptor(
        name=args.fleet_name, group=args.group, ssd=args.ssd, machines=args.machines
    )
    try:
        report = bench_mod.run_benchmark(
            queries,
            args.coordinator,
            k=args.k,
            passes=args.passes,
            confidence=args.confidence,
            fleet=fleet,
        )
    except bench_mod.BenchmarkAborted as e:
        print(f"benchmark aborted: {e}", file=sys.stderr)
        return 1
    if args.out:
        bench_mod.emit_report([report], args.out)
    print(
        json.dumps(
            {
                "config": report.fleet.name,
                "machines": report.fleet.machines,
                "passes": report.passes,
                "mean_s": report.mean_s,
                "ci99_halfwidth_s": report.ci99_halfwidth_s,
                "pass_times_s": report.pass_times_s,
            },
            indent=2,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mathsearch")
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build the union database and shard files")
    p.add_argument("--manifest", required=True, help="JSON file listing corpus sources")
    p.add_argument("--shards", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("worker", help="serve one shard")
    p.add_argument("--shard-file", required=True)
    p.add_argument("--listen", required=True, help="host:port")
    p.set_defaults(func=_cmd_worker)

    p = sub.add_parser("coordinator", help="serve the search front-end")
    p.add_argument("--workers", required=True, help="host:port:shard,host:port:shard,...")
    p.add_argument("--listen", required=True, help="host:port")
    p.add_argument("--timeout-ms", type=int, default=5000)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=_cmd_coordinator)

    p = sub.add_parser("bench", help="fleet enumeration and timing runs")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)

    pe = bench_sub.add_parser("enumerate", help="apply the budget/core-cap fleet rule")
    pe.add_argument("--prices", required=True, help="price table CSV")
    pe.add_argument("--budget", required=True, help="budget per hour (decimal)")
    pe.add_argument("--core-cap", type=int, default=16)
    pe.set_defaults(func=_cmd_bench_enumerate)

    pr = bench_sub.add_parser("run", help="timed passes against a coordinator")
    pr.add_argument("--queries", required=True, help="one LaTeX formula per line")
    pr.add_argument("--coordinator", required=True, help="host:port")
    pr.add_argument("--k", type=int, default=10)
    pr.add_argument("--passes", type=int, default=41)
    pr.add_argument("--confidence", type=float, default=0.99)
    pr.add_argument("--out", default=None, help="directory for CSV and plot data")
    pr.add_argument("--fleet-name", default="local")
    pr.add_argument("--group", default="local")
    pr.add_argument("--ssd", action="store_true")
    pr.add_argument("--machines", type=int, default=1)
    pr.set_defaults(func=_cmd_bench_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
