#!/usr/bin/env python3
"""Worker-count scaling experiment: mean pass time for each fleet size.

Builds one synthetic corpus, then for every requested worker count runs R
sequential passes over the same query set and reports mean pass time with
a 99% confidence half-width.  Writes CSV/plot data compatible with
`mathsearch bench run --out`.

Pass times scale down with worker count only when the workers get real CPU
parallelism; on a single-core host the ratios hover near 1.

Example:
    python scripts/scaling_experiment.py --formulas 100000 --workers 1 4 \
        --passes 11 --queries 25 --out /tmp/scaling
"""

from __future__ import annotations

import argparse
from pathlib import Path

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import logging

from mathsearch.bench import FleetDescriptor, emit_report, run_benchmark
from mathsearch.formulas import make_formula
from mathsearch.localfleet import LocalFleet
from mathsearch.synth import make_query_set, random_corpus_records


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--formulas", type=int, default=100_000)
    parser.add_argument("--workers", type=int, nargs="+", default=[1, 4])
    parser.add_argument("--passes", type=int, default=11)
    parser.add_argument("--queries", type=int, default=25)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--density", type=float, default=0.82)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--work-dir", default="/tmp/mathsearch-scaling")
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    logging.basicConfig(level=logging.WARNING)

    print(f"generating {args.formulas} formulas (density {args.density}) ...")
    records = random_corpus_records(
        args.formulas, seed=args.seed, density=args.density, min_len=8, max_len=28
    )
    union = [make_formula(r["id"], r["source"], r["latex"]) for r in records]
    queries = make_query_set(records, args.queries, seed=args.seed + 7)

    reports = []
    for n in args.workers:
        print(f"fleet of {n} worker(s): building shards and processes ...")
        with LocalFleet(union, n, args.work_dir, timeout=120.0) as fleet:
            report = run_benchmark(
                queries,
                fleet.http_address,
                k=args.k,
                passes=args.passes,
                confidence=0.99,
                fleet=FleetDescriptor(name=f"local-{n}", machines=n),
                timeout=600.0,
            )
        reports.append(report)
        print(
            f"  mean pass {report.mean_s:.3f}s "
            f"+/- {report.ci99_halfwidth_s:.3f}s (99% CI, {report.passes} passes)"
        )

    base = reports[0]
    for report in reports[1:]:
        ratio = report.mean_s / base.mean_s
        print(f"ratio {report.fleet.name}/{base.fleet.name}: {ratio:.3f}")
    if args.out:
        for path in emit_report(reports, args.out):
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
