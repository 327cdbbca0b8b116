#!/usr/bin/env python3
"""Generate synthetic corpus files, an ingest manifest, and a query set.

Example:
    python scripts/make_corpus.py --out /tmp/corpus --formulas 10000 \
        --sources wikipedia mathworld --overlap 0.1 --queries 200
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mathsearch.synth import make_query_set, random_corpus_records, write_corpus_file


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--formulas", type=int, default=10_000, help="per source")
    parser.add_argument("--sources", nargs="+", default=["alpha", "beta"])
    parser.add_argument("--overlap", type=float, default=0.1,
                        help="fraction of each later source copied from the first")
    parser.add_argument("--queries", type=int, default=120)
    parser.add_argument("--density", type=float, default=0.4,
                        help="0..1; higher = smaller vocabulary, denser gram overlap")
    parser.add_argument("--seed", type=int, default=2016)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    first_records = None
    sources = []
    for i, name in enumerate(args.sources):
        records = random_corpus_records(
            args.formulas,
            seed=args.seed + i,
            source=name,
            id_start=i * 10_000_000,
            density=args.density,
        )
        if i == 0:
            first_records = records
        elif args.overlap > 0:
            n_overlap = int(args.overlap * args.formulas)
            planted = rng.sample(first_records, n_overlap)
            for j, donor in enumerate(planted):
                records[j] = {**records[j], "latex": donor["latex"]}
        path = write_corpus_file(out / f"{name}.jsonl", records)
        sources.append({"name": name, "path": path.name})
        print(f"wrote {path} ({len(records)} records)")

    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({"sources": sources}, indent=2) + "\n")
    print(f"wrote {manifest}")

    queries = make_query_set(first_records, args.queries, seed=args.seed + 99)
    qpath = out / "queries.txt"
    qpath.write_text("\n".join(queries) + "\n")
    print(f"wrote {qpath} ({len(queries)} queries)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
