#!/usr/bin/env python3
"""Run a complete local search cluster from corpus files, then keep serving.

Ingests the manifest's sources, splits the union into N shards, launches N
worker processes and the coordinator HTTP front-end, fires a couple of
smoke queries, and stays up until Ctrl-C — point the web client or curl at
the printed address.

Example:
    python scripts/make_corpus.py --out /tmp/corpus --formulas 5000
    python scripts/demo_local_fleet.py --manifest /tmp/corpus/manifest.json \
        --shards 3 --listen 127.0.0.1:8080
"""

from __future__ import annotations

import argparse
import json
import logging
import time
import urllib.parse
import urllib.request
from pathlib import Path

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mathsearch.ingest import build_union, load_corpus
from mathsearch.localfleet import LocalFleet


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--shards", type=int, default=3)
    parser.add_argument("--listen", default=None,
                        help="host:port for the coordinator (default: ephemeral)")
    parser.add_argument("--work-dir", default="/tmp/mathsearch-demo")
    parser.add_argument("--k", type=int, default=10)
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")

    manifest_path = Path(args.manifest)
    spec = json.loads(manifest_path.read_text())
    corpora = []
    for src in spec["sources"]:
        path = Path(src["path"])
        if not path.is_absolute():
            path = manifest_path.parent / path
        corpora.append(load_corpus(path, name=src.get("name")))
    union, manifest = build_union(corpora)
    print(manifest.to_json())

    with LocalFleet(union, args.shards, args.work_dir, k_default=args.k) as fleet:
        if args.listen:
            # rebind the HTTP front-end on the requested address
            from mathsearch.coordinator import CoordinatorHTTPServer
            from mathsearch.wire import parse_address

            fleet.http_server.shutdown()
            fleet.http_server.server_close()
            fleet.http_server = CoordinatorHTTPServer(
                parse_address(args.listen), fleet.coordinator
            )
            fleet.http_server.serve_background()
        address = fleet.http_address
        print(f"\ncoordinator: http://{address}")
        print(f"health:      http://{address}/health")

        sample = union[0].latex
        url = f"http://{address}/search?" + urllib.parse.urlencode({"q": sample, "k": 3})
        with urllib.request.urlopen(url) as resp:
            body = json.loads(resp.read())
        print(f"\nsmoke query {sample!r}:")
        for hit in body["hits"]:
            print(f"  id={hit['id']} score={hit['score']:.4f} {hit['latex']!r}")
        print(f"  search_time_s={body['search_time_s']:.6f}\n")
        print("serving until Ctrl-C ...")
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            print("shutting down")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
