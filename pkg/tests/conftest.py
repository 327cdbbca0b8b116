"""Shared fixtures: in-thread clusters, a programmable stub coordinator."""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

import pytest

from mathsearch.coordinator import Coordinator, CoordinatorHTTPServer, WorkerClient
from mathsearch.formulas import make_formula
from mathsearch.shard import build_index
from mathsearch.worker import WorkerServer


def formulas_from_latex(latexes, source="test", id_start=0):
    return [make_formula(id_start + i, source, s) for i, s in enumerate(latexes)]


class ThreadCluster:
    """Workers and coordinator all in the test process; fast to start."""

    def __init__(self, formulas, n_shards, timeout=5.0, k_default=10):
        from mathsearch.shard import assign_shard

        buckets = [[] for _ in range(n_shards)]
        for f in formulas:
            buckets[assign_shard(f.canonical_key, n_shards)].append(f)
        self.workers = []
        clients = []
        for shard_id, bucket in enumerate(buckets):
            index = build_index(bucket, shard_id, n_shards)
            server = WorkerServer(("127.0.0.1", 0), index)
            server.serve_background()
            self.workers.append(server)
            clients.append(WorkerClient(server.address, shard_id))
        self.coordinator = Coordinator(clients, timeout=timeout, k_default=k_default)
        self.http = CoordinatorHTTPServer(("127.0.0.1", 0), self.coordinator)
        self.http.serve_background()

    @property
    def http_address(self):
        return self.http.address

    def stop_worker(self, shard_id):
        self.workers[shard_id].shutdown()
        self.workers[shard_id].server_close()

    def close(self):
        self.http.shutdown()
        self.http.server_close()
        self.coordinator.close()
        for w in self.workers:
            try:
                w.shutdown()
                w.server_close()
            except Exception:
                pass


@pytest.fixture
def thread_cluster_factory():
    clusters = []

    def make(formulas, n_shards, **kw):
        cluster = ThreadCluster(formulas, n_shards, **kw)
        clusters.append(cluster)
        return cluster

    yield make
    for c in clusters:
        c.close()


class StubCoordinator:
    """Scripted /search endpoint for harness tests.

    Serves the i-th request of each pass with `latencies[i % len]` as its
    search_time_s and logs (enter, exit, query) wall-clock intervals so a
    test can prove requests never overlapped.
    """

    def __init__(self, latencies, partial_at=None, fail_at=None, sleep_s=0.0):
        self.latencies = list(latencies)
        self.partial_at = partial_at  # request index that reports partial
        self.fail_at = fail_at  # request index that returns HTTP 500
        self.sleep_s = sleep_s
        self.log = []
        self._count = 0
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, *a):
                pass

            def do_GET(self):
                url = urlsplit(self.path)
                if url.path == "/health":
                    body = json.dumps({"status": "ok"}).encode()
                    self.send_response(200)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
                enter = time.monotonic()
                with stub._lock:
                    i = stub._count
                    stub._count += 1
                if stub.sleep_s:
                    time.sleep(stub.sleep_s)
                q = parse_qs(url.query).get("q", [""])[0]
                if stub.fail_at is not None and i == stub.fail_at:
                    payload, code = {"error": "boom"}, 500
                else:
                    payload = {
                        "query": q,
                        "k": 10,
                        "hits": [],
                        "search_time_s": stub.latencies[i % len(stub.latencies)],
                        "partial": stub.partial_at is not None and i == stub.partial_at,
                    }
                    code = 200
                body = json.dumps(payload).encode()
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                stub.log.append((enter, time.monotonic(), q, i))

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.server.daemon_threads = True
        threading.Thread(target=self.server.serve_forever, daemon=True).start()

    @property
    def address(self):
        host, port = self.server.server_address[:2]
        return f"{host}:{port}"

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_coordinator_factory():
    stubs = []

    def make(latencies, **kw):
        stub = StubCoordinator(latencies, **kw)
        stubs.append(stub)
        return stub

    yield make
    for s in stubs:
        s.close()
