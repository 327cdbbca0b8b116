"""Coordinator: scatter a query to every shard worker, merge the replies.

One persistent TCP connection is kept per worker; replies are matched to
in-flight requests by qid, so several client queries can be outstanding at
once.  The coordinator never returns a result before every shard has
replied or the per-query timeout has elapsed.  Reported search time runs
from query receipt to the moment the consolidated list is ready; client-side
transfer and response serialization are excluded.
"""

from __future__ import annotations

import heapq
import itertools
import json
import logging
import queue
import socket
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Iterable, Sequence
from urllib.parse import parse_qs, urlsplit

from . import wire
from .formulas import EmptyFormula, MalformedLatex, normalize
from .shard import RankedHit

log = logging.getLogger(__name__)

__all__ = [
    "AllShardsFailed",
    "WorkerUnavailable",
    "ConsolidatedResult",
    "WorkerClient",
    "Coordinator",
    "CoordinatorHTTPServer",
    "merge_topk",
    "coordinator_serve",
]


class AllShardsFailed(RuntimeError):
    """No shard produced a reply within the timeout."""


class WorkerUnavailable(RuntimeError):
    """A single worker could not be reached or did not reply in time."""


def merge_topk(lists: Iterable[Sequence[RankedHit]], k: int) -> list[RankedHit]:
    """Global top-k of per-shard lists, each sorted by (score desc, id asc).

    Equivalent to sorting the concatenation and truncating; shard ids are
    disjoint, so no deduplication is involved.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    merged = heapq.merge(*lists, key=lambda h: (-h.score, h.formula_id))
    return list(itertools.islice(merged, k))


@dataclass(frozen=True)
class ConsolidatedResult:
    query_id: int
    hits: list[RankedHit]
    search_time_s: float
    shards_responded: int
    n_shards: int

    @property
    def partial(self) -> bool:
        return self.shards_responded < self.n_shards


_FAILED = object()  # sentinel queued to waiters when a connection dies


class WorkerClient:
    """Client side of one worker connection, with reconnect on demand."""

    def __init__(self, address: str, shard_id: int, connect_timeout: float = 2.0):
        self.address = address
        self.shard_id = shard_id
        self.status = "unknown"
        self._connect_timeout = connect_timeout
        self._sock = None
        self._lock = threading.Lock()  # socket lifecycle and writes
        self._pending_lock = threading.Lock()
        self._pending: dict[int, queue.SimpleQueue] = {}
        self._pong: queue.SimpleQueue = queue.SimpleQueue()
        self._ping_lock = threading.Lock()

    def _connect_locked(self) -> None:
        if self._sock is not None:
            return
        host, port = wire.parse_address(self.address)
        sock = socket.create_connection((host, port), timeout=self._connect_timeout)
        sock.settimeout(None)
        self._sock = sock
        threading.Thread(target=self._read_loop, args=(sock,), daemon=True).start()

    def _read_loop(self, sock) -> None:
        reader = wire.LineReader(sock)
        try:
            while True:
                msg = reader.read_message()
                if msg is None:
                    break
                self._route(msg)
        except (OSError, ValueError):
            pass
        self._on_disconnect(sock)

    def _route(self, msg: dict) -> None:
        if msg.get("type") == "pong":
            self._pong.put(msg)
            return
        qid = msg.get("qid")
        with self._pending_lock:
            waiter = self._pending.get(qid)
        if waiter is not None:
            waiter.put(msg)
        else:
            log.debug("worker %s: dropping reply for unknown qid %r", self.address, qid)

    def _on_disconnect(self, sock) -> None:
        with self._lock:
            if self._sock is sock:
                self._sock = None
        try:
            sock.close()
        except OSError:
            pass
        self.status = "unreachable"
        with self._pending_lock:
            waiters = list(self._pending.values())
            self._pending.clear()
        for w in waiters:
            w.put(_FAILED)
        self._pong.put(_FAILED)

    def _send(self, payload: dict) -> None:
        with self._lock:
            try:
                self._connect_locked()
                wire.send_message(self._sock, payload)
            except OSError as e:
                self.status = "unreachable"
                raise WorkerUnavailable(f"worker {self.address}: {e}") from e

    def _request(self, payload: dict, qid: int, deadline: float) -> dict:
        waiter: queue.SimpleQueue = queue.SimpleQueue()
        with self._pending_lock:
            self._pending[qid] = waiter
        try:
            self._send(payload)
            remaining = deadline - time.monotonic()
            try:
                msg = waiter.get(timeout=max(0.0, remaining))
            except queue.Empty:
                raise WorkerUnavailable(f"worker {self.address}: timed out") from None
            if msg is _FAILED:
                raise WorkerUnavailable(f"worker {self.address}: connection lost")
            self.status = "healthy"
            return msg
        finally:
            with self._pending_lock:
                self._pending.pop(qid, None)

    def query(self, qid: int, tokens: Sequence[str], k: int, deadline: float) -> list[RankedHit]:
        msg = self._request(
            {"type": "query", "qid": qid, "tokens": list(tokens), "k": k}, qid, deadline
        )
        if msg.get("type") != "result":
            raise WorkerUnavailable(
                f"worker {self.address}: {msg.get('reason', 'bad reply')}"
            )
        return [RankedHit(formula_id=h["id"], score=h["score"]) for h in msg["hits"]]

    def fetch(self, qid: int, ids: Sequence[int], deadline: float) -> dict[int, dict]:
        msg = self._request(
            {"type": "fetch", "qid": qid, "ids": list(ids)}, qid, deadline
        )
        if msg.get("type") != "formulas":
            raise WorkerUnavailable(
                f"worker {self.address}: {msg.get('reason', 'bad reply')}"
            )
        return {f["id"]: f for f in msg["formulas"]}

    def ping(self, timeout: float = 2.0) -> dict:
        """Health probe; returns the pong message."""
        with self._ping_lock:
            while True:  # drop pongs left over from a timed-out probe
                try:
                    self._pong.get_nowait()
                except queue.Empty:
                    break
            self._send({"type": "ping"})
            try:
                msg = self._pong.get(timeout=timeout)
            except queue.Empty:
                raise WorkerUnavailable(f"worker {self.address}: ping timed out") from None
        if msg is _FAILED:
            raise WorkerUnavailable(f"worker {self.address}: connection lost")
        self.status = "healthy"
        return msg

    def close(self) -> None:
        with self._lock:
            sock, self._sock = self._sock, None
        if sock is not None:
            try:
                sock.close()
            except OSError:
                pass


class Coordinator:
    """Normalizes queries, fans them out to all shards, merges the replies."""

    def __init__(self, workers: Sequence[WorkerClient], timeout: float = 5.0, k_default: int = 10):
        shard_ids = sorted(w.shard_id for w in workers)
        if shard_ids != list(range(len(workers))):
            raise ValueError(
                f"workers must cover shards 0..N-1 exactly, got {shard_ids}"
            )
        self.workers = sorted(workers, key=lambda w: w.shard_id)
        self.timeout = timeout
        self.k_default = k_default
        self._qid_counter = itertools.count(1)

    @property
    def n_shards(self) -> int:
        return len(self.workers)

    def search(self, latex: str, k: int | None = None, t0: float | None = None):
        """Scatter-gather one query.

        Returns (ConsolidatedResult, origins) where origins maps each hit's
        formula id to the shard that produced it.  Raises MalformedLatex /
        EmptyFormula on a bad query and AllShardsFailed when no shard replies.
        """
        if t0 is None:
            t0 = time.perf_counter()
        k = self.k_default if k is None else k
        if k < 1:
            raise ValueError("k must be >= 1")
        tokens = normalize(latex)
        qid = next(self._qid_counter)
        deadline = time.monotonic() + self.timeout
        replies: queue.SimpleQueue = queue.SimpleQueue()

        def ask(worker: WorkerClient) -> None:
            try:
                replies.put((worker.shard_id, worker.query(qid, tokens, k, deadline)))
            except WorkerUnavailable as e:
                log.warning("qid %d: %s", qid, e)
                replies.put((worker.shard_id, None))

        for w in self.workers:
            threading.Thread(target=ask, args=(w,), daemon=True).start()

        shard_hits: list[tuple[int, list[RankedHit]]] = []
        grace = 0.25
        for _ in range(self.n_shards):
            remaining = deadline - time.monotonic() + grace
            try:
                shard_id, hits = replies.get(timeout=max(0.0, remaining))
            except queue.Empty:
                break
            if hits is not None:
                shard_hits.append((shard_id, hits))

        if not shard_hits:
            raise AllShardsFailed(f"no shard replied to query {qid}")
        merged = merge_topk([hits for _, hits in shard_hits], k)
        search_time = time.perf_counter() - t0
        result = ConsolidatedResult(
            query_id=qid,
            hits=merged,
            search_time_s=search_time,
            shards_responded=len(shard_hits),
            n_shards=self.n_shards,
        )
        origins = {
            h.formula_id: shard_id for shard_id, hits in shard_hits for h in hits
        }
        log.info(
            "query qid=%d k=%d shards=%d/%d time=%.6fs hits=%d",
            qid,
            k,
            result.shards_responded,
            result.n_shards,
            result.search_time_s,
            len(merged),
        )
        return result, origins

    def lookup(self, hits: Sequence[RankedHit], origins: dict[int, int]) -> dict[int, dict]:
        """Fetch latex/source for merged hits from their home shards."""
        by_shard: dict[int, list[int]] = {}
        for h in hits:
            shard = origins.get(h.formula_id)
            if shard is not None:
                by_shard.setdefault(shard, []).append(h.formula_id)
        meta: dict[int, dict] = {}
        deadline = time.monotonic() + self.timeout
        for shard_id, ids in by_shard.items():
            qid = next(self._qid_counter)
            try:
                meta.update(self.workers[shard_id].fetch(qid, ids, deadline))
            except WorkerUnavailable as e:
                log.warning("metadata fetch from shard %d failed: %s", shard_id, e)
        return meta

    def health(self) -> dict:
        workers = []
        ok = 0
        for w in self.workers:
            entry = {"shard": w.shard_id, "address": w.address}
            try:
                pong = w.ping(timeout=min(self.timeout, 2.0))
                entry["status"] = "healthy"
                entry["formula_count"] = pong.get("count")
                ok += 1
            except WorkerUnavailable:
                entry["status"] = "unreachable"
                entry["formula_count"] = None
            workers.append(entry)
        return {
            "status": "ok" if ok == self.n_shards else "degraded",
            "shards": self.n_shards,
            "workers": workers,
        }

    def close(self) -> None:
        for w in self.workers:
            w.close()


class _HTTPHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("http: " + fmt, *args)

    def _reply(self, code: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        # The static-file web client is served from a different origin.
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        coordinator: Coordinator = self.server.coordinator  # type: ignore[attr-defined]
        url = urlsplit(self.path)
        if url.path == "/health":
            self._reply(200, coordinator.health())
            return
        if url.path != "/search":
            self._reply(404, {"error": "NotFound"})
            return
        params = parse_qs(url.query)
        latex = params.get("q", [None])[0]
        t0 = time.perf_counter()  # query received and decoded
        if latex is None:
            self._reply(400, {"error": "BadRequest", "detail": "missing q parameter"})
            return
        try:
            k = int(params["k"][0]) if "k" in params else None
            if k is not None and k < 1:
                raise ValueError("k must be >= 1")
        except ValueError as e:
            self._reply(400, {"error": "BadRequest", "detail": str(e)})
            return
        try:
            result, origins = coordinator.search(latex, k, t0=t0)
        except MalformedLatex as e:
            self._reply(400, {"error": "MalformedLatex", "detail": str(e)})
            return
        except EmptyFormula as e:
            self._reply(400, {"error": "EmptyFormula", "detail": str(e)})
            return
        except AllShardsFailed as e:
            self._reply(503, {"error": "AllShardsFailed", "detail": str(e)})
            return
        meta = coordinator.lookup(result.hits, origins)
        hits = [
            {
                "id": h.formula_id,
                "score": h.score,
                "latex": meta.get(h.formula_id, {}).get("latex"),
                "source": meta.get(h.formula_id, {}).get("source"),
            }
            for h in result.hits
        ]
        self._reply(
            200,
            {
                "query": latex,
                "k": k if k is not None else coordinator.k_default,
                "hits": hits,
                "search_time_s": result.search_time_s,
                "partial": result.partial,
            },
        )


class CoordinatorHTTPServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, listen: tuple[str, int], coordinator: Coordinator):
        self.coordinator = coordinator
        super().__init__(listen, _HTTPHandler)

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def serve_background(self) -> threading.Thread:
        t = threading.Thread(target=self.serve_forever, daemon=True)
        t.start()
        return t


def build_workers(spec: str) -> list[WorkerClient]:
    """Parse a host:port:shard,... worker list."""
    workers = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        address, _, shard = part.rpartition(":")
        workers.append(WorkerClient(address, int(shard)))
    return workers


def coordinator_serve(
    listen_address: str,
    workers: Sequence[WorkerClient],
    timeout: float = 5.0,
    k_default: int = 10,
) -> None:
    """Run the HTTP front-end until terminated (CLI entry point)."""
    coordinator = Coordinator(workers, timeout=timeout, k_default=k_default)
    host, port = wire.parse_address(listen_address)
    server = CoordinatorHTTPServer((host, port), coordinator)
    log.info(
        "coordinator serving %d shards on %s (timeout %.3fs, default k %d)",
        coordinator.n_shards,
        server.address,
        timeout,
        k_default,
    )
    try:
        server.serve_forever()
    finally:
        server.server_close()
        coordinator.close()
