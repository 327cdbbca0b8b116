"""Worker service: hold one shard's index in memory, answer top-k queries.

The worker loads a shard file fully into RAM at startup, then serves the
newline-delimited JSON protocol from `wire`.  The index is immutable after
the build, so any number of connections can query it concurrently.
"""

from __future__ import annotations

import json
import logging
import socketserver
import threading
from pathlib import Path

from . import wire
from .formulas import gram_set
from .ingest import CorruptShardFile, read_shard_file
from .shard import DuplicateId, ShardIndex, WrongShard, build_index, query_topk

log = logging.getLogger(__name__)

__all__ = ["BindFailure", "WorkerServer", "load_shard_index", "worker_serve"]


class BindFailure(OSError):
    """Could not bind the listen address."""


def load_shard_index(shard_file: str | Path) -> ShardIndex:
    """Read a shard file and build its in-memory index.

    Raises ingest.CorruptShardFile on any validation failure, including a
    formula stored in the wrong shard.
    """
    formulas, shard_id, n_shards = read_shard_file(shard_file)
    try:
        return build_index(formulas, shard_id, n_shards)
    except (WrongShard, DuplicateId) as e:
        raise CorruptShardFile(f"{shard_file}: {e}") from e


def _handle_message(index: ShardIndex, msg: dict) -> dict:
    qid = msg.get("qid")
    mtype = msg.get("type")
    if mtype == "ping":
        return {"type": "pong", "shard": index.shard_id, "count": len(index)}
    if mtype == "query":
        tokens = msg.get("tokens")
        k = msg.get("k")
        if (
            not isinstance(tokens, list)
            or not tokens
            or not all(isinstance(t, str) for t in tokens)
        ):
            return {"type": "error", "qid": qid, "reason": "bad_query"}
        if not isinstance(k, int) or k < 1:
            return {"type": "error", "qid": qid, "reason": "bad_query"}
        hits = query_topk(index, gram_set(tuple(tokens)), k)
        return {
            "type": "result",
            "qid": qid,
            "shard": index.shard_id,
            "hits": [{"id": h.formula_id, "score": h.score} for h in hits],
        }
    if mtype == "fetch":
        ids = msg.get("ids")
        if not isinstance(ids, list) or not all(isinstance(i, int) for i in ids):
            return {"type": "error", "qid": qid, "reason": "bad_fetch"}
        found = []
        for fid in ids:
            f = index.formulas.get(fid)
            if f is not None:
                found.append({"id": f.id, "latex": f.latex, "source": f.source})
        return {"type": "formulas", "qid": qid, "shard": index.shard_id, "formulas": found}
    return {"type": "error", "qid": qid, "reason": "unknown_type"}


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        index: ShardIndex = self.server.index  # type: ignore[attr-defined]
        reader = wire.LineReader(self.connection)
        while True:
            try:
                line = reader.read_line()
            except (ConnectionError, OSError):
                return
            if line is None:
                return
            try:
                msg = json.loads(line.decode("utf-8"))
                if not isinstance(msg, dict):
                    raise ValueError("not an object")
            except (ValueError, UnicodeDecodeError):
                reply = {"type": "error", "qid": None, "reason": "parse"}
            else:
                try:
                    reply = _handle_message(index, msg)
                except Exception as e:  # keep the connection usable
                    log.exception("query failed")
                    reply = {"type": "error", "qid": msg.get("qid"), "reason": str(e)}
            try:
                wire.send_message(self.connection, reply)
            except OSError:
                return


class WorkerServer(socketserver.ThreadingTCPServer):
    """TCP server bound to one shard index."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, listen: tuple[str, int], index: ShardIndex):
        self.index = index
        try:
            super().__init__(listen, _Handler)
        except OSError as e:
            raise BindFailure(f"cannot bind {listen[0]}:{listen[1]}: {e}") from e

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def serve_background(self) -> threading.Thread:
        t = threading.Thread(target=self.serve_forever, daemon=True)
        t.start()
        return t


def worker_serve(shard_file: str | Path, listen_address: str) -> None:
    """Load the shard and serve until terminated (CLI entry point)."""
    index = load_shard_index(shard_file)
    host, port = wire.parse_address(listen_address)
    server = WorkerServer((host, port), index)
    log.info(
        "worker shard %d/%d serving %d formulas on %s",
        index.shard_id,
        index.n_shards,
        len(index),
        server.address,
    )
    try:
        server.serve_forever()
    finally:
        server.server_close()
