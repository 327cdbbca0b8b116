"""Newline-delimited JSON framing for the worker wire protocol.

One UTF-8 JSON object per line, over a plain TCP stream.  Message types:

    -> {"type": "query", "qid": <u64>, "tokens": [...], "k": <int>}
    <- {"type": "result", "qid": <u64>, "shard": <int>, "hits": [{"id", "score"}...]}
    -> {"type": "ping"}
    <- {"type": "pong", "shard": <int>, "count": <u64>}
    -> {"type": "fetch", "qid": <u64>, "ids": [<u64>...]}
    <- {"type": "formulas", "qid": <u64>, "shard": <int>, "formulas": [{"id", "latex", "source"}...]}
    <- {"type": "error", "qid": <u64 or null>, "reason": <string>}
"""

from __future__ import annotations

import json
import socket
from typing import Any

MAX_LINE_BYTES = 16 * 1024 * 1024


def encode_message(payload: dict[str, Any]) -> bytes:
    return (json.dumps(payload, separators=(",", ":")) + "\n").encode("utf-8")


def send_message(sock: socket.socket, payload: dict[str, Any]) -> None:
    sock.sendall(encode_message(payload))


class LineReader:
    """Buffers a socket into newline-delimited messages."""

    def __init__(self, sock: socket.socket):
        self._sock = sock
        self._buf = bytearray()

    def read_line(self) -> bytes | None:
        """Next raw line without its newline, or None on EOF."""
        while True:
            nl = self._buf.find(b"\n")
            if nl >= 0:
                line = bytes(self._buf[:nl])
                del self._buf[: nl + 1]
                return line
            if len(self._buf) > MAX_LINE_BYTES:
                raise ConnectionError("peer sent an oversized line")
            chunk = self._sock.recv(65536)
            if not chunk:
                return None
            self._buf.extend(chunk)

    def read_message(self) -> dict[str, Any] | None:
        """Next decoded message, or None on EOF.  Raises ValueError on bad JSON."""
        line = self.read_line()
        if line is None:
            return None
        msg = json.loads(line.decode("utf-8"))
        if not isinstance(msg, dict):
            raise ValueError("message is not a JSON object")
        return msg


def parse_address(address: str) -> tuple[str, int]:
    """Split a host:port string."""
    host, _, port = address.rpartition(":")
    if not host or not port:
        raise ValueError(f"bad address {address!r}, expected host:port")
    return host, int(port)
