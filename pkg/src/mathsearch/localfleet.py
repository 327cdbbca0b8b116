"""Spin up a local fleet: N worker processes plus an in-process coordinator.

Used by the experiment scripts and the end-to-end tests.  Workers run as
separate Python processes so that shard scoring actually runs outside the
caller's interpreter; the coordinator HTTP server runs on a background
thread in the calling process.
"""

from __future__ import annotations

import logging
import socket
import subprocess
import sys
import time
from pathlib import Path
from typing import Sequence

from .coordinator import Coordinator, CoordinatorHTTPServer, WorkerClient
from .ingest import split_shards
from .formulas import Formula

log = logging.getLogger(__name__)

__all__ = ["LocalFleet", "free_port", "wait_for_worker"]


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def wait_for_worker(address: str, shard_id: int, timeout: float = 60.0) -> None:
    """Block until the worker at address answers a ping."""
    deadline = time.monotonic() + timeout
    last_error = None
    while time.monotonic() < deadline:
        client = WorkerClient(address, shard_id)
        try:
            client.ping(timeout=2.0)
            client.close()
            return
        except Exception as e:
            last_error = e
            client.close()
            time.sleep(0.1)
    raise TimeoutError(f"worker {address} not ready after {timeout}s: {last_error}")


class LocalFleet:
    """Context manager owning worker processes and one coordinator."""

    def __init__(
        self,
        union: Sequence[Formula],
        n_shards: int,
        work_dir: str | Path,
        timeout: float = 30.0,
        k_default: int = 10,
    ):
        self.union = union
        self.n_shards = n_shards
        self.work_dir = Path(work_dir)
        self.timeout = timeout
        self.k_default = k_default
        self.processes: list[subprocess.Popen] = []
        self.worker_addresses: list[str] = []
        self.http_server: CoordinatorHTTPServer | None = None
        self.coordinator: Coordinator | None = None

    @property
    def http_address(self) -> str:
        assert self.http_server is not None
        return self.http_server.address

    def __enter__(self) -> "LocalFleet":
        shard_dir = self.work_dir / f"shards_{self.n_shards}"
        paths = split_shards(self.union, self.n_shards, shard_dir)
        for shard_id, path in enumerate(paths):
            port = free_port()
            address = f"127.0.0.1:{port}"
            proc = subprocess.Popen(
                [
                    sys.executable,
                    "-m",
                    "mathsearch.cli",
                    "worker",
                    "--shard-file",
                    str(path),
                    "--listen",
                    address,
                ],
                stdout=subprocess.DEVNULL,
                stderr=subprocess.DEVNULL,
            )
            self.processes.append(proc)
            self.worker_addresses.append(address)
        for shard_id, address in enumerate(self.worker_addresses):
            wait_for_worker(address, shard_id, timeout=120.0)
        clients = [
            WorkerClient(addr, shard_id)
            for shard_id, addr in enumerate(self.worker_addresses)
        ]
        self.coordinator = Coordinator(clients, timeout=self.timeout, k_default=self.k_default)
        self.http_server = CoordinatorHTTPServer(("127.0.0.1", 0), self.coordinator)
        self.http_server.serve_background()
        return self

    def kill_worker(self, shard_id: int) -> None:
        proc = self.processes[shard_id]
        proc.terminate()
        proc.wait(timeout=10)

    def __exit__(self, *exc) -> None:
        if self.http_server is not None:
            self.http_server.shutdown()
            self.http_server.server_close()
        if self.coordinator is not None:
            self.coordinator.close()
        for proc in self.processes:
            if proc.poll() is None:
                proc.terminate()
        for proc in self.processes:
            try:
                proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                proc.kill()
