"""Benchmark harness: repeated sequential passes over a fixed query set.

A pass submits every query in order, one at a time, waiting for each
consolidated result before sending the next.  The pass time is the sum of
the coordinator-reported search times, so client-to-coordinator transfer
never contaminates the measurement.  Any query error, timeout, or partial
result fails the pass, and a failed pass aborts the whole benchmark; means
over silently dropped failures would be biased.
"""

from __future__ import annotations

import csv
import json
import logging
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .stats import mean_ci

log = logging.getLogger(__name__)

__all__ = [
    "PassFailed",
    "BenchmarkAborted",
    "FleetDescriptor",
    "PassResult",
    "BenchmarkReport",
    "run_pass",
    "run_benchmark",
    "emit_report",
    "load_query_set",
    "REPORT_FIELDS",
]

REPORT_FIELDS = ["config", "group", "ssd", "machines", "passes", "mean_s", "ci99_halfwidth_s"]


class PassFailed(RuntimeError):
    """One benchmark pass could not complete cleanly."""


class BenchmarkAborted(RuntimeError):
    """A pass failed, so the whole run is invalid."""


@dataclass(frozen=True)
class FleetDescriptor:
    """What was benchmarked: a priced machine config or local processes."""

    name: str
    group: str = "local"
    ssd: bool = False
    machines: int = 1


@dataclass(frozen=True)
class PassResult:
    duration_s: float
    query_times_s: list[float]


@dataclass(frozen=True)
class BenchmarkReport:
    fleet: FleetDescriptor
    passes: int
    pass_times_s: list[float]
    mean_s: float
    ci99_halfwidth_s: float
    confidence: float
    failed_passes: int = 0


def load_query_set(path: str | Path) -> list[str]:
    """One LaTeX formula per line; blank lines are ignored."""
    queries = [
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not queries:
        raise ValueError(f"query set {path} is empty")
    return queries


def _submit(coordinator: str, latex: str, k: int, timeout: float) -> dict:
    url = f"http://{coordinator}/search?" + urllib.parse.urlencode({"q": latex, "k": k})
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as e:
        detail = e.read().decode("utf-8", "replace")
        raise PassFailed(f"query {latex!r} -> HTTP {e.code}: {detail}") from e
    except (urllib.error.URLError, OSError, json.JSONDecodeError) as e:
        raise PassFailed(f"query {latex!r} failed: {e}") from e


def run_pass(
    queries: Sequence[str], coordinator: str, k: int = 10, timeout: float = 60.0
) -> PassResult:
    """One strictly sequential pass over the query set.

    Query i+1 is submitted only after i's consolidated result has been
    received.  A partial result (any shard missing) fails the pass.
    """
    if not queries:
        raise ValueError("query set must be nonempty")
    times = []
    for latex in queries:
        reply = _submit(coordinator, latex, k, timeout)
        if reply.get("partial"):
            raise PassFailed(f"query {latex!r} returned a partial result")
        t = reply.get("search_time_s")
        if not isinstance(t, (int, float)) or t < 0:
            raise PassFailed(f"query {latex!r} returned a bad search_time_s: {t!r}")
        times.append(float(t))
    return PassResult(duration_s=sum(times), query_times_s=times)


def run_benchmark(
    queries: Sequence[str],
    coordinator: str,
    k: int = 10,
    passes: int = 41,
    confidence: float = 0.99,
    fleet: FleetDescriptor | None = None,
    timeout: float = 60.0,
) -> BenchmarkReport:
    """R full passes, then mean and confidence half-width over pass times."""
    if passes < 2:
        raise ValueError("need at least two passes for a confidence interval")
    fleet = fleet or FleetDescriptor(name="local")
    pass_times = []
    for i in range(passes):
        try:
            result = run_pass(queries, coordinator, k=k, timeout=timeout)
        except PassFailed as e:
            raise BenchmarkAborted(f"pass {i + 1}/{passes} failed: {e}") from e
        pass_times.append(result.duration_s)
        log.info("pass %d/%d: %.6fs", i + 1, passes, result.duration_s)
    mean, halfwidth = mean_ci(pass_times, confidence)
    return BenchmarkReport(
        fleet=fleet,
        passes=passes,
        pass_times_s=pass_times,
        mean_s=mean,
        ci99_halfwidth_s=halfwidth,
        confidence=confidence,
    )


def _report_row(report: BenchmarkReport) -> dict:
    return {
        "config": report.fleet.name,
        "group": report.fleet.group,
        "ssd": str(report.fleet.ssd).lower(),
        "machines": report.fleet.machines,
        "passes": report.passes,
        "mean_s": repr(report.mean_s),
        "ci99_halfwidth_s": repr(report.ci99_halfwidth_s),
    }


def emit_report(reports: Sequence[BenchmarkReport], out_dir: str | Path) -> list[Path]:
    """Write the summary CSV plus one plot-data file per group.

    Rows keep their input order, and the per-group files keep the relative
    order of their group's rows; downstream plots rely on that ordering.
    """
    if not reports:
        raise ValueError("emit_report needs at least one report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    summary = out_dir / "benchmark.csv"
    with open(summary, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_FIELDS)
        writer.writeheader()
        for r in reports:
            writer.writerow(_report_row(r))
    written.append(summary)

    groups: dict[str, list[BenchmarkReport]] = {}
    for r in reports:
        groups.setdefault(r.fleet.group, []).append(r)
    for group, rows in groups.items():
        path = out_dir / f"plot_{group}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["position", "config", "ssd", "machines", "mean_s", "ci99_halfwidth_s"])
            for pos, r in enumerate(rows):
                writer.writerow(
                    [
                        pos,
                        r.fleet.name,
                        str(r.fleet.ssd).lower(),
                        r.fleet.machines,
                        repr(r.mean_s),
                        repr(r.ci99_halfwidth_s),
                    ]
                )
        written.append(path)
    return written
