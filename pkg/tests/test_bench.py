import csv

import pytest

from mathsearch.bench import (
    BenchmarkAborted,
    FleetDescriptor,
    PassFailed,
    REPORT_FIELDS,
    emit_report,
    load_query_set,
    run_benchmark,
    run_pass,
)

QUERIES = ["x+y", "a-b", r"\frac{p}{q}"]


class TestRunPass:
    def test_single_query_duration(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.125])
        result = run_pass(["x+y"], stub.address)
        assert result.duration_s == 0.125
        assert result.query_times_s == [0.125]

    def test_duration_is_sum_of_reported_times(self, stub_coordinator_factory):
        latencies = [0.001 * (i + 1) for i in range(120)]
        stub = stub_coordinator_factory(latencies)
        result = run_pass([f"x+{i}" for i in range(120)], stub.address)
        assert abs(result.duration_s - sum(latencies)) <= 1e-9

    def test_partial_result_fails_pass(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.1], partial_at=1)
        with pytest.raises(PassFailed):
            run_pass(QUERIES, stub.address)

    def test_http_error_fails_pass(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.1], fail_at=0)
        with pytest.raises(PassFailed):
            run_pass(QUERIES, stub.address)

    def test_unreachable_coordinator_fails_pass(self):
        with pytest.raises(PassFailed):
            run_pass(QUERIES, "127.0.0.1:1", timeout=0.5)

    def test_requires_queries(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.1])
        with pytest.raises(ValueError):
            run_pass([], stub.address)


class TestRunBenchmark:
    def test_fixed_latency_two_passes(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.25])
        report = run_benchmark(QUERIES, stub.address, passes=2)
        assert report.pass_times_s == [0.75, 0.75]
        assert report.mean_s == 0.75
        assert report.ci99_halfwidth_s == 0.0
        assert report.failed_passes == 0

    def test_mean_is_exact_arithmetic_mean(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.1, 0.2, 0.3])
        report = run_benchmark(QUERIES, stub.address, passes=4)
        assert report.mean_s == sum(report.pass_times_s) / len(report.pass_times_s)

    def test_failed_pass_aborts(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.1], fail_at=7)  # fails in pass 3
        with pytest.raises(BenchmarkAborted):
            run_benchmark(QUERIES, stub.address, passes=5)

    def test_minimum_two_passes(self, stub_coordinator_factory):
        stub = stub_coordinator_factory([0.1])
        with pytest.raises(ValueError):
            run_benchmark(QUERIES, stub.address, passes=1)


def _mk_report(name, group, mean, ssd=False, machines=1):
    from mathsearch.bench import BenchmarkReport

    return BenchmarkReport(
        fleet=FleetDescriptor(name=name, group=group, ssd=ssd, machines=machines),
        passes=2,
        pass_times_s=[mean, mean],
        mean_s=mean,
        ci99_halfwidth_s=0.0,
        confidence=0.99,
    )


class TestEmitReport:
    def test_single_report_row_echo(self, tmp_path):
        report = _mk_report("F1", "compute_optimized", 1.5, ssd=True, machines=16)
        emit_report([report], tmp_path)
        with open(tmp_path / "benchmark.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert rows[0] == {
            "config": "F1",
            "group": "compute_optimized",
            "ssd": "true",
            "machines": "16",
            "passes": "2",
            "mean_s": "1.5",
            "ci99_halfwidth_s": "0.0",
        }

    def test_header_matches_contract(self, tmp_path):
        emit_report([_mk_report("A", "general", 1.0, False, 1)], tmp_path)
        header = (tmp_path / "benchmark.csv").read_text().splitlines()[0]
        assert header == ",".join(REPORT_FIELDS)

    def test_one_plot_file_per_group(self, tmp_path):
        reports = [
            _mk_report("A0", "general", 3.0, False, 16),
            _mk_report("F1", "compute_optimized", 1.0, True, 16),
        ]
        emit_report(reports, tmp_path)
        assert (tmp_path / "plot_general.csv").exists()
        assert (tmp_path / "plot_compute_optimized.csv").exists()
        assert not (tmp_path / "plot_memory_optimized.csv").exists()

    def test_group_rows_keep_input_order_not_value_order(self, tmp_path):
        # means deliberately unsorted: output must keep submission order
        reports = [
            _mk_report("A0 Basic", "general", 5.0, False, 16),
            _mk_report("A1 Basic", "general", 2.0, False, 16),
            _mk_report("A2 Basic", "general", 9.0, False, 8),
        ]
        emit_report(reports, tmp_path)
        with open(tmp_path / "plot_general.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["config"] for r in rows] == ["A0 Basic", "A1 Basic", "A2 Basic"]
        assert [r["position"] for r in rows] == ["0", "1", "2"]

    def test_requires_reports(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report([], tmp_path)


class TestLoadQuerySet:
    def test_sample_set_has_120_formulas(self):
        from pathlib import Path

        path = Path(__file__).resolve().parent.parent / "data" / "queries_sample.txt"
        queries = load_query_set(path)
        assert len(queries) == 120

    def test_blank_lines_ignored(self, tmp_path):
        p = tmp_path / "q.txt"
        p.write_text("x+y\n\n  \na-b\n")
        assert load_query_set(p) == ["x+y", "a-b"]

    def test_empty_set_rejected(self, tmp_path):
        p = tmp_path / "q.txt"
        p.write_text("\n\n")
        with pytest.raises(ValueError):
            load_query_set(p)
