"""
Tests for grids, parallel mapping, formatting and report rendering.
"""

import csv
import json
from io import StringIO

import pytest
from django.test import override_settings
from mpmath import mpf

from cmdeg.exceptions import DomainError
from cmdeg.models import HPReal
from cmdeg.remainders import RemainderSpec
from cmdeg.reports import (
    CSV_HEADER,
    CheckResult,
    CheckStatus,
    DegreeReport,
    VerificationReport,
    summarize_grid,
)
from cmdeg.utils import default_grid, format_bound, format_mpf, log_grid, merge_grids, parallel_map


def square(x):
    return x * x


class TestGrids:
    """Test grid construction."""

    def test_log_grid_endpoints(self):
        """Both endpoints are included."""
        grid = log_grid(1e-3, 10, 5)
        assert len(grid) == 5
        assert grid[0] == pytest.approx(1e-3)
        assert grid[-1] == pytest.approx(10)
        assert grid == sorted(grid)

    def test_log_grid_is_deterministic(self):
        """The same arguments give the same nodes."""
        assert log_grid(1e-4, 60, 100) == log_grid(1e-4, 60, 100)

    @pytest.mark.parametrize("t_min,t_max,points", [(0, 1, 10), (2, 1, 10), (1, 2, 1)])
    def test_log_grid_rejects(self, t_min, t_max, points):
        """Empty or non-positive ranges are rejected."""
        with pytest.raises(DomainError):
            log_grid(t_min, t_max, points)

    @override_settings(CMDEG_SCAN_POINTS=7, CMDEG_SCAN_T_MAX=5)
    def test_default_grid_from_settings(self):
        """The default grid follows the scan settings."""
        grid = default_grid()
        assert len(grid) == 7
        assert grid[-1] == pytest.approx(5)

    def test_default_grid_overrides(self):
        """Explicit arguments win over settings."""
        grid = default_grid(points=3, t_max=2.0)
        assert len(grid) == 3
        assert grid[0] == pytest.approx(1e-4)

    def test_merge_grids(self):
        """Union without duplicates, in order."""
        merged = merge_grids([mpf(1), mpf(3)], [mpf(2), mpf(3)])
        assert merged == [1, 2, 3]


class TestParallelMap:
    """Test the process-pool map."""

    def test_serial(self):
        """One worker maps in process."""
        assert parallel_map(square, [1, 2, 3], workers=1) == [1, 4, 9]

    def test_processes_keep_order(self):
        """Results come back in input order."""
        assert parallel_map(square, list(range(20)), workers=2) == [x * x for x in range(20)]

    def test_workers_from_settings(self):
        """Without an explicit count the setting applies."""
        assert parallel_map(square, [5]) == [25]


class TestFormatting:
    """Test number rendering."""

    def test_format_mpf_fixed(self):
        """Moderate values are printed in fixed notation."""
        assert format_mpf(mpf("0.125"), 5) == "0.12500"

    def test_format_mpf_exponent(self):
        """Tiny values use exponent notation."""
        assert "e-" in format_mpf(mpf("1.5e-12"), 5)

    def test_format_bound(self):
        """Error bounds get three significant digits."""
        assert format_bound(mpf("1.23456e-30")) == "1.23e-30"


class TestReports:
    """Test report rendering."""

    def degree_report(self):
        return DegreeReport(
            target=RemainderSpec(2),
            lo=2,
            hi=mpf(3),
            hi_source="level",
            witness=(mpf(5), HPReal(mpf(-1), mpf("1e-40"))),
            rows=[(mpf(1), HPReal(mpf("0.5"), mpf("1e-40")))],
            conjecture="R2",
            conjectured_degree=2,
        )

    def test_degree_json_keys(self):
        """The JSON report carries the bracket fields."""
        payload = json.loads(self.degree_report().to_json(10))
        assert payload["target"] == "R_2"
        assert payload["lo"] == 2
        assert payload["hi"] == "3.000000000"
        assert payload["witness"]["t"] == "5.000000000"
        assert payload["consistent"] is True
        assert set(payload) >= {"checks", "elapsed_seconds", "hi_certified", "grid"}

    def test_degree_csv(self):
        """CSV rows follow the fixed header with LF endings."""
        stream = StringIO()
        self.degree_report().write_csv(stream, 5)
        text = stream.getvalue()
        assert "\r" not in text
        rows = list(csv.reader(StringIO(text)))
        assert tuple(rows[0]) == CSV_HEADER
        assert rows[1][:2] == ["1.0000", "0.50000"]

    def test_consistency_outside_bracket(self):
        """A conjectured degree above hi is inconsistent."""
        report = self.degree_report()
        report.conjectured_degree = 4
        assert report.consistent is False

    def test_consistency_without_conjecture(self):
        """Without a conjecture there is nothing to compare."""
        report = self.degree_report()
        report.conjectured_degree = None
        assert report.consistent is None

    def test_verification_report(self):
        """Pass needs every check to pass; exit_ok only needs no failures."""
        report = VerificationReport("1")
        assert not report.passed
        report.checks.append(CheckResult("a", CheckStatus.PASS, mpf(1), mpf(0)))
        assert report.passed
        report.checks.append(CheckResult("b", CheckStatus.INCONCLUSIVE))
        assert not report.passed
        assert report.exit_ok
        payload = json.loads(report.to_json())
        assert payload["target"] == "proposition 1"
        assert [check["status"] for check in payload["checks"]] == ["pass", "inconclusive"]

    def test_verification_csv(self):
        """One row per check."""
        report = VerificationReport("2", [CheckResult("a", CheckStatus.FAIL, mpf(-1), mpf(0))])
        stream = StringIO()
        report.write_csv(stream)
        assert stream.getvalue().splitlines()[1].startswith("a,fail,")

    def test_extend(self):
        """Merged reports keep every check."""
        first = VerificationReport("1", [CheckResult("a", CheckStatus.PASS)])
        first.extend(VerificationReport("2", [CheckResult("b", CheckStatus.PASS)]))
        assert [check.name for check in first.checks] == ["a", "b"]

    def test_summarize_grid(self):
        """Grid summaries show the range and size."""
        assert summarize_grid(log_grid(0.01, 40, 16)) == "log[0.01, 40.0] x 16"
        assert summarize_grid([]) == ""
