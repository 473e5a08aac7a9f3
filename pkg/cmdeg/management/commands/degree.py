"""Bracket the CM degree of a remainder or a signed derivative."""

from __future__ import annotations

import argparse
from typing import Any

from django.core.management.base import CommandError

from cmdeg.exceptions import InconclusiveError
from cmdeg.lab import degree_bracket, derivative_degree_bracket
from cmdeg.management import LabCommand
from cmdeg.remainders import RemainderSpec
from cmdeg.reports import DegreeReport
from cmdeg.utils import default_grid


def _levels(raw: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"levels must be comma separated numbers: {raw!r}"
        ) from exc


class Command(LabCommand):
    """Scan kernel levels and report ``lo <= deg <= hi`` as CSV or JSON."""

    help = "Empirical CM-degree bracket for R_n or (-1)^m R_n^(m)"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--target", choices=["Rn", "Rn-deriv"], default="Rn")
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--m", type=int, default=1, help="Derivative order for Rn-deriv")
        parser.add_argument("--levels", type=_levels, default=None, help="e.g. 0,1,2")
        parser.add_argument("--grid-points", type=int, default=None)
        parser.add_argument("--t-max", type=float, default=None)
        parser.add_argument("--format", choices=["csv", "json"], default="json")
        parser.add_argument("--output-digits", type=int, default=20)
        parser.add_argument(
            "--output", default=None, help="Write the report here instead of stdout"
        )

    def bracket(self, options: dict[str, Any]) -> DegreeReport:
        ctx = self.context(options)
        grid = default_grid(options["grid_points"], options["t_max"])
        n = options["n"]
        m = options["m"] if options["target"] == "Rn-deriv" else 0
        if m and options["levels"] is None and ((n == 0 and m >= 2) or n == 1):
            return derivative_degree_bracket(n, m, ctx, grid, options["workers"])
        return degree_bracket(
            RemainderSpec(n, m), options["levels"], ctx, grid, workers=options["workers"]
        )

    def handle(self, *args: Any, **options: Any) -> None:
        contradiction = None
        try:
            report = self.bracket(options)
        except InconclusiveError as exc:
            if exc.report is None:
                raise
            report, contradiction = exc.report, exc

        digits = options["output_digits"]
        if options["output"]:
            with open(options["output"], "w", encoding="utf-8", newline="") as stream:
                self._render(report, options["format"], digits, stream)
            self.stdout.write(self.style.SUCCESS(f"Report written to {options['output']}"))
        else:
            self._render(report, options["format"], digits, self.stdout)
        if contradiction is not None:
            raise CommandError(f"Inconclusive: {contradiction}", returncode=1)

    @staticmethod
    def _render(report: DegreeReport, fmt: str, digits: int, stream: Any) -> None:
        if fmt == "csv":
            report.write_csv(stream, digits)
        else:
            stream.write(report.to_json(digits))
