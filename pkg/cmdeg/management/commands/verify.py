"""Run the proposition verification suites."""

from __future__ import annotations

import argparse
from typing import Any

from django.core.management.base import CommandError

from cmdeg.management import LabCommand
from cmdeg.reports import CheckStatus
from cmdeg.verification import PROPOSITIONS, verify_proposition


class Command(LabCommand):
    """Print one line per check; exit 1 when any check failed.

    Inconclusive checks are reported but do not change the exit status.
    """

    help = "Verify propositions 1-4 numerically and write a JSON or CSV report"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--prop", choices=[*PROPOSITIONS, "all"], default="all")
        parser.add_argument("--report", default=None, help="Write the full report to this file")
        parser.add_argument("--format", choices=["json", "csv"], default="json")
        parser.add_argument("--grid-points", type=int, default=None)
        parser.add_argument("--output-digits", type=int, default=20)

    def handle(self, *args: Any, **options: Any) -> None:
        ctx = self.context(options)
        report = verify_proposition(options["prop"], ctx, options["grid_points"])

        paint = {
            CheckStatus.PASS: self.style.SUCCESS,
            CheckStatus.FAIL: self.style.ERROR,
            CheckStatus.INCONCLUSIVE: self.style.WARNING,
        }
        for check in report.checks:
            line = f"  [{check.status.value.upper():>12}] {check.name}"
            if check.detail:
                line += f" ({check.detail})"
            self.stdout.write(paint[check.status](line))

        digits = options["output_digits"]
        if options["report"]:
            with open(options["report"], "w", encoding="utf-8", newline="") as stream:
                if options["format"] == "csv":
                    report.write_csv(stream, digits)
                else:
                    stream.write(report.to_json(digits))

        counts = {status: 0 for status in CheckStatus}
        for check in report.checks:
            counts[check.status] += 1
        summary = (
            f"Proposition {report.proposition}: {counts[CheckStatus.PASS]} passed, "
            f"{counts[CheckStatus.FAIL]} failed, {counts[CheckStatus.INCONCLUSIVE]} inconclusive"
        )
        if not report.exit_ok:
            self.stdout.write(self.style.ERROR(summary))
            raise CommandError(f"{counts[CheckStatus.FAIL]} check(s) failed", returncode=1)
        self.stdout.write(self.style.SUCCESS(summary))
