"""Empirical bracket tables for the conjectured CM degrees."""

from __future__ import annotations

import argparse
import json
from typing import Any

from mpmath import mp

from cmdeg.management import LabCommand
from cmdeg.utils import default_grid
from cmdeg.verification import CONJECTURES, conjecture_table


class Command(LabCommand):
    help = "Bracket every target of a conjecture and compare with its conjectured degree"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--conjecture", choices=sorted(CONJECTURES), required=True)
        parser.add_argument("--grid-points", type=int, default=None)
        parser.add_argument("--t-max", type=float, default=None)
        parser.add_argument("--format", choices=["text", "json"], default="text")
        parser.add_argument("--output-digits", type=int, default=20)

    def handle(self, *args: Any, **options: Any) -> None:
        ctx = self.context(options)
        grid = default_grid(options["grid_points"], options["t_max"])
        reports = conjecture_table(options["conjecture"], ctx, grid, options["workers"])

        if options["format"] == "json":
            payload = [report.as_dict(options["output_digits"]) for report in reports]
            self.stdout.write(json.dumps(payload, indent=2, sort_keys=True))
            return

        self.stdout.write(self.style.MIGRATE_HEADING(f"Conjecture {options['conjecture']}"))
        self.stdout.write(f"  {'target':<16} {'conj':>5} {'lo':>4} {'hi':>12}  source")
        for report in reports:
            hi = "-" if report.hi is None else mp.nstr(report.hi, 8)
            lo = "-" if report.lo is None else str(report.lo)
            line = (
                f"  {report.target.label:<16} {report.conjectured_degree:>5} {lo:>4} {hi:>12}"
                f"  {report.hi_source}{'' if report.hi_certified else ' (uncertified)'}"
            )
            style = self.style.SUCCESS if report.consistent else self.style.WARNING
            self.stdout.write(style(line))
        consistent = sum(1 for report in reports if report.consistent)
        self.stdout.write(f"{consistent}/{len(reports)} brackets contain the conjectured degree")
