"""Evaluate a Stirling remainder or one of its signed derivatives."""

from __future__ import annotations

import argparse
from typing import Any

from mpmath import mp

from cmdeg.management import LabCommand
from cmdeg.remainders import EvalPath, RemainderSpec, evaluate_remainder


class Command(LabCommand):
    """Print ``R_n(x)`` or ``(-1)^m R_n^(m)(x)`` with its error bound."""

    help = "Evaluate R_n(x) or (-1)^m R_n^(m)(x) with a certified error bound"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--fn", choices=["R", "Rderiv"], default="R")
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--m", type=int, default=1, help="Derivative order for --fn Rderiv")
        parser.add_argument("--x", required=True, help="Argument, parsed at working precision")
        parser.add_argument(
            "--path",
            choices=[path.value for path in EvalPath],
            default=EvalPath.AUTO.value,
            help="Evaluation path for R_n",
        )

    def handle(self, *args: Any, **options: Any) -> None:
        ctx = self.context(options)
        m = options["m"] if options["fn"] == "Rderiv" else 0
        spec = RemainderSpec(options["n"], m, EvalPath(options["path"]))
        value = evaluate_remainder(spec, options["x"], ctx)
        self.stdout.write(f"{spec.label}({options['x']}) = {value.format(ctx.working_digits)}")
        self.stdout.write(f"err_bound = {mp.nstr(value.err_bound, 3)}")
