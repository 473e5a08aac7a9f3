"""Evaluate a Laplace kernel at one point."""

from __future__ import annotations

import argparse
from typing import Any

from django.core.management.base import CommandError
from mpmath import mp

from cmdeg.kernels import KernelFamily, KernelSpec, Representation
from cmdeg.management import LabCommand


class Command(LabCommand):
    help = "Evaluate f_n, g_n, the Laguerre kernel f_m or s at t"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--family", choices=[family.value for family in KernelFamily], required=True
        )
        index = parser.add_mutually_exclusive_group()
        index.add_argument("--n", type=int, help="Index of the Binet kernels f_n and g_n")
        index.add_argument("--m", type=int, help="Index of the Laguerre kernel f_m")
        parser.add_argument("--deriv", type=int, default=0, help="Derivative order in t")
        parser.add_argument("--t", required=True)
        parser.add_argument(
            "--representation",
            choices=[rep.value for rep in Representation],
            default=Representation.AUTO.value,
        )

    def handle(self, *args: Any, **options: Any) -> None:
        family = KernelFamily(options["family"])
        if family is KernelFamily.LAGUERRE_F:
            if options["m"] is None:
                raise CommandError("--family laguerre-f needs --m")
            index = options["m"]
        elif family is KernelFamily.S_KERNEL:
            index = 0
        else:
            if options["n"] is None:
                raise CommandError(f"--family {family.value} needs --n")
            index = options["n"]
        ctx = self.context(options)
        representation = Representation(options["representation"])
        spec = KernelSpec(family, index, options["deriv"], representation)
        value = spec(options["t"], ctx)
        self.stdout.write(f"{spec.label}({options['t']}) = {value.format(ctx.working_digits)}")
        self.stdout.write(f"err_bound = {mp.nstr(value.err_bound, 3)}")
