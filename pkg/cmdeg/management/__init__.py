"""
Command-line entry point: ``cmdeg <command> [options]``.

Commands are Django management commands in ``cmdeg.management.commands``
and run through ``ManagementUtility`` or ``call_command``.
"""

from __future__ import annotations

import logging
import sys
from typing import Any

from django.core.management import ManagementUtility
from django.core.management.base import BaseCommand, CommandError, CommandParser

from cmdeg import __version__
from cmdeg.conf import configure
from cmdeg.exceptions import CmdegError
from cmdeg.models import PrecisionContext

VERBOSITY_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}


class LabCommand(BaseCommand):
    """Base for cmdeg commands.

    Adds ``--digits`` and ``--workers`` to Django's common options and maps
    ``--verbosity`` onto the ``cmdeg`` logger. ``CmdegError`` raised while
    handling becomes a ``CommandError`` with exit status 2 when run from the
    command line; ``call_command`` lets it propagate.
    """

    requires_system_checks: list[str] = []

    def get_version(self) -> str:
        return __version__

    def create_parser(self, prog_name: str, subcommand: str, **kwargs: Any) -> CommandParser:
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.add_argument(
            "--digits",
            type=int,
            default=None,
            help="Working precision in significant decimal digits (overrides CMDEG_DIGITS)",
        )
        parser.add_argument(
            "--workers",
            type=int,
            default=None,
            help="Worker processes for grid scans (overrides CMDEG_WORKERS)",
        )
        return parser

    def context(self, options: dict[str, Any]) -> PrecisionContext:
        try:
            return PrecisionContext.from_settings(options.get("digits"))
        except CmdegError as exc:
            raise CommandError(str(exc)) from exc

    def execute(self, *args: Any, **options: Any) -> Any:
        verbosity = options.get("verbosity", 1)
        if verbosity != 1:
            logging.getLogger("cmdeg").setLevel(VERBOSITY_LEVELS.get(verbosity, logging.DEBUG))
        try:
            return super().execute(*args, **options)
        except CmdegError as exc:
            if not self._called_from_command_line:
                raise
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=2) from exc


def main(argv: list[str] | None = None) -> None:
    """Run ``cmdeg <command>`` with *argv* (``sys.argv`` when omitted)."""
    configure()
    ManagementUtility(list(sys.argv if argv is None else argv)).execute()
