"""
Settings for cmdeg.

Library code reads tunables from ``django.conf.settings`` with
``getattr(settings, "NAME", default)``. Inside a Django project the host
settings module provides them. Standalone, :func:`configure` fills the
settings from ``DEFAULTS``, overlaid with environment variables of the same
name. Explicit function arguments and CLI flags always win.
"""

from __future__ import annotations

import os
from collections.abc import Mapping
from typing import Any

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

__all__ = ["DEFAULTS", "configure", "environment_settings", "logging_config", "settings"]

DEFAULTS: dict[str, Any] = {
    "CMDEG_DIGITS": 50,
    "CMDEG_SERIES_CUTOFF": 2.0,
    "CMDEG_REMAINDER_X_STAR": 10.0,
    "CMDEG_SCAN_POINTS": 2000,
    "CMDEG_SCAN_T_MIN": 1e-4,
    "CMDEG_SCAN_T_MAX": 60.0,
    "CMDEG_QUAD_MAX_LEVELS": 12,
    "CMDEG_QUAD_NODE_CAP": 2**15,
    "CMDEG_S_SEARCH_T_MAX": 1e8,
    "CMDEG_S_SEARCH_POINTS": 2000,
    "CMDEG_S_SEARCH_HP_LIMIT": 1e5,
    "CMDEG_VERIFY_S_T_MAX": 1e3,
    "CMDEG_RATIO_X_MIN": 1e-6,
    "CMDEG_RATIO_X_MAX": 1e3,
    "CMDEG_RATIO_GRID_POINTS": 41,
    "CMDEG_WORKERS": 1,
    "CMDEG_LOG_LEVEL": "WARNING",
}


def environment_settings(environ: Mapping[str, str] | None = None) -> dict[str, Any]:
    """Return ``DEFAULTS`` overlaid with values parsed from *environ*.

    Args:
        environ: Variables to read; ``os.environ`` when omitted.

    Raises:
        ImproperlyConfigured: If a value cannot be parsed as its default's type.
    """
    environ = os.environ if environ is None else environ
    values: dict[str, Any] = {}
    for name, default in DEFAULTS.items():
        raw = environ.get(name)
        if raw is None or raw == "":
            values[name] = default
            continue
        try:
            if isinstance(default, int):
                values[name] = int(float(raw))
            else:
                values[name] = type(default)(raw)
        except ValueError as exc:
            raise ImproperlyConfigured(f"Invalid value for {name}: {raw!r}") from exc
    return values


def logging_config(level: str) -> dict[str, Any]:
    """``LOGGING`` dictConfig that sends ``cmdeg`` records at *level* to stderr."""
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "plain": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
        },
        "handlers": {
            "console": {"class": "logging.StreamHandler", "formatter": "plain"},
        },
        "loggers": {
            "cmdeg": {"handlers": ["console"], "level": level.upper(), "propagate": False},
        },
    }


def configure(**overrides: Any) -> Any:
    """Configure ``django.conf.settings`` for standalone use.

    Does nothing when settings are already configured. *overrides* win over
    the environment.

    Returns:
        The settings object.
    """
    if settings.configured:
        return settings
    values = environment_settings()
    values.update(overrides)
    settings.configure(
        INSTALLED_APPS=["cmdeg"],
        LOGGING=logging_config(str(values["CMDEG_LOG_LEVEL"])),
        **values,
    )
    return settings


if not os.environ.get("DJANGO_SETTINGS_MODULE"):
    configure()
