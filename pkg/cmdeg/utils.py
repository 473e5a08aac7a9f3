"""
Utility functions for cmdeg: grids, worker pools and number formatting.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

import numpy as np
from mpmath import mp, mpf

from .conf import settings
from .exceptions import DomainError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def log_grid(t_min: float, t_max: float, points: int) -> list[mpf]:
    """Logarithmically spaced grid on ``[t_min, t_max]``, endpoints included.

    Nodes are generated in float64 and converted exactly, so the same
    arguments always give the same grid.

    Raises:
        DomainError: If the range is empty or not positive.
    """
    if not 0 < t_min < t_max:
        raise DomainError(f"grid needs 0 < t_min < t_max, got {t_min}, {t_max}")
    if points < 2:
        raise DomainError(f"grid needs at least 2 points, got {points}")
    return [mpf(float(v)) for v in np.geomspace(t_min, t_max, points)]


def default_grid(points: int | None = None, t_max: float | None = None) -> list[mpf]:
    """The scan grid from settings, optionally overriding size or upper end."""
    t_min = float(getattr(settings, "CMDEG_SCAN_T_MIN", 1e-4))
    if t_max is None:
        t_max = float(getattr(settings, "CMDEG_SCAN_T_MAX", 60.0))
    if points is None:
        points = int(getattr(settings, "CMDEG_SCAN_POINTS", 2000))
    return log_grid(t_min, t_max, points)


def merge_grids(*grids: Iterable[mpf]) -> list[mpf]:
    """Sorted union of grids with duplicates removed."""
    return sorted(set().union(*(set(g) for g in grids)))


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int | None = None) -> list[R]:
    """Map *fn* over *items*, in worker processes when ``workers > 1``.

    Results come back in input order. mpmath's precision is process-global,
    so workers are processes rather than threads; *fn* must be picklable.
    """
    if workers is None:
        workers = int(getattr(settings, "CMDEG_WORKERS", 1))
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    logger.debug("mapping %d items over %d processes", len(items), workers)
    chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))


def format_mpf(value: mpf, digits: int) -> str:
    """Render *value* with *digits* significant digits, exponent form when needed."""
    return mp.nstr(value, digits, min_fixed=-4, max_fixed=6, strip_zeros=False)


def format_bound(value: mpf) -> str:
    """Render an error bound with three significant digits."""
    return mp.nstr(value, 3, min_fixed=-4, max_fixed=6)
