"""Ordered parallel map with a worker cap taken from ``HEUN_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List

from .errors import ConfigError

ENV_VAR = "HEUN_THREADS"


def worker_count() -> int:
    """Workers allowed by ``HEUN_THREADS`` (default: CPU count)."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn: Callable, items: Iterable) -> List:
    """``[fn(x) for x in items]``, spread over processes when more than one worker is allowed.

    ``fn`` must be picklable (a module-level function or a partial of one).
    Results come back in input order.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
