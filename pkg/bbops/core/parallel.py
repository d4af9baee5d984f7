import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: the configured cap, else one per CPU."""
    if threads is not None:
        return max(1, int(threads))
    return min(32, os.cpu_count() or 1)


def sweep_map(
    fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """Map ``fn`` over a parameter sweep; results keep the input order."""
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    logger.debug("Sweeping %d parameter tuples on %d threads", len(items), workers)
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
