# equivix/services/executor.py
"""
Shared worker pool for quadrature cells, operator blocks and experiment rows.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from equivix.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_executor: Optional[ThreadPoolExecutor] = None
_executor_lock = threading.Lock()


def get_executor() -> ThreadPoolExecutor:
    """Return the process-wide pool, creating it with ``settings.THREADS`` workers."""
    global _executor
    if _executor is None:
        with _executor_lock:
            if _executor is None:
                _executor = ThreadPoolExecutor(
                    max_workers=settings.THREADS, thread_name_prefix="equivix"
                )
                logger.info(f"Configured thread pool with {settings.THREADS} workers")
    return _executor


def shutdown_executor() -> None:
    global _executor
    with _executor_lock:
        if _executor is not None:
            _executor.shutdown(wait=True)
            _executor = None


def ordered_map(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Run ``func`` over ``items`` on the pool; results come back in input order."""
    items = list(items)
    # nested submissions from a worker would starve the pool
    in_worker = threading.current_thread().name.startswith("equivix")
    if len(items) <= 1 or settings.THREADS == 1 or in_worker:
        return [func(item) for item in items]
    futures = [get_executor().submit(func, item) for item in items]
    return [future.result() for future in futures]
