# equivix/services/cache.py
"""
Bounded, thread-safe caches for immutable numeric tables.

Quadrature nodes, Hermite ladder matrices and Clifford sign tables are
expensive to rebuild and never change, so they are memoised per process.
"""

import logging
import threading
from collections import OrderedDict
from functools import wraps
from typing import Any, Callable, Generic, Optional, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _freeze(value: Any) -> Any:
    """Mark numpy arrays (also inside tuples) read-only before sharing them."""
    if isinstance(value, np.ndarray):
        value.flags.writeable = False
    elif isinstance(value, tuple):
        for item in value:
            _freeze(item)
    return value


class TableCache(Generic[T]):
    """
    Thread-safe least-recently-used cache.

    Usage:
        cache = TableCache[np.ndarray](max_entries=32)
        cache.set("gl:10", nodes)
        nodes = cache.get("gl:10")
    """

    def __init__(self, max_entries: int = 64):
        self._entries: "OrderedDict[str, T]" = OrderedDict()
        self._lock = threading.RLock()
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0

    def get(self, key: str) -> Optional[T]:
        """
        Get a value and mark it as recently used.

        Returns:
            Cached value or None if absent
        """
        with self._lock:
            if key not in self._entries:
                self.misses += 1
                return None
            self._entries.move_to_end(key)
            self.hits += 1
            return self._entries[key]

    def set(self, key: str, value: T) -> None:
        """Store a value, evicting the least recently used entry when full."""
        with self._lock:
            self._entries[key] = _freeze(value)
            self._entries.move_to_end(key)
            while len(self._entries) > self.max_entries:
                evicted, _ = self._entries.popitem(last=False)
                logger.debug(f"Evicted cache entry {evicted}")

    def delete(self, key: str) -> bool:
        with self._lock:
            if key in self._entries:
                del self._entries[key]
                return True
            return False

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
            self.hits = 0
            self.misses = 0

    def get_or_set(self, key: str, factory: Callable[[], T]) -> T:
        """
        Get a value or build it with ``factory`` and store it.

        The factory runs outside the lock; two threads racing on the same
        key may both build the table, and the later one wins.
        """
        value = self.get(key)
        if value is not None:
            return value
        computed = factory()
        self.set(key, computed)
        return computed

    def size(self) -> int:
        with self._lock:
            return len(self._entries)


class CacheManager:
    """
    Process-wide registry of named table caches.

    Default capacities:
        - clifford: algebras and multiplication matrices per n_half
        - quadrature: Gauss-Legendre / Gauss-Hermite rules per node count
        - hermite: ladder matrices per cutoff
        - kernels: 1D rho_hbar factor matrices per (factor, hbar, N, nodes)
    """

    DEFAULT_CAPACITIES = {
        "clifford": 16,
        "quadrature": 64,
        "hermite": 32,
        "kernels": 128,
    }

    _instance: Optional["CacheManager"] = None
    _lock = threading.Lock()

    def __new__(cls) -> "CacheManager":
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        self._caches: dict[str, TableCache] = {}
        self._cache_lock = threading.RLock()
        self._initialized = True

    def get_cache(self, name: str, max_entries: Optional[int] = None) -> TableCache:
        """Get or create a named cache."""
        with self._cache_lock:
            if name not in self._caches:
                capacity = max_entries or self.DEFAULT_CAPACITIES.get(name, 64)
                self._caches[name] = TableCache(max_entries=capacity)
            return self._caches[name]

    def invalidate(self, name: str) -> bool:
        with self._cache_lock:
            if name in self._caches:
                self._caches[name].clear()
                return True
            return False

    def invalidate_all(self) -> None:
        with self._cache_lock:
            for cache in self._caches.values():
                cache.clear()

    def stats(self) -> dict[str, dict[str, int]]:
        """Entry count, hits and misses per named cache."""
        with self._cache_lock:
            return {
                name: {"entries": cache.size(), "hits": cache.hits, "misses": cache.misses}
                for name, cache in self._caches.items()
            }


def cached(cache_name: str, key_func: Optional[Callable[..., str]] = None):
    """
    Decorator memoising a table builder.

    Usage:
        @cached("quadrature", key_func=lambda n: f"gauss-legendre:{n}")
        def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
            ...

    Arguments must have stable ``repr``s when no ``key_func`` is given.
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> T:
            cache = CacheManager().get_cache(cache_name)
            if key_func:
                key = key_func(*args, **kwargs)
            else:
                key = f"{func.__name__}:{args}:{sorted(kwargs.items())}"
            return cache.get_or_set(key, lambda: func(*args, **kwargs))

        return wrapper
    return decorator


# Global cache manager instance
cache_manager = CacheManager()
