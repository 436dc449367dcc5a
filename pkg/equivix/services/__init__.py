# services/__init__.py

from .cache import CacheManager, TableCache, cache_manager, cached
from .executor import get_executor, ordered_map, shutdown_executor

__all__ = [
    "CacheManager",
    "TableCache",
    "cache_manager",
    "cached",
    "get_executor",
    "ordered_map",
    "shutdown_executor",
]
