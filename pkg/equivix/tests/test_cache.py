# equivix/tests/test_cache.py
"""Tests for the TableCache and CacheManager classes."""

import threading

import numpy as np
import pytest

from equivix.services.cache import CacheManager, TableCache, cached
from equivix.services.executor import ordered_map


class TestTableCache:
    """Tests for TableCache class."""

    def test_set_and_get(self):
        """Test basic set and get operations."""
        cache = TableCache[str](max_entries=4)
        cache.set("key1", "value1")
        assert cache.get("key1") == "value1"

    def test_get_nonexistent_key(self):
        cache = TableCache[str](max_entries=4)
        assert cache.get("nonexistent") is None
        assert cache.misses == 1

    def test_least_recently_used_is_evicted(self):
        """Reading a key protects it from the next eviction."""
        cache = TableCache[int](max_entries=2)
        cache.set("a", 1)
        cache.set("b", 2)
        cache.get("a")
        cache.set("c", 3)
        assert cache.get("a") == 1
        assert cache.get("b") is None
        assert cache.get("c") == 3

    def test_delete(self):
        cache = TableCache[str](max_entries=4)
        cache.set("key1", "value1")
        assert cache.delete("key1") is True
        assert cache.get("key1") is None
        assert cache.delete("key1") is False

    def test_clear_resets_counters(self):
        cache = TableCache[str](max_entries=4)
        cache.set("key1", "value1")
        cache.get("key1")
        cache.clear()
        assert cache.size() == 0
        assert cache.hits == 0

    def test_get_or_set(self):
        """The factory runs once per key."""
        cache = TableCache[str](max_entries=4)
        call_count = 0

        def factory():
            nonlocal call_count
            call_count += 1
            return "computed_value"

        assert cache.get_or_set("key1", factory) == "computed_value"
        assert cache.get_or_set("key1", factory) == "computed_value"
        assert call_count == 1

    def test_arrays_become_read_only(self):
        """Shared tables cannot be modified through the cache."""
        cache = TableCache[tuple](max_entries=4)
        nodes, weights = np.arange(3.0), np.ones(3)
        cache.set("rule", (nodes, weights))
        stored_nodes, _ = cache.get("rule")
        with pytest.raises(ValueError):
            stored_nodes[0] = 1.0

    def test_concurrent_writers(self):
        cache = TableCache[int](max_entries=1000)

        def write(offset: int):
            for i in range(100):
                cache.set(f"{offset}:{i}", i)

        threads = [threading.Thread(target=write, args=(k,)) for k in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert cache.size() == 400


class TestCacheManager:
    """Tests for CacheManager class."""

    def test_singleton(self):
        assert CacheManager() is CacheManager()

    def test_get_cache(self):
        manager = CacheManager()
        assert manager.get_cache("test_cache") is manager.get_cache("test_cache")

    def test_default_capacities(self):
        manager = CacheManager()
        assert manager.get_cache("kernels").max_entries == CacheManager.DEFAULT_CAPACITIES["kernels"]

    def test_invalidate(self):
        manager = CacheManager()
        cache = manager.get_cache("invalidate_test")
        cache.set("key", 1)
        assert manager.invalidate("invalidate_test") is True
        assert cache.get("key") is None
        assert manager.invalidate("never_created") is False

    def test_stats(self):
        manager = CacheManager()
        cache = manager.get_cache("stats_test")
        cache.clear()
        cache.set("key", 1)
        cache.get("key")
        assert manager.stats()["stats_test"] == {"entries": 1, "hits": 1, "misses": 0}


class TestCachedDecorator:
    """Tests for the cached decorator."""

    def test_memoises_by_key(self):
        calls = []

        @cached("decorator_test", key_func=lambda n: f"square:{n}")
        def square(n: int) -> int:
            calls.append(n)
            return n * n

        CacheManager().invalidate("decorator_test")
        assert square(3) == 9
        assert square(3) == 9
        assert square(4) == 16
        assert calls == [3, 4]


def test_ordered_map_keeps_input_order():
    assert ordered_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]
