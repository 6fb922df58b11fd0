from qcurv import cache
from qcurv.sphere import build_grid


def test_cache_clear():
    cache.clear()
    assert len(cache.LRU_CACHE.keys()) == 0


def test_cache_size():
    # NOTE: should come *after* the function that clears the cache
    _ = build_grid(3, 32, True)
    assert cache.LRU_CACHE.currsize >= 65 * 5 * 8


def test_cache_hit():
    first = build_grid(2, 8, False)
    assert build_grid(2, 8, False) is first
    cache.clear()
    assert build_grid(2, 8, False) is not first
