"""Small shared runtime helpers (threading cap, hashing)."""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor

TOOL_NAME = "nilforge"


def thread_count() -> int:
    """Parallelism cap from NILFORGE_THREADS (default 1)."""
    raw = os.environ.get("NILFORGE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, items):
    """Deterministic map, fanned out over threads when the cap allows."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    with open(path, "rb") as fh:
        return sha256_bytes(fh.read())
