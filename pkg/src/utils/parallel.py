"""
Deterministic ordered parallel map.

Work items are independent; results come back in submission order so
every aggregate is independent of the worker count.
"""

import concurrent.futures
import logging
import multiprocessing
from typing import Callable, List, Optional, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]


def ordered_map(
    func: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    progress: Optional[ProgressCallback] = None,
) -> List[R]:
    """
    Apply `func` to every item, possibly in worker processes.

    Args:
        func: Module-level (picklable) function
        items: Work items
        workers: Process count; 1 runs in-process
        progress: Optional callback(done, total)

    Returns:
        Results in the order of `items`
    """
    total = len(items)
    if workers <= 1 or total <= 1:
        results = []
        for done, item in enumerate(items, 1):
            results.append(func(item))
            if progress:
                progress(done, total)
        return results

    by_index = {}
    context = multiprocessing.get_context()
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers, mp_context=context) as executor:
        futures = {executor.submit(func, item): idx for idx, item in enumerate(items)}
        for done, future in enumerate(concurrent.futures.as_completed(futures), 1):
            by_index[futures[future]] = future.result()
            if progress:
                progress(done, total)

    logger.debug("Parallel map finished", extra={"items": total, "workers": workers})
    return [by_index[idx] for idx in range(total)]
