from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import contextmanager
from typing import Iterator
import logging

logger = logging.getLogger(__name__)


class InlineExecutor(Executor):
    """Runs submitted work in the calling thread; used when WORKERS is 1."""

    def map(self, fn, *iterables, timeout=None, chunksize=1):
        return map(fn, *iterables)

    def shutdown(self, wait=True, *, cancel_futures=False):
        pass


@contextmanager
def get_executor(workers: int = 1) -> Iterator[Executor]:
    """Get an executor sized for ``workers``; results must be merged by the caller in key order."""
    if workers <= 1:
        yield InlineExecutor()
        return

    logger.info("Starting process pool with %d workers", workers)
    executor = ProcessPoolExecutor(max_workers=workers)
    try:
        yield executor
    finally:
        executor.shutdown(wait=True)
        logger.debug("Process pool shut down")
