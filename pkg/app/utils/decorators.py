"""
Utility decorators shared by the services and controllers.

- retry: re-run a randomized decision when its sample set was unlucky
- log_execution: pipeline stage timing, mirrored into the report
- memoize: cache for pure functions of hashable arguments
"""

import time
import functools
from typing import Callable, Type, Tuple
from app.utils.logger import logger


def retry(
    max_attempts: int = 3,
    exceptions: Tuple[Type[Exception], ...] = (Exception,)
) -> Callable:
    """
    Re-invoke a function when it raises one of ``exceptions``.

    There is no delay between attempts: the callers retry because the
    random generator they were handed has moved on, not because an
    outside resource needs time to recover.

    Example:
        @retry(max_attempts=3, exceptions=(DegeneratePointSet,))
        def decide(rng):
            return sample_and_solve(rng)

    Raises:
        The last exception once ``max_attempts`` calls have failed
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            attempt = 1
            while True:
                try:
                    return func(*args, **kwargs)
                except exceptions as e:
                    if attempt >= max_attempts:
                        logger.error(f"{func.__name__} gave up after {attempt} attempts: {e}")
                        raise
                    logger.warning(f"{func.__name__} attempt {attempt}/{max_attempts}: {e}; re-sampling")
                    attempt += 1

        return wrapper
    return decorator


def log_execution(func: Callable) -> Callable:
    """
    Log how long a pipeline stage took.

    Methods whose owner has a ``timings`` dict also get the elapsed
    seconds recorded there under the method name.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        stage = func.__name__
        owner = args[0] if args else None
        logger.debug(f"Stage {stage} started")
        start = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{stage} failed after {time.perf_counter() - start:.2f}s: {e}")
            raise

        elapsed = time.perf_counter() - start
        logger.info(f"{stage} completed in {elapsed:.2f}s")
        timings = getattr(owner, 'timings', None)
        if isinstance(timings, dict):
            timings[stage] = elapsed
        return result

    return wrapper


def memoize(func: Callable) -> Callable:
    """Cache results by positional arguments; exposes ``cache_clear``."""
    cache = {}

    @functools.wraps(func)
    def wrapper(*args):
        try:
            return cache[args]
        except KeyError:
            value = cache[args] = func(*args)
            return value

    wrapper.cache_clear = cache.clear
    return wrapper
