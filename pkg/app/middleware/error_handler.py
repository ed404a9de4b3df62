"""
Error handling middleware.

Centralized translation of engine failures into process exit codes:
- 2: input errors (problem file, expressions, configuration)
- 3: internal verification failures and anything unexpected
"""

import sys
import traceback
from functools import wraps
from typing import Callable

from app.constants import EXIT_VERIFICATION_FAILURE
from app.exceptions import AppException, InputError, VerificationFailure
from app.utils.logger import logger


def _report(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def handle_errors(func: Callable[..., int]) -> Callable[..., int]:
    """
    Wrap a CLI command so every failure becomes an exit code.

    The wrapped command returns its own exit code on success (0 or 1,
    from the report verdict).

    Args:
        func: Command function returning an exit code

    Returns:
        Decorated function that never raises
    """
    @wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            return func(*args, **kwargs)

        except InputError as e:
            logger.warning(f"Input error: {e.message}")
            _report(e.message)
            return e.exit_code

        except VerificationFailure as e:
            logger.error(f"{e.message}")
            if e.details:
                logger.error(f"Details: {e.details}")
            _report(e.message)
            return e.exit_code

        except AppException as e:
            logger.error(f"Engine error: {e.message}")
            _report(e.message)
            return e.exit_code

        except Exception as e:
            logger.error(f"Unexpected error: {str(e)}")
            logger.error(f"Traceback:\n{traceback.format_exc()}")
            _report(f"unexpected internal error: {e}")
            return EXIT_VERIFICATION_FAILURE

    return wrapper
