import functools
import logging
import time
from typing import Callable

from ETGossip.exceptions import ConfigError, GossipError
from ETGossip.utils.time_format import readable_duration

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

SLOW_COMMAND_SECONDS = 60


def cli_guard(handler: Callable[..., None]) -> Callable[..., int]:
    """
    Map a subcommand's outcome to an exit status

    :param handler: The subcommand handler
    :return: Wrapped handler returning 0, 1 (config error) or 2 (runtime error)
    """
    @functools.wraps(handler)
    def wrapper(*args, **kwargs) -> int:
        try:
            handler(*args, **kwargs)
            return EXIT_OK
        except ConfigError as e:
            for problem in e.problems:
                logging.error(f"Config error: {problem}")
            return EXIT_CONFIG
        except KeyboardInterrupt:
            raise
        except GossipError as e:
            logging.error(f"{type(e).__name__}: {e}")
            return EXIT_RUNTIME
        except Exception as e:
            logging.exception(f"Unhandled exception in {handler.__name__}: {str(e)}")
            return EXIT_RUNTIME
    return wrapper


def timed(handler: Callable[..., None]) -> Callable[..., None]:
    """Log how long a subcommand took; warn when it is slow"""
    @functools.wraps(handler)
    def wrapper(*args, **kwargs):
        start_time = time.time()
        try:
            return handler(*args, **kwargs)
        finally:
            duration = time.time() - start_time
            if duration > SLOW_COMMAND_SECONDS:
                logging.warning(f"Slow command: {handler.__name__} took {readable_duration(duration)}")
            else:
                logging.info(f"{handler.__name__} finished in {readable_duration(duration)}")
    return wrapper
