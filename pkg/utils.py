"""
Helper functions and utilities.
"""

import logging
import math
import re
from fractions import Fraction
from pathlib import Path
import time
import functools
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, List, Optional, Sequence

from tqdm import tqdm

from errors import SpinDomainError

_ANGLE_PATTERN = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$", re.IGNORECASE)


def setup_logging(log_level: str, log_file: Optional[Path] = None):
    """Configure logging for the application."""
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.insert(0, logging.FileHandler(log_file))
    logging.basicConfig(
        level=log_level.upper(),
        format="[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s",
        handlers=handlers,
        force=True,
    )
    # Suppress noisy logs from libraries
    logging.getLogger("filelock").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


def timer_decorator(func: Callable) -> Callable:
    """Decorator to measure and log the execution time of a function."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> Any:
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        end_time = time.perf_counter()
        run_time = end_time - start_time
        logging.getLogger(func.__module__).info(
            "Function '%s' executed in %.4f seconds", func.__name__, run_time
        )
        return result
    return wrapper


def parse_angle(token: Any) -> float:
    """Parse an angle in radians, accepting tokens such as ``pi``, ``pi/2`` or ``3pi/4``."""
    if isinstance(token, (int, float)):
        return float(token)
    text = str(token).strip()
    match = _ANGLE_PATTERN.match(text)
    if match:
        prefix, divisor = match.groups()
        if prefix in ("", "+"):
            factor = 1.0
        elif prefix == "-":
            factor = -1.0
        else:
            factor = float(prefix)
        value = factor * math.pi
        if divisor:
            value /= float(divisor)
        return value
    try:
        return float(text)
    except ValueError as exc:
        raise SpinDomainError(f"Cannot parse angle '{token}'") from exc


def parse_half_integer(token: Any) -> float:
    """Parse a (half-)integer such as ``1.5``, ``3/2`` or ``-1/2``."""
    try:
        value = Fraction(str(token).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SpinDomainError(f"Cannot parse half-integer '{token}'") from exc
    if (2 * value).denominator != 1:
        raise SpinDomainError(f"'{token}' is not a multiple of 1/2")
    return float(value)


def ordered_map(
    func: Callable[[Any], Any],
    items: Sequence[Any],
    max_workers: int,
    desc: str,
) -> List[Any]:
    """Run ``func`` over ``items`` in a thread pool and return results in submission order."""
    logger = logging.getLogger(__name__)
    results: List[Any] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {executor.submit(func, item): index for index, item in enumerate(items)}
        for future in tqdm(as_completed(future_to_index), total=len(items), desc=desc, leave=False):
            index = future_to_index[future]
            try:
                results[index] = future.result()
            except Exception as exc:  # pylint: disable=broad-except
                logger.error("Task %d of '%s' failed: %s", index, desc, exc, exc_info=True)
                raise
    return results
