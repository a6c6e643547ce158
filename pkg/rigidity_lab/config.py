"""Run configuration and environment settings for rigidity-lab."""

import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TypeVar, final

from dotenv import load_dotenv

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "RIGIDITY_LAB_THREADS"
SEED_ENV = "RIGIDITY_LAB_SEED"


def load_environment() -> None:
    """Load ``RIGIDITY_LAB_*`` settings from a ``.env`` file if one exists."""
    load_dotenv(override=False)


def get_thread_limit() -> int:
    """Get the thread cap for parallel evaluation.

    Returns:
        Value of RIGIDITY_LAB_THREADS, or min(8, cpu_count) when unset or invalid
    """
    default = min(8, os.cpu_count() or 1)
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(1, value)


def get_default_seed() -> int:
    """Get the default seed for sampled checks.

    Returns:
        Value of RIGIDITY_LAB_SEED, or 0
    """
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def parallel_map(
    func: Callable[[T], R], items: Sequence[T], threads: int | None = None
) -> list[R]:
    """Apply ``func`` to every item, in order, on a bounded thread pool.

    Args:
        func: Function applied to each item
        items: Work items
        threads: Thread cap (defaults to get_thread_limit())

    Returns:
        Results in input order
    """
    limit = threads if threads is not None else get_thread_limit()
    if limit <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(limit, len(items))) as pool:
        return list(pool.map(func, items))


@final
@dataclass
class RunConfig:
    """Parsed settings for a single CLI run."""

    subcommand: str
    inputs: dict[str, str] = field(default_factory=dict)
    tol: float | None = None
    margin: float = 0.01
    eps: float = 1.0
    samples: int = 10000
    seed: int = 0
    max_terms: int = 200
    grid: int = 64
    delta0: float | None = None
    verify: bool = False
    out: str | None = None
    verbose: bool = False
    table: bool = False
    family: str | None = None
    rank: int | None = None
    highest_weight: str | None = None
    epsilon_coords: bool = False
    transport: str = "stdio"
    name: str = "rigidity-lab"
