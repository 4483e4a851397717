"""
Utility functions for tessnest.

This module provides helpers for logging, timing and per-stage run metrics.
"""

import functools
import inspect
import logging
import sys
import time
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, TypeVar

logger = logging.getLogger("tessnest")

F = TypeVar("F", bound=Callable[..., Any])

# worker processes of the replicate pool log under their own process name
LOG_FORMAT = "%(asctime)s %(levelname)-8s %(name)s [%(processName)s] %(message)s"


def setup_logging(level: int = logging.INFO) -> None:
    """
    Send tessnest log records to stderr, keeping stdout free for JSON reports.

    Args:
        level: Logging level (e.g., logging.DEBUG, logging.INFO)
    """
    # repeated calls (one per CLI invocation) replace the previous handler
    for old in [h for h in logger.handlers if getattr(h, "name", None) == "tessnest-stderr"]:
        logger.removeHandler(old)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name("tessnest-stderr")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)


def _log_elapsed(name: str, start: float, error: Optional[BaseException] = None) -> None:
    elapsed = time.perf_counter() - start
    if error is None:
        logger.debug(f"{name} took {elapsed:.3f}s")
    else:
        logger.error(f"{name} failed after {elapsed:.3f}s: {error}")


def timing_decorator(func: F) -> F:
    """
    Log the wall time of a simulation stage at DEBUG, or its failure at ERROR.

    Works on plain functions (replicates run inside pool workers) and on
    coroutines (the experiment driver).
    """
    name = func.__qualname__

    if inspect.iscoroutinefunction(func):

        @functools.wraps(func)
        async def timed_coroutine(*args: Any, **kwargs: Any) -> Any:
            start = time.perf_counter()
            try:
                result = await func(*args, **kwargs)
            except Exception as e:
                _log_elapsed(name, start, e)
                raise
            _log_elapsed(name, start)
            return result

        return timed_coroutine  # type: ignore

    @functools.wraps(func)
    def timed(*args: Any, **kwargs: Any) -> Any:
        start = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            _log_elapsed(name, start, e)
            raise
        _log_elapsed(name, start)
        return result

    return timed  # type: ignore


class Metrics:
    """Per-stage timing collector for a Monte Carlo run."""

    def __init__(self) -> None:
        self.stage_count: Dict[str, int] = {}
        self.stage_times: Dict[str, List[float]] = {}
        self.error_count: Dict[str, int] = {}
        self.start_time = datetime.now()

    def record(self, stage: str, duration: float, success: bool = True) -> None:
        """
        Record one execution of a pipeline stage.

        Args:
            stage: Stage name ("initial", "nesting", ...)
            duration: Stage duration in seconds
            success: Whether the stage completed
        """
        if stage not in self.stage_count:
            self.stage_count[stage] = 0
            self.stage_times[stage] = []
            self.error_count[stage] = 0

        self.stage_count[stage] += 1
        self.stage_times[stage].append(duration)

        if not success:
            self.error_count[stage] += 1

    def record_all(self, durations: Dict[str, float]) -> None:
        """Record a batch of stage durations reported by one replicate."""
        for stage, duration in durations.items():
            self.record(stage, duration)

    def get_stats(self, stage: Optional[str] = None) -> Dict[str, Any]:
        """
        Get statistics for recorded stages.

        Args:
            stage: Specific stage to get stats for, or None for all stages

        Returns:
            Dictionary containing timing statistics
        """
        if stage:
            if stage not in self.stage_count:
                return {"error": f"No data for stage {stage}"}

            times = self.stage_times[stage]
            return {
                "stage": stage,
                "runs": self.stage_count[stage],
                "errors": self.error_count[stage],
                "avg_time": sum(times) / len(times) if times else 0,
                "min_time": min(times) if times else 0,
                "max_time": max(times) if times else 0,
                "total_time": sum(times),
            }

        uptime = (datetime.now() - self.start_time).total_seconds()
        return {
            "uptime_seconds": uptime,
            "total_runs": sum(self.stage_count.values()),
            "total_errors": sum(self.error_count.values()),
            "stages": {s: self.get_stats(s) for s in self.stage_count.keys()},
        }

    def reset(self) -> None:
        """Reset all metrics."""
        self.stage_count.clear()
        self.stage_times.clear()
        self.error_count.clear()
        self.start_time = datetime.now()
