"""
Tests for logging setup, the timing decorator and run metrics.
"""

import inspect
import logging
import sys

import pytest

from tessnest.utils import LOG_FORMAT, Metrics, setup_logging, timing_decorator


def test_setup_logging_replaces_handler():
    """Test 1: Repeated setup keeps one stream handler"""
    logger = logging.getLogger("tessnest")
    setup_logging(logging.DEBUG)
    setup_logging(logging.INFO)
    streams = [h for h in logger.handlers if h.get_name() == "tessnest-stderr"]
    assert len(streams) == 1
    assert streams[0].stream is sys.stderr
    assert streams[0].formatter._fmt == LOG_FORMAT
    assert "%(processName)s" in LOG_FORMAT
    assert logger.level == logging.INFO


def test_timing_decorator_sync(caplog):
    """Test 2: Sync calls log their duration and failures"""

    @timing_decorator
    def square(x):
        return x * x

    @timing_decorator
    def broken():
        raise RuntimeError("boom")

    with caplog.at_level(logging.DEBUG, logger="tessnest"):
        assert square(3) == 9
        with pytest.raises(RuntimeError):
            broken()
    assert any("square took" in r.message for r in caplog.records)
    assert any(r.levelno == logging.ERROR and "broken failed" in r.message for r in caplog.records)
    assert square.__name__ == "square"


@pytest.mark.asyncio
async def test_timing_decorator_async(caplog):
    """Test 3: Coroutines keep their async nature"""

    @timing_decorator
    async def double(x):
        return 2 * x

    with caplog.at_level(logging.DEBUG, logger="tessnest"):
        assert await double(4) == 8
    assert any("double took" in r.message for r in caplog.records)
    assert inspect.iscoroutinefunction(double)


def test_metrics_stages():
    """Test 4: Per-stage counts, errors and totals"""
    metrics = Metrics()
    metrics.record_all({"initial": 0.5, "nesting": 1.0})
    metrics.record_all({"initial": 1.5, "nesting": 2.0})
    metrics.record("measure", 0.1, success=False)
    stats = metrics.get_stats()
    assert stats["total_runs"] == 5
    assert stats["total_errors"] == 1
    initial = metrics.get_stats("initial")
    assert initial["runs"] == 2
    assert initial["avg_time"] == pytest.approx(1.0)
    assert initial["max_time"] == pytest.approx(1.5)
    assert "error" in metrics.get_stats("missing")
    metrics.reset()
    assert metrics.get_stats()["total_runs"] == 0
