"""
Configuration file for the tessnest test suite and benchmarks
"""

import os
from typing import List

# Seeds
TEST_SEED: int = int(os.getenv("TESSNEST_TEST_SEED", "20240611"))

# Monte Carlo budgets of the fast suite
TEST_REPLICATIONS: int = int(os.getenv("TESSNEST_TEST_REPLICATIONS", "200"))
TEST_ORACLE_CASES: int = int(os.getenv("TESSNEST_TEST_ORACLE_CASES", "1000"))

# Standard-error band applied to Monte Carlo assertions
TEST_SE_BAND: float = float(os.getenv("TESSNEST_TEST_SE_BAND", "4.0"))

# Thread budgets compared by the determinism tests
TEST_THREAD_BUDGETS: List[int] = [
    int(t) for t in os.getenv("TESSNEST_TEST_THREADS", "1,4").split(",")
]

# Performance test settings
PERF_TEST_ITERATIONS: int = int(os.getenv("PERF_TEST_ITERATIONS", "20"))
PERF_TEST_WARMUP: int = int(os.getenv("PERF_TEST_WARMUP", "3"))
PERF_TEST_RHO: float = float(os.getenv("PERF_TEST_RHO", "10"))
