#!/usr/bin/env python3
"""
Performance test for the nesting pipeline

Measures single-process cost per replicate and pool throughput:
- Initial tessellation construction (PLT and PVT)
- Crossing count Z for each supported model
- Replicates per second for several worker counts
"""

import os
import statistics
import time
from datetime import datetime

# Clean import approach with fallback
try:
    # When running as module: python -m benchmarks.perf_nesting
    from tessnest import ModelSpec, TessellationKind, TessellationSpec
    from tessnest.montecarlo import ExperimentConfig, run_experiment, simulate_initial
    from tessnest.nesting import total_Z
    from tessnest.tessellate import SeedStream, WindowShape, WindowSpec
    from config import PERF_TEST_ITERATIONS, PERF_TEST_RHO, PERF_TEST_WARMUP
except ImportError:
    # Fallback for direct execution: python benchmarks/perf_nesting.py
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent.parent))
    from tessnest import ModelSpec, TessellationKind, TessellationSpec
    from tessnest.montecarlo import ExperimentConfig, run_experiment, simulate_initial
    from tessnest.nesting import total_Z
    from tessnest.tessellate import SeedStream, WindowShape, WindowSpec
    from config import PERF_TEST_ITERATIONS, PERF_TEST_RHO, PERF_TEST_WARMUP

PLT1 = TessellationSpec(TessellationKind.PLT, 1.0)
PVT1 = TessellationSpec(TessellationKind.PVT, 1.0)


def measure_latency(fn, *args, iterations=PERF_TEST_ITERATIONS, **kwargs):
    """Measure call latency; the i-th call receives seed path (i,)"""
    latencies = []

    # Warmup
    for i in range(PERF_TEST_WARMUP):
        fn(SeedStream(0, (10_000 + i,)), *args, **kwargs)

    for i in range(iterations):
        start = time.perf_counter()
        fn(SeedStream(0, (i,)), *args, **kwargs)
        end = time.perf_counter()
        latencies.append((end - start) * 1000)  # Convert to ms

    ordered = sorted(latencies)
    return {
        "min": ordered[0],
        "max": ordered[-1],
        "mean": statistics.mean(latencies),
        "median": statistics.median(latencies),
        "stdev": statistics.stdev(latencies) if len(latencies) > 1 else 0,
        "p95": ordered[int(len(ordered) * 0.95)],
    }


def build_initial(seeds, spec, window):
    return simulate_initial(spec, window, seeds)


def build_and_count(seeds, model, window):
    tess = simulate_initial(model.initial, window, seeds.child(0))
    return total_Z(tess, model, window.window(), seeds.child(1))


def main():
    print("=" * 60)
    print("Nesting Performance Test")
    print(f"Time: {datetime.now()}")
    print(f"PID: {os.getpid()}  CPUs: {os.cpu_count()}")
    print("=" * 60)

    window = WindowSpec(WindowShape.SQUARE, PERF_TEST_RHO)

    print(f"\n1. Initial tessellation (square, rho={PERF_TEST_RHO:g})")
    print("-" * 40)
    for spec in (PLT1, PVT1):
        stats = measure_latency(build_initial, spec, window)
        print(
            f"{spec}: {stats['mean']:7.2f}ms avg "
            f"(min:{stats['min']:.2f} max:{stats['max']:.2f} p95:{stats['p95']:.2f})"
        )

    print(f"\n2. Replicate (initial + Z, rho={PERF_TEST_RHO:g})")
    print("-" * 40)
    for model in (ModelSpec(PVT1, PLT1), ModelSpec(PVT1, PVT1), ModelSpec(PLT1, PLT1)):
        stats = measure_latency(build_and_count, model, window)
        print(
            f"{str(model):14s}: {stats['mean']:7.2f}ms avg "
            f"(median:{stats['median']:.2f} stdev:{stats['stdev']:.2f})"
        )

    print("\n3. Pool throughput (PVT(1)/PVT(1), 2 rungs)")
    print("-" * 40)
    for threads in (1, 2, 4, os.cpu_count() or 1):
        config = ExperimentConfig(
            model=ModelSpec(PVT1, PVT1),
            windows=(WindowSpec(WindowShape.SQUARE, PERF_TEST_RHO / 2), window),
            replications=PERF_TEST_ITERATIONS,
            master_seed=0,
            threads=threads,
        )
        start = time.perf_counter()
        records = run_experiment(config)
        elapsed = time.perf_counter() - start
        print(f"threads={threads:2d}: {len(records) / elapsed:7.1f} replicates/s ({elapsed:.2f}s)")

    print("\n" + "=" * 60)
    print("✓ Performance test complete")


if __name__ == "__main__":
    main()
