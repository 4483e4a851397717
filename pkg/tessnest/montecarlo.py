"""
Monte Carlo engine and statistics for tessnest.

Replicates of a nested tessellation are simulated over a ladder of window
scales, standardised with the theoretical moments, and tested for normality.
The module also estimates the simulated constants the planar formulas rely on.
"""

import asyncio
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .defaults import (
    BOOTSTRAP_RESAMPLES,
    EPSILON_SCALE,
    GUARD_MULTIPLIER,
    INNER_VARIANCE_CONSTANT,
    MAX_GUARD_DOUBLINGS,
    THREADS,
)
from .exceptions import ExactnessError, InvalidInputError
from .moments import (
    MomentReport,
    brakke_constant,
    pht_intensity,
    pht_sigma2,
    theory_moments,
    typical_cell_perimeter,
)
from .nesting import (
    ModelSpec,
    cell_crossing_count,
    component_edges_for_cell,
    line_length_in_disc,
    pair_intersections_in_disc,
    total_Z,
)
from .tessellate import (
    PlanarTessellation,
    SeedStream,
    TessellationKind,
    TessellationSpec,
    WindowShape,
    WindowSpec,
    cell_count_in,
    edge_length_in,
    poisson_line_tessellation,
    poisson_voronoi_tessellation,
    sample_isotropic_lines,
    typical_voronoi_cell,
)
from .utils import Metrics, timing_decorator

logger = logging.getLogger("tessnest")

KS_ALPHA = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One Monte Carlo experiment.

    Attributes:
        model: Initial and component tessellations
        windows: Window ladder, strictly increasing in rho
        replications: Replicates per ladder rung
        master_seed: Root of every seed path
        guard_multiplier: Voronoi guard in units of 1/sqrt(intensity)
        epsilon_scale: Tolerance relative to the window's outer radius
        threads: Worker processes (0 = one per CPU, 1 = inline)
        margin: PLT working-region margin around the window
        max_guard_doublings: Voronoi guard doublings before an exactness error
        record_timings: Put wall-clock milliseconds into the records
        bootstrap_resamples: Resamples for bootstrap intervals
    """

    model: ModelSpec
    windows: Tuple[WindowSpec, ...]
    replications: int
    master_seed: int
    guard_multiplier: float = GUARD_MULTIPLIER
    epsilon_scale: float = EPSILON_SCALE
    threads: int = THREADS
    margin: float = 0.0
    max_guard_doublings: int = MAX_GUARD_DOUBLINGS
    record_timings: bool = False
    bootstrap_resamples: int = BOOTSTRAP_RESAMPLES

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise InvalidInputError(f"replications must be positive, got {self.replications}", "replications")
        if not self.windows:
            raise InvalidInputError("window ladder is empty", "window.rho")
        rhos = [w.rho for w in self.windows]
        if any(b <= a for a, b in zip(rhos, rhos[1:])):
            raise InvalidInputError(f"rho ladder must be strictly increasing, got {rhos}", "window.rho")
        if not self.model.initial.intensity > 0.0:
            raise InvalidInputError("initial intensity must be positive", "model.initial.intensity")
        if not self.guard_multiplier > 0.0:
            raise InvalidInputError("guard multiplier must be positive", "guard_multiplier")
        if not self.epsilon_scale > 0.0:
            raise InvalidInputError("epsilon scale must be positive", "epsilon_scale")
        if self.threads < 0:
            raise InvalidInputError("threads must be non-negative", "threads")
        SeedStream(self.master_seed)

    @property
    def rhos(self) -> List[float]:
        return [w.rho for w in self.windows]


@dataclass(frozen=True)
class ReplicateRecord:
    replicate: int
    rho: float
    window_area: float
    z: int
    edge_length: float
    cell_count: int
    seed: int
    millis: float = 0.0

    COLUMNS = ("replicate", "rho", "window_area", "z", "edge_length", "cell_count", "seed", "millis")

    def as_row(self) -> List[str]:
        return [
            str(self.replicate),
            repr(float(self.rho)),
            repr(float(self.window_area)),
            str(self.z),
            repr(float(self.edge_length)),
            str(self.cell_count),
            str(self.seed),
            repr(float(self.millis)),
        ]


# workers


def simulate_initial(
    spec: TessellationSpec,
    window: WindowSpec,
    seeds: SeedStream,
    margin: float = 0.0,
    guard_multiplier: float = GUARD_MULTIPLIER,
    max_doublings: int = MAX_GUARD_DOUBLINGS,
    eps: float = 1e-9,
) -> PlanarTessellation:
    """Initial tessellation on the working region of ``window``."""
    if spec.kind is TessellationKind.PLT:
        region = window.working_region(margin)
        return poisson_line_tessellation(spec.intensity, region, seeds, eps)
    return poisson_voronoi_tessellation(
        spec.intensity, window.working_region(0.0), seeds, guard_multiplier, max_doublings, eps
    )


@timing_decorator
def run_replicate(
    config: ExperimentConfig, rung: int, replicate: int
) -> Tuple[ReplicateRecord, Dict[str, float]]:
    """
    Simulate one replicate at one ladder rung.

    Seeds: the initial tessellation draws from (rung, replicate, 0) and the
    component of cell i from (rung, replicate, 1, i).

    Returns:
        The record and the duration of each stage in seconds
    """
    spec = config.windows[rung]
    seeds = SeedStream(config.master_seed, (rung, replicate))
    eps = spec.eps(config.epsilon_scale)
    window = spec.window()
    durations: Dict[str, float] = {}

    start = time.perf_counter()
    tess = simulate_initial(
        config.model.initial,
        spec,
        seeds.child(0),
        config.margin,
        config.guard_multiplier,
        config.max_guard_doublings,
        eps,
    )
    durations["initial"] = time.perf_counter() - start

    mark = time.perf_counter()
    try:
        crossing = total_Z(
            tess,
            config.model,
            window,
            seeds.child(1),
            config.guard_multiplier,
            config.max_guard_doublings,
            eps,
        )
    except ExactnessError as e:
        raise ExactnessError(e.detail, cell=e.cell, replicate=replicate, rho=spec.rho) from e
    durations["nesting"] = time.perf_counter() - mark

    mark = time.perf_counter()
    edge_length = edge_length_in(tess, window, eps)
    cells = cell_count_in(tess, window, eps)
    durations["measure"] = time.perf_counter() - mark

    millis = (time.perf_counter() - start) * 1e3 if config.record_timings else 0.0
    record = ReplicateRecord(
        replicate=replicate,
        rho=spec.rho,
        window_area=spec.area,
        z=crossing.z_total,
        edge_length=edge_length,
        cell_count=cells,
        seed=seeds.seed,
        millis=millis,
    )
    return record, durations


class ReplicatePool:
    """
    Worker pool for replicate tasks.

    Tasks run in a process pool and come back in submission order, so results
    never depend on the number of workers. With one worker tasks run inline.

    Example:
        async with ReplicatePool(threads=4) as pool:
            results = await pool.map(run_replicate, [(config, 0, i) for i in range(10)])
    """

    def __init__(self, threads: int = THREADS):
        self.threads = threads if threads > 0 else (os.cpu_count() or 1)
        self._executor: Optional[ProcessPoolExecutor] = None

    async def start(self) -> None:
        if self.threads > 1 and self._executor is None:
            self._executor = ProcessPoolExecutor(max_workers=self.threads)
            logger.debug(f"replicate pool started with {self.threads} workers")

    async def stop(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None
            logger.debug("replicate pool stopped")

    async def __aenter__(self) -> "ReplicatePool":
        await self.start()
        return self

    async def __aexit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        await self.stop()

    async def map(self, fn: Callable[..., Any], tasks: Sequence[Tuple[Any, ...]]) -> List[Any]:
        if self._executor is None:
            return [fn(*args) for args in tasks]
        loop = asyncio.get_running_loop()
        futures = [loop.run_in_executor(self._executor, fn, *args) for args in tasks]
        return list(await asyncio.gather(*futures))


@timing_decorator
async def run_experiment_async(
    config: ExperimentConfig, metrics: Optional[Metrics] = None
) -> List[ReplicateRecord]:
    """Async form of ``run_experiment``."""
    metrics = metrics if metrics is not None else Metrics()
    tasks = [(config, rung, r) for rung in range(len(config.windows)) for r in range(config.replications)]
    logger.info(
        f"running {config.model}: {len(config.windows)} rungs x {config.replications} replicates"
    )
    async with ReplicatePool(config.threads) as pool:
        results = await pool.map(run_replicate, tasks)
    records = []
    for record, durations in results:
        metrics.record_all(durations)
        records.append(record)
    totals = {stage: round(s["total_time"], 3) for stage, s in metrics.get_stats()["stages"].items()}
    logger.info(f"finished {len(records)} replicates; stage seconds {totals}")
    return records


def run_experiment(config: ExperimentConfig, metrics: Optional[Metrics] = None) -> List[ReplicateRecord]:
    """
    Simulate every (rung, replicate) pair of the experiment.

    Records come back ordered by rung, then replicate, and are identical for
    any thread budget.

    Raises:
        ExactnessError: With the offending replicate and rho attached
    """
    return asyncio.run(run_experiment_async(config, metrics))


# statistics


@dataclass(frozen=True)
class SampleMoments:
    n: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float


def summarize(values: Sequence[float]) -> SampleMoments:
    """
    Single-pass mean, unbiased variance, skewness and excess kurtosis.

    Skewness and kurtosis are the plain moment ratios (g1, g2); they are NaN
    for fewer than 4 values or a constant sample.
    """
    n = 0
    mean = m2 = m3 = m4 = 0.0
    for x in values:
        x = float(x)
        if not math.isfinite(x):
            raise InvalidInputError(f"non-finite value {x}", "values")
        n1 = n
        n += 1
        delta = x - mean
        delta_n = delta / n
        delta_n2 = delta_n * delta_n
        term1 = delta * delta_n * n1
        mean += delta_n
        m4 += term1 * delta_n2 * (n * n - 3 * n + 3) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3
        m3 += term1 * delta_n * (n - 2) - 3.0 * delta_n * m2
        m2 += term1
    if n < 2:
        raise InvalidInputError(f"need at least 2 values, got {n}", "values")
    skew = kurt = float("nan")
    if n >= 4 and m2 > 0.0:
        skew = math.sqrt(n) * m3 / m2**1.5
        kurt = n * m4 / (m2 * m2) - 3.0
    return SampleMoments(n=n, mean=mean, variance=m2 / (n - 1), skewness=skew, excess_kurtosis=kurt)


def standardize_values(z: Sequence[float], areas: Sequence[float], report: MomentReport) -> np.ndarray:
    """(Z - mean_density * |W|) / |W|^norm_exponent, elementwise."""
    z_arr = np.asarray(z, dtype=float)
    a_arr = np.asarray(areas, dtype=float)
    if np.any(a_arr <= 0.0):
        raise InvalidInputError("window areas must be positive", "window_area")
    return (z_arr - report.mean_density * a_arr) / a_arr**report.norm_exponent


def standardize(records: Sequence[ReplicateRecord], report: MomentReport) -> np.ndarray:
    return standardize_values([r.z for r in records], [r.window_area for r in records], report)


@dataclass(frozen=True)
class HypothesisResult:
    statistic: float
    pvalue: float
    critical_value: Optional[float] = None

    def passed(self, alpha: float = KS_ALPHA) -> bool:
        return bool(self.pvalue >= alpha)


def _check_sample(sample: Sequence[float], minimum: int = 8) -> np.ndarray:
    arr = np.asarray(sample, dtype=float).ravel()
    if len(arr) < minimum:
        raise InvalidInputError(f"need at least {minimum} values, got {len(arr)}", "sample")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("sample contains non-finite values", "sample")
    return arr


def ks_critical_value(n: int, alpha: float = KS_ALPHA) -> float:
    """Asymptotic Kolmogorov critical value for D at level alpha."""
    if n < 1 or not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"bad arguments n={n}, alpha={alpha}", "ks")
    return float(stats.kstwobign.isf(alpha) / math.sqrt(n))


def ks_test(sample: Sequence[float], sigma2: float) -> HypothesisResult:
    """
    Kolmogorov-Smirnov test against the fully specified law N(0, sigma2).

    The p-value comes from the asymptotic Kolmogorov distribution of sqrt(n) D.
    """
    arr = _check_sample(sample)
    if not (sigma2 > 0.0 and math.isfinite(sigma2)):
        raise InvalidInputError(f"sigma2 must be positive, got {sigma2}", "sigma2")
    d = float(stats.kstest(arr, "norm", args=(0.0, math.sqrt(sigma2))).statistic)
    n = len(arr)
    p = float(stats.kstwobign.sf(d * math.sqrt(n)))
    return HypothesisResult(statistic=d, pvalue=p, critical_value=ks_critical_value(n))


def jarque_bera(sample: Sequence[float]) -> HypothesisResult:
    """JB = n (g1^2 / 6 + g2^2 / 24) with a chi-square(2) upper-tail p-value."""
    arr = _check_sample(sample)
    m = summarize(arr)
    if not m.variance > 0.0:
        raise InvalidInputError("sample is constant", "sample")
    jb = m.n * (m.skewness**2 / 6.0 + m.excess_kurtosis**2 / 24.0)
    return HypothesisResult(statistic=float(jb), pvalue=float(stats.chi2.sf(jb, 2)), critical_value=float(stats.chi2.isf(KS_ALPHA, 2)))


@dataclass(frozen=True)
class RateFit:
    slope: float
    stderr: float
    intercept: float


def variance_rate_fit(pairs: Sequence[Tuple[float, float]]) -> RateFit:
    """Least-squares slope of log(variance) against log(area)."""
    if len(pairs) < 3:
        raise InvalidInputError(f"need at least 3 ladder points, got {len(pairs)}", "pairs")
    areas = np.array([a for a, _ in pairs], dtype=float)
    variances = np.array([v for _, v in pairs], dtype=float)
    if np.any(variances <= 0.0) or np.any(areas <= 0.0):
        raise InvalidInputError("areas and variances must be positive", "pairs")
    fit = stats.linregress(np.log(areas), np.log(variances))
    return RateFit(slope=float(fit.slope), stderr=float(fit.stderr), intercept=float(fit.intercept))


def standardized_rate_fit(z: Sequence[float], areas: Sequence[float], report: MomentReport) -> RateFit:
    """
    Log-log slope of Var(standardised Z) against |W| over a window ladder.

    The slope is near 0 when ``report.norm_exponent`` matches the variance
    growth of the data and near 2 * (true exponent - norm_exponent) otherwise.

    Raises:
        InvalidInputError: Fewer than 3 window sizes or a size with one value
    """
    values = standardize_values(z, areas, report)
    a_arr = np.asarray(areas, dtype=float)
    pairs = []
    for area in np.unique(a_arr):
        group = values[a_arr == area]
        if len(group) < 2:
            raise InvalidInputError(f"window area {area:g} has fewer than 2 values", "areas")
        pairs.append((float(area), float(np.var(group, ddof=1))))
    return variance_rate_fit(pairs)


@dataclass(frozen=True)
class VarianceEstimate:
    """Unbiased variance divided by a normaliser, with a bootstrap interval."""

    value: float
    se: float
    ci_low: float
    ci_high: float


def variance_per_area(
    values: Sequence[float],
    normaliser: float,
    resamples: int = BOOTSTRAP_RESAMPLES,
    seed: int = 0,
    confidence: float = 0.95,
) -> VarianceEstimate:
    """Var(values) / normaliser with a percentile bootstrap interval."""
    arr = np.asarray(values, dtype=float)
    if len(arr) < 2:
        raise InvalidInputError(f"need at least 2 values, got {len(arr)}", "values")

    def statistic(x: np.ndarray, axis: int = -1) -> np.ndarray:
        return np.var(x, ddof=1, axis=axis) / normaliser

    value = float(np.var(arr, ddof=1) / normaliser)
    if value == 0.0:
        return VarianceEstimate(0.0, 0.0, 0.0, 0.0)
    res = stats.bootstrap(
        (arr,),
        statistic,
        n_resamples=resamples,
        confidence_level=confidence,
        method="percentile",
        rng=np.random.default_rng(seed),
    )
    return VarianceEstimate(
        value=value,
        se=float(res.standard_error),
        ci_low=float(res.confidence_interval.low),
        ci_high=float(res.confidence_interval.high),
    )


@dataclass(frozen=True)
class VarianceSplit:
    """
    Var Z split into the component term E Var(Z | X) and the facet term
    (lambda_0 m)^2 Var(edge length), all divided by |W|^(2 alpha).
    """

    total: float
    facet_term: float
    inner_term: float


def variance_decomposition(records: Sequence[ReplicateRecord], report: MomentReport) -> VarianceSplit:
    """Empirical variance decomposition of Z given the realised initial tessellation."""
    if len(records) < 2:
        raise InvalidInputError("need at least 2 records", "records")
    area = records[0].window_area
    norm = area ** (2.0 * report.norm_exponent)
    z = np.array([r.z for r in records], dtype=float)
    length = np.array([r.edge_length for r in records], dtype=float)
    total = float(np.var(z, ddof=1)) / norm
    facet = (report.component_section_intensity * report.m) ** 2 * float(np.var(length, ddof=1)) / norm
    return VarianceSplit(total=total, facet_term=facet, inner_term=total - facet)


@dataclass
class RungSummary:
    rho: float
    window_area: float
    n: int
    mean: float
    variance: float
    mean_density: float
    mean_density_se: float
    variance_ratio: float
    edge_density: float
    standardized: List[float]
    ks: Optional[HypothesisResult]
    jb: Optional[HypothesisResult]
    decomposition: Optional[VarianceSplit]
    mean_z_score: float
    variance_ci: Optional[VarianceEstimate] = None

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["ks_pass"] = self.ks.passed() if self.ks is not None else None
        out["jb_pass"] = self.jb.passed() if self.jb is not None else None
        return out


@dataclass
class RunSummary:
    model: str
    theory: MomentReport
    rungs: List[RungSummary]
    rate: Optional[RateFit] = None
    alpha: float = KS_ALPHA
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "alpha": self.alpha,
            "theory": self.theory.to_dict(),
            "rungs": [r.to_dict() for r in self.rungs],
            "rate": asdict(self.rate) if self.rate is not None else None,
            **self.extra,
        }


def group_by_rho(records: Sequence[ReplicateRecord]) -> Dict[float, List[ReplicateRecord]]:
    groups: Dict[float, List[ReplicateRecord]] = {}
    for r in records:
        groups.setdefault(r.rho, []).append(r)
    return dict(sorted(groups.items()))


def summarize_experiment(
    records: Sequence[ReplicateRecord],
    model: ModelSpec,
    brakke: Optional[float] = None,
    resamples: int = BOOTSTRAP_RESAMPLES,
    seed: int = 0,
) -> RunSummary:
    """
    Per-rung statistics, normality tests and the cross-rung variance-rate fit.

    The variance ratio of every rung gets a percentile bootstrap interval drawn
    from ``seed``, so summaries stay reproducible.
    """
    report = theory_moments(model, brakke=brakke)
    rungs: List[RungSummary] = []
    for rho, group in group_by_rho(records).items():
        area = group[0].window_area
        z = np.array([r.z for r in group], dtype=float)
        n = len(z)
        mean = float(z.mean())
        var = float(np.var(z, ddof=1)) if n > 1 else float("nan")
        std_sample = standardize(group, report)
        se = math.sqrt(var / n) / area if n > 1 else float("nan")
        ks = jb = None
        decomposition = None
        if n >= 8 and report.asym_variance > 0.0:
            ks = ks_test(std_sample, report.asym_variance)
            if var > 0.0:
                jb = jarque_bera(std_sample)
        variance_ci = None
        if n > 1:
            decomposition = variance_decomposition(group, report)
            variance_ci = variance_per_area(z, area ** (2.0 * report.norm_exponent), resamples, seed)
        rungs.append(
            RungSummary(
                rho=rho,
                window_area=area,
                n=n,
                mean=mean,
                variance=var,
                mean_density=mean / area,
                mean_density_se=se,
                variance_ratio=var / area ** (2.0 * report.norm_exponent) if n > 1 else float("nan"),
                edge_density=float(np.mean([r.edge_length for r in group])) / area,
                standardized=[float(v) for v in std_sample],
                ks=ks,
                jb=jb,
                decomposition=decomposition,
                mean_z_score=(mean / area - report.mean_density) / se if se and se > 0.0 else float("nan"),
                variance_ci=variance_ci,
            )
        )
    rate = None
    pairs = [(r.window_area, r.variance) for r in rungs if r.n > 1 and r.variance > 0.0]
    if len(pairs) >= 3:
        rate = variance_rate_fit(pairs)
    return RunSummary(model=str(model), theory=report, rungs=rungs, rate=rate)


# constants


@dataclass(frozen=True)
class ConstantEstimate:
    """A simulated constant next to its reference value."""

    name: str
    estimate: float
    se: float
    reference: float
    ci_low: float = float("nan")
    ci_high: float = float("nan")
    samples: int = 0
    # (rho, estimate) per ladder rung and the log-log growth of the raw variance
    ladder: Tuple[Tuple[float, float], ...] = ()
    growth_slope: float = float("nan")

    @property
    def deviation(self) -> float:
        return (self.estimate - self.reference) / self.reference

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["deviation"] = self.deviation
        return out


def estimate_brakke(
    rhos: Sequence[float],
    replications: int,
    seed: int,
    gamma: float = 1.0,
    shape: WindowShape = WindowShape.SQUARE,
    threads: int = THREADS,
    resamples: int = BOOTSTRAP_RESAMPLES,
) -> ConstantEstimate:
    """
    Var(edge length of a PVT in W) / |W| over a window ladder.

    The estimate and its bootstrap interval come from the largest rung. Every
    rung reports its own ratio in ``ladder``, and with 3 or more rungs
    ``growth_slope`` is the log-log slope of Var against |W|, which is 1 once
    the ratio has converged. The limit does not depend on gamma.
    """
    config = ExperimentConfig(
        model=ModelSpec(
            TessellationSpec(TessellationKind.PVT, gamma), TessellationSpec(TessellationKind.PLT, 0.0)
        ),
        windows=tuple(WindowSpec(shape, rho) for rho in rhos),
        replications=replications,
        master_seed=seed,
        threads=threads,
    )
    records = run_experiment(config)
    groups = group_by_rho(records)
    pairs = []
    ladder = []
    for rho, group in groups.items():
        area = group[0].window_area
        var = float(np.var([r.edge_length for r in group], ddof=1)) if len(group) > 1 else float("nan")
        pairs.append((area, var))
        ladder.append((rho, var / area))
    growth = float("nan")
    if len(pairs) >= 3 and all(v > 0.0 for _, v in pairs):
        growth = variance_rate_fit(pairs).slope
        logger.info(f"brakke ladder {ladder}; variance growth slope {growth:.3f}")

    top = groups[max(config.rhos)]
    area = top[0].window_area
    est = variance_per_area([r.edge_length for r in top], area, resamples, seed)
    return ConstantEstimate(
        name="brakke",
        estimate=est.value,
        se=est.se,
        reference=brakke_constant(),
        ci_low=est.ci_low,
        ci_high=est.ci_high,
        samples=len(top),
        ladder=tuple(ladder),
        growth_slope=growth,
    )


def _inner_variance_for_cell(
    seed: int, cell_index: int, inner: int, component: TessellationSpec, gamma: float
) -> float:
    seeds = SeedStream(seed, (cell_index,))
    cell = typical_voronoi_cell(gamma, seeds.child(0))
    counts = [
        cell_crossing_count(component_edges_for_cell(component, cell, seeds.child(1, m)), cell)
        for m in range(inner)
    ]
    return float(np.var(counts, ddof=1))


def estimate_inner_variance_constant(
    outer: int,
    inner: int,
    seed: int,
    component: Optional[TessellationSpec] = None,
    gamma: float = 1.0,
    threads: int = THREADS,
) -> ConstantEstimate:
    """
    E Var(boundary crossings of the typical PVT cell) over independent components.

    For each of ``outer`` typical cells the unbiased variance over ``inner``
    component copies is computed; the estimate is their average.
    """
    component = component or TessellationSpec(TessellationKind.PVT, 1.0)
    if outer < 2 or inner < 2:
        raise InvalidInputError(f"need outer >= 2 and inner >= 2, got {outer}, {inner}", "budget")

    async def collect() -> List[float]:
        async with ReplicatePool(threads) as pool:
            return await pool.map(
                _inner_variance_for_cell, [(seed, k, inner, component, gamma) for k in range(outer)]
            )

    variances = np.array(asyncio.run(collect()))
    if component.kind is TessellationKind.PLT:
        reference = 4.0 * component.intensity / math.pi * typical_cell_perimeter(gamma)
    else:
        reference = INNER_VARIANCE_CONSTANT
    return ConstantEstimate(
        name=f"inner_variance_{component.kind.value}",
        estimate=float(variances.mean()),
        se=float(variances.std(ddof=1) / math.sqrt(outer)),
        reference=reference,
        samples=outer,
    )


@dataclass(frozen=True)
class FlatEstimate:
    """Line-process functional in growing discs against its closed forms."""

    k: int
    rho: float
    mean_density: float
    mean_density_se: float
    intensity_theory: float
    variance_ratio: float
    variance_ratio_se: float
    sigma2_theory: float


def _flat_value(lam: float, rho: float, k: int, seeds: SeedStream) -> float:
    lines = sample_isotropic_lines(lam, rho, seeds)
    if k == 1:
        return line_length_in_disc(lines, rho)
    return float(pair_intersections_in_disc(lines, rho))


def estimate_flat_variance(
    lam: float, rho: float, replications: int, seed: int, k: int = 1, resamples: int = BOOTSTRAP_RESAMPLES
) -> FlatEstimate:
    """
    Line length (k=1) or pairwise intersection count (k=0) of a Poisson line
    process in B_rho: mean per area against lambda_{k,2} and variance over
    |B_rho|^(3/2) against sigma^2_{k,2}.
    """
    if k not in (0, 1):
        raise InvalidInputError(f"k must be 0 or 1, got {k}", "k")
    if replications < 2:
        raise InvalidInputError("need at least 2 replications", "replications")
    root = SeedStream(seed)
    values = np.array([_flat_value(lam, rho, k, root.child(r)) for r in range(replications)])
    area = math.pi * rho**2
    est = variance_per_area(values, area**1.5, resamples, seed)
    return FlatEstimate(
        k=k,
        rho=rho,
        mean_density=float(values.mean() / area),
        mean_density_se=float(values.std(ddof=1) / math.sqrt(replications) / area),
        intensity_theory=pht_intensity(lam, 2, k),
        variance_ratio=est.value,
        variance_ratio_se=est.se,
        sigma2_theory=pht_sigma2(lam, 2, k),
    )
