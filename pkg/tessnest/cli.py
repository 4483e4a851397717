"""
Command-line interface for tessnest.

Subcommands:
    moments      print the theoretical moment bundle of the configured model
    simulate     run the Monte Carlo experiment, write records CSV and summary JSON
    rate         fit the variance growth exponent over the window ladder
    standardize  standardise external (window_area, z) data under both normalisers
    constants    estimate the simulated planar constants

Exit codes: 0 success, 2 configuration or input error, 3 I/O error,
4 numerical or exactness error.
"""

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .defaults import (
    BOOTSTRAP_RESAMPLES,
    EPSILON_SCALE,
    GUARD_MULTIPLIER,
    MAX_GUARD_DOUBLINGS,
    THREADS,
)
from .exceptions import (
    ConfigError,
    DataFormatError,
    ExactnessError,
    GeometryError,
    InvalidInputError,
    UnsupportedModelError,
)
from .moments import MomentReport, theory_moments, typical_cell_perimeter
from .montecarlo import (
    ExperimentConfig,
    ReplicateRecord,
    estimate_brakke,
    estimate_flat_variance,
    estimate_inner_variance_constant,
    group_by_rho,
    ks_test,
    run_experiment,
    simulate_initial,
    standardize_values,
    standardized_rate_fit,
    summarize_experiment,
    variance_rate_fit,
)
from .nesting import ModelSpec
from .tessellate import (
    SeedStream,
    TessellationKind,
    TessellationSpec,
    WindowShape,
    WindowSpec,
    dump_tessellation,
    typical_cell_statistics,
)
from .utils import setup_logging

logger = logging.getLogger("tessnest")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

LONG_RANGE_THRESHOLD = 1.25
DEFAULT_LADDER = (10.0, 15.0, 20.0, 30.0)

# allowed config keys; None marks a leaf
_SCHEMA: Dict[str, Any] = {
    "model": {
        "initial": {"kind": None, "intensity": None},
        "component": {"kind": None, "intensity": None},
    },
    "window": {"shape": None, "rho": None, "margin": None},
    "replications": None,
    "seed": None,
    "guard_multiplier": None,
    "epsilon_scale": None,
    "threads": None,
    "max_guard_doublings": None,
    "record_timings": None,
    "bootstrap_resamples": None,
    "output": {"records_csv": None, "summary_json": None},
}


@dataclass(frozen=True)
class CliConfig:
    experiment: ExperimentConfig
    records_csv: Path
    summary_json: Path


def _check_keys(doc: Any, schema: Dict[str, Any], prefix: str = "") -> None:
    if not isinstance(doc, dict):
        raise ConfigError("expected a JSON object", prefix or None)
    for key, value in doc.items():
        path = f"{prefix}.{key}" if prefix else key
        if key not in schema:
            raise ConfigError("unknown key", path)
        if schema[key] is not None:
            _check_keys(value, schema[key], path)


def _get(doc: Dict[str, Any], path: str, default: Any = ...) -> Any:
    node: Any = doc
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is ...:
                raise ConfigError("missing required key", path)
            return default
        node = node[part]
    return node


def _number(doc: Dict[str, Any], path: str, default: Any = ..., positive: bool = True) -> float:
    value = _get(doc, path, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if positive and not value > 0:
        raise ConfigError(f"must be positive, got {value!r}", path)
    return float(value)


def _integer(doc: Dict[str, Any], path: str, default: Any = ..., minimum: int = 0) -> int:
    value = _get(doc, path, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", path)
    return value


def _tessellation(doc: Dict[str, Any], path: str) -> TessellationSpec:
    kind = _get(doc, f"{path}.kind")
    try:
        parsed = TessellationKind(kind)
    except ValueError:
        raise ConfigError(f"expected 'plt' or 'pvt', got {kind!r}", f"{path}.kind") from None
    return TessellationSpec(parsed, _number(doc, f"{path}.intensity"))


def parse_config(
    doc: Any,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    out: Optional[Path] = None,
) -> CliConfig:
    """
    Validate a config document and build the experiment from it.

    Args:
        doc: Parsed JSON document
        seed: --seed override
        threads: --threads override
        out: --out directory; output files are placed inside it

    Raises:
        ConfigError: Unknown, missing or invalid keys
    """
    _check_keys(doc, _SCHEMA)
    model = ModelSpec(_tessellation(doc, "model.initial"), _tessellation(doc, "model.component"))

    shape_name = _get(doc, "window.shape", "square")
    try:
        shape = WindowShape(shape_name)
    except ValueError:
        raise ConfigError(f"expected 'disc' or 'square', got {shape_name!r}", "window.shape") from None
    rhos = _get(doc, "window.rho", list(DEFAULT_LADDER))
    if isinstance(rhos, (int, float)) and not isinstance(rhos, bool):
        rhos = [rhos]
    if not isinstance(rhos, list) or not rhos:
        raise ConfigError("expected a non-empty array of positive numbers", "window.rho")
    for rho in rhos:
        if isinstance(rho, bool) or not isinstance(rho, (int, float)) or not rho > 0:
            raise ConfigError(f"expected positive numbers, got {rho!r}", "window.rho")
    if any(b <= a for a, b in zip(rhos, rhos[1:])):
        raise ConfigError("rho ladder must be strictly increasing", "window.rho")

    master_seed = seed if seed is not None else _integer(doc, "seed", 0)
    if not 0 <= master_seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer", "seed")
    record_timings = _get(doc, "record_timings", False)
    if not isinstance(record_timings, bool):
        raise ConfigError("expected true or false", "record_timings")

    experiment = ExperimentConfig(
        model=model,
        windows=tuple(WindowSpec(shape, float(rho)) for rho in rhos),
        replications=_integer(doc, "replications", 100, minimum=1),
        master_seed=master_seed,
        guard_multiplier=_number(doc, "guard_multiplier", GUARD_MULTIPLIER),
        epsilon_scale=_number(doc, "epsilon_scale", EPSILON_SCALE),
        threads=threads if threads is not None else _integer(doc, "threads", THREADS),
        margin=_number(doc, "window.margin", 0.0, positive=False),
        max_guard_doublings=_integer(doc, "max_guard_doublings", MAX_GUARD_DOUBLINGS),
        record_timings=record_timings,
        bootstrap_resamples=_integer(doc, "bootstrap_resamples", BOOTSTRAP_RESAMPLES, minimum=1),
    )
    if experiment.margin < 0.0:
        raise ConfigError("must be non-negative", "window.margin")

    records = Path(_get(doc, "output.records_csv", "records.csv"))
    summary = Path(_get(doc, "output.summary_json", "summary.json"))
    if out is not None:
        records = out / records.name
        summary = out / summary.name
    return CliConfig(experiment, records, summary)


def load_config(
    path: Path, seed: Optional[int] = None, threads: Optional[int] = None, out: Optional[Path] = None
) -> CliConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e}") from e
    return parse_config(doc, seed, threads, out)


# file formats


def write_records_csv(records: Sequence[ReplicateRecord], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ReplicateRecord.COLUMNS)
        for record in records:
            writer.writerow(record.as_row())


def read_records_csv(path: Path) -> List[ReplicateRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != ReplicateRecord.COLUMNS:
            raise DataFormatError(f"expected header {','.join(ReplicateRecord.COLUMNS)}", 1)
        records = []
        for row in reader:
            try:
                records.append(
                    ReplicateRecord(
                        replicate=int(row[0]),
                        rho=float(row[1]),
                        window_area=float(row[2]),
                        z=int(row[3]),
                        edge_length=float(row[4]),
                        cell_count=int(row[5]),
                        seed=int(row[6]),
                        millis=float(row[7]),
                    )
                )
            except (ValueError, IndexError) as e:
                raise DataFormatError(str(e), reader.line_num) from e
    return records


def read_external_sample(path: Path) -> Tuple[List[float], List[float]]:
    """
    Read (areas, z) lists from a CSV with ``window_area`` and ``z`` columns.

    Columns are selected by name, so both the two-column external format and
    the records CSV written by ``simulate`` are accepted.
    """
    areas: List[float] = []
    z: List[float] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataFormatError("file is empty", 1)
        names = [h.strip() for h in header]
        if "window_area" not in names or "z" not in names:
            raise DataFormatError("expected columns window_area and z", 1)
        i_area, i_z = names.index("window_area"), names.index("z")
        for row in reader:
            if not row:
                continue
            try:
                if len(row) != len(names):
                    raise ValueError(f"expected {len(names)} fields, got {len(row)}")
                area, value = float(row[i_area]), float(row[i_z])
            except ValueError as e:
                raise DataFormatError(str(e), reader.line_num) from e
            if not (area > 0.0 and math.isfinite(area)):
                raise DataFormatError(f"window_area must be positive, got {row[0]}", reader.line_num)
            if not (value >= 0.0 and math.isfinite(value)):
                raise DataFormatError(f"z must be non-negative, got {row[1]}", reader.line_num)
            areas.append(area)
            z.append(value)
    if not z:
        raise DataFormatError("no data rows")
    return areas, z


def _json_safe(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, (TessellationKind, WindowShape)):
        return obj.value
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(_json_safe(obj), sort_keys=True, indent=2) + "\n"


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# subcommands


def cmd_moments(cfg: CliConfig, as_json: bool = False) -> int:
    report = theory_moments(cfg.experiment.model)
    if as_json:
        sys.stdout.write(dumps_json(report.to_dict()))
        return EXIT_OK
    print(f"model: {report.model}")
    for key, value in report.to_dict().items():
        if key == "model":
            continue
        print(f"{key}: {value:.9g}")
    return EXIT_OK


def cmd_simulate(cfg: CliConfig, dump: Optional[Path] = None) -> int:
    exp = cfg.experiment
    records = run_experiment(exp)
    summary = summarize_experiment(
        records, exp.model, resamples=exp.bootstrap_resamples, seed=exp.master_seed
    )
    summary.extra.update(
        {
            "seed": exp.master_seed,
            "replications": exp.replications,
            "window_shape": exp.windows[0].shape.value,
        }
    )
    write_records_csv(records, cfg.records_csv)
    _write_text(cfg.summary_json, dumps_json(summary.to_dict()))
    for rung in summary.rungs:
        ks = f"KS D={rung.ks.statistic:.4f} p={rung.ks.pvalue:.3g}" if rung.ks else "KS n/a"
        print(
            f"rho={rung.rho:g} mean/area={rung.mean_density:.6g} "
            f"(theory {summary.theory.mean_density:.6g}) var ratio={rung.variance_ratio:.6g} "
            f"(theory {summary.theory.asym_variance:.6g}) {ks}"
        )
    if dump is not None:
        spec = exp.windows[0]
        tess = simulate_initial(
            exp.model.initial,
            spec,
            SeedStream(exp.master_seed, (0, 0)).child(0),
            exp.margin,
            exp.guard_multiplier,
            exp.max_guard_doublings,
            spec.eps(exp.epsilon_scale),
        )
        dump_tessellation(tess, dump)
    logger.info(f"wrote {cfg.records_csv} and {cfg.summary_json}")
    return EXIT_OK


def rate_from_records(records: Sequence[ReplicateRecord]) -> Dict[str, Any]:
    pairs = []
    for rho, group in group_by_rho(records).items():
        if len(group) < 2:
            raise InvalidInputError(f"rho {rho:g} has fewer than 2 replicates", "records")
        var = float(np.var([r.z for r in group], ddof=1))
        pairs.append((group[0].window_area, var))
    fit = variance_rate_fit(pairs)
    return {
        "slope": fit.slope,
        "stderr": fit.stderr,
        "classification": "LONG_RANGE" if fit.slope > LONG_RANGE_THRESHOLD else "SHORT_RANGE",
    }


def cmd_rate(cfg: Optional[CliConfig], records_path: Optional[Path] = None) -> int:
    if records_path is not None:
        records = read_records_csv(records_path)
    else:
        if cfg is None:
            raise ConfigError("rate needs --config or --records")
        records = run_experiment(cfg.experiment)
    result = rate_from_records(records)
    print(f"slope: {result['slope']:.9g}")
    print(f"stderr: {result['stderr']:.9g}")
    print(f"classification: {result['classification']}")
    return EXIT_OK


def _variance_slope(z: Sequence[float], areas: Sequence[float], report: MomentReport) -> Optional[float]:
    if len(set(float(a) for a in areas)) < 3:
        return None
    try:
        return standardized_rate_fit(z, areas, report).slope
    except InvalidInputError:
        return None


def standardize_report(areas: Sequence[float], z: Sequence[float], model: ModelSpec) -> Dict[str, Any]:
    """
    KS outcomes of the data under the long-range and the short-range normaliser.

    With 3 or more window sizes of at least 2 rows each, every normaliser also
    reports the log-log slope of Var(standardised Z) against |W|; the matching
    exponent gives a slope near 0.
    """
    if len(z) < 8:
        raise DataFormatError(f"need at least 8 rows, got {len(z)}")
    report = theory_moments(model)
    out: Dict[str, Any] = {"hypothesis": str(model), "n": len(z), "theory": report.to_dict()}
    results = {}
    for name, exponent in (("long_range", 1.0 - 1.0 / (2.0 * report.d)), ("short_range", 0.5)):
        normalised = replace(report, norm_exponent=exponent)
        values = standardize_values(z, areas, normalised)
        ks = ks_test(values, report.asym_variance)
        results[name] = {
            "norm_exponent": exponent,
            "ks_statistic": ks.statistic,
            "ks_pvalue": ks.pvalue,
            "critical_value": ks.critical_value,
            "pass": ks.passed(),
            "standardized": [float(v) for v in values],
            "variance_slope": _variance_slope(z, areas, normalised),
        }
    out["normalizations"] = results
    passing = [name for name, r in results.items() if r["pass"]]
    out["preferred"] = passing[0] if len(passing) == 1 else None
    return out


def cmd_standardize(cfg: CliConfig, data: Path) -> int:
    areas, z = read_external_sample(data)
    result = standardize_report(areas, z, cfg.experiment.model)
    sys.stdout.write(dumps_json(result))
    return EXIT_OK


def cmd_constants(args: argparse.Namespace, cfg: Optional[CliConfig]) -> int:
    seed = args.seed if args.seed is not None else (cfg.experiment.master_seed if cfg else 0)
    threads = args.threads if args.threads is not None else (cfg.experiment.threads if cfg else THREADS)
    result: Dict[str, Any]
    if args.which == "brakke":
        rhos = args.rho or [25.0]
        est = estimate_brakke(rhos, args.replications or 400, seed, threads=threads)
        result = est.to_dict()
    elif args.which == "inner-variance":
        component = TessellationSpec(TessellationKind(args.component), 1.0)
        est = estimate_inner_variance_constant(
            args.outer or 2000, args.inner or 200, seed, component=component, threads=threads
        )
        result = est.to_dict()
    elif args.which == "flat-variance":
        rho = (args.rho or [50.0])[-1]
        flat = estimate_flat_variance(1.0, rho, args.replications or 4000, seed, k=args.k)
        result = {
            "k": flat.k,
            "rho": flat.rho,
            "mean_density": flat.mean_density,
            "mean_density_se": flat.mean_density_se,
            "intensity_theory": flat.intensity_theory,
            "variance_ratio": flat.variance_ratio,
            "variance_ratio_se": flat.variance_ratio_se,
            "sigma2_theory": flat.sigma2_theory,
        }
    else:
        stats = typical_cell_statistics(1.0, args.replications or 10000, SeedStream(seed))
        result = {
            "samples": stats.samples,
            "mean_area": stats.mean_area,
            "mean_perimeter": stats.mean_perimeter,
            "mean_diameter": stats.mean_diameter,
            "mean_vertices": stats.mean_vertices,
            "se": stats.se,
            "reference": {"area": 1.0, "perimeter": typical_cell_perimeter(1.0), "vertices": 6.0},
        }
    sys.stdout.write(dumps_json(result))
    return EXIT_OK


# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment configuration")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--threads", type=int, help="worker processes, 0 = auto (overrides config)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="tessnest", description="Nested random tessellation laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="theoretical moments of the model")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")

    p = sub.add_parser("simulate", parents=[common], help="run the Monte Carlo experiment")
    p.add_argument("--dump", type=Path, help="write the first initial tessellation as text")

    p = sub.add_parser("rate", parents=[common], help="variance growth exponent")
    p.add_argument("--records", type=Path, help="fit from an existing records CSV")

    p = sub.add_parser("standardize", parents=[common], help="standardise external data")
    p.add_argument("--data", type=Path, required=True, help="CSV with window_area and z columns (records CSV accepted)")

    p = sub.add_parser("constants", parents=[common], help="estimate simulated constants")
    p.add_argument(
        "--which",
        choices=["brakke", "inner-variance", "flat-variance", "typical-cell"],
        default="brakke",
    )
    p.add_argument("--rho", type=float, nargs="+", help="window scale(s)")
    p.add_argument("--replications", type=int, help="replicates or samples")
    p.add_argument("--outer", type=int, help="typical cells (inner-variance)")
    p.add_argument("--inner", type=int, help="component copies per cell (inner-variance)")
    p.add_argument("--component", choices=["plt", "pvt"], default="pvt")
    p.add_argument("--k", type=int, choices=[0, 1], default=1, help="flat dimension (flat-variance)")
    return parser


def _load(args: argparse.Namespace, required: bool = True) -> Optional[CliConfig]:
    if args.config is None:
        if required:
            raise ConfigError("--config is required for this command")
        return None
    return load_config(args.config, args.seed, args.threads, args.out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.INFO)
    try:
        if args.command == "moments":
            return cmd_moments(_load(args), args.json)  # type: ignore[arg-type]
        if args.command == "simulate":
            return cmd_simulate(_load(args), args.dump)  # type: ignore[arg-type]
        if args.command == "rate":
            return cmd_rate(_load(args, required=args.records is None), args.records)
        if args.command == "standardize":
            return cmd_standardize(_load(args), args.data)  # type: ignore[arg-type]
        return cmd_constants(args, _load(args, required=False))
    except (ConfigError, DataFormatError, InvalidInputError, UnsupportedModelError) as e:
        logger.error(str(e))
        return EXIT_INPUT
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except (ExactnessError, GeometryError) as e:
        logger.error(str(e))
        return EXIT_NUMERIC
