"""
Tests for the command-line interface: config parsing, output files and exit codes.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from config import TEST_SEED
from tessnest import cli
from tessnest.cli import (
    DEFAULT_LADDER,
    EXIT_INPUT,
    EXIT_IO,
    EXIT_NUMERIC,
    EXIT_OK,
    main,
    parse_config,
    rate_from_records,
    read_external_sample,
    read_records_csv,
    standardize_report,
    write_records_csv,
)
from tessnest.exceptions import ConfigError, DataFormatError, ExactnessError
from tessnest.moments import theory_moments
from tessnest.montecarlo import ReplicateRecord, standardize
from tessnest.nesting import ModelSpec
from tessnest.tessellate import TessellationKind, TessellationSpec, WindowShape

PVT_PLT_DOC = {
    "model": {
        "initial": {"kind": "pvt", "intensity": 1.0},
        "component": {"kind": "plt", "intensity": 1.0},
    }
}


def _write_config(tmp_path: Path, doc: dict, name: str = "config.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def _small_doc(tmp_path: Path) -> dict:
    return {
        **PVT_PLT_DOC,
        "window": {"shape": "square", "rho": [3, 4, 5]},
        "replications": 8,
        "seed": TEST_SEED,
        "threads": 1,
        "bootstrap_resamples": 100,
        "output": {
            "records_csv": str(tmp_path / "records.csv"),
            "summary_json": str(tmp_path / "summary.json"),
        },
    }


def _pair_records(spreads):
    records = []
    for rho, d in spreads:
        for i, z in enumerate((1000 - d, 1000 + d)):
            records.append(
                ReplicateRecord(replicate=i, rho=rho, window_area=4.0 * rho**2, z=z, edge_length=0.0, cell_count=0, seed=0)
            )
    return records


def test_parse_config_defaults():
    """Test 1: Missing optional keys take their defaults"""
    cfg = parse_config(PVT_PLT_DOC)
    exp = cfg.experiment
    assert exp.rhos == list(DEFAULT_LADDER)
    assert exp.replications == 100
    assert exp.master_seed == 0
    assert all(w.shape is WindowShape.SQUARE for w in exp.windows)
    assert exp.model.initial == TessellationSpec(TessellationKind.PVT, 1.0)
    assert cfg.records_csv == Path("records.csv")


def test_parse_config_overrides(tmp_path):
    """Test 2: Scalar rho, command-line overrides and the output directory"""
    doc = {**PVT_PLT_DOC, "window": {"shape": "disc", "rho": 7}, "seed": 3, "threads": 2}
    cfg = parse_config(doc, seed=11, threads=1, out=tmp_path)
    assert cfg.experiment.rhos == [7.0]
    assert cfg.experiment.windows[0].shape is WindowShape.DISC
    assert cfg.experiment.master_seed == 11
    assert cfg.experiment.threads == 1
    assert cfg.records_csv == tmp_path / "records.csv"
    assert cfg.summary_json == tmp_path / "summary.json"


@pytest.mark.parametrize(
    "patch, key",
    [
        ({"colour": "red"}, "colour"),
        ({"window": {"rho": [3], "size": 2}}, "window.size"),
        ({"window": {"rho": [5, 4]}}, "window.rho"),
        ({"window": {"rho": [0]}}, "window.rho"),
        ({"window": {"shape": "hexagon"}}, "window.shape"),
        ({"replications": 0}, "replications"),
        ({"replications": True}, "replications"),
        ({"seed": -1}, "seed"),
        ({"record_timings": "yes"}, "record_timings"),
        ({"model": {"initial": {"kind": "pht", "intensity": 1.0}, "component": {"kind": "plt", "intensity": 1.0}}}, "model.initial.kind"),
        ({"model": {"initial": {"kind": "pvt", "intensity": 0}, "component": {"kind": "plt", "intensity": 1.0}}}, "model.initial.intensity"),
        ({"model": {"initial": {"kind": "pvt", "intensity": 1.0}}}, "model.component.kind"),
    ],
)
def test_parse_config_rejects(patch, key):
    """Test 3: Invalid documents name the offending key"""
    with pytest.raises(ConfigError) as info:
        parse_config({**PVT_PLT_DOC, **patch})
    assert info.value.key == key


def test_moments_output(tmp_path, capsys):
    """Test 4: moments prints the mean density to nine significant digits"""
    config = _write_config(tmp_path, PVT_PLT_DOC)
    assert main(["moments", "--config", str(config)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "model: PVT(1)/PLT(1)"
    assert "mean_density: 2.54647909" in lines

    assert main(["moments", "--config", str(config), "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["norm_exponent"] == 0.5


def test_simulate_is_reproducible(tmp_path, capsys):
    """Test 5: simulate writes LF-terminated records that reruns reproduce byte for byte"""
    config = _write_config(tmp_path, _small_doc(tmp_path))
    dump = tmp_path / "tess.txt"
    assert main(["simulate", "--config", str(config), "--dump", str(dump)]) == EXIT_OK
    first = (tmp_path / "records.csv").read_bytes()
    assert b"\r" not in first
    assert first.splitlines()[0] == b"replicate,rho,window_area,z,edge_length,cell_count,seed,millis"
    assert len(first.splitlines()) == 1 + 3 * 8
    assert dump.exists()
    out = capsys.readouterr().out
    assert out.count("rho=") == 3

    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert summary["model"] == "PVT(1)/PLT(1)"
    assert summary["seed"] == TEST_SEED
    assert summary["window_shape"] == "square"
    assert len(summary["rungs"]) == 3
    assert summary["rate"] is not None

    first_summary = (tmp_path / "summary.json").read_bytes()
    assert main(["simulate", "--config", str(config)]) == EXIT_OK
    assert (tmp_path / "records.csv").read_bytes() == first
    assert (tmp_path / "summary.json").read_bytes() == first_summary

    records = read_records_csv(tmp_path / "records.csv")
    assert len(records) == 24
    assert records[0].window_area == 36.0


def test_rate_classification(tmp_path, capsys):
    """Test 6: Slopes above the threshold classify as long range"""
    areas = [100.0, 400.0, 1600.0]
    short = rate_from_records(_pair_records([(5.0, 10), (10.0, 20), (20.0, 40)]))
    assert short["slope"] == pytest.approx(1.0, abs=1e-10)
    assert short["classification"] == "SHORT_RANGE"
    spreads = [(rho, int(round(a**0.75))) for rho, a in zip((5.0, 10.0, 20.0), areas)]
    long_range = rate_from_records(_pair_records(spreads))
    assert long_range["slope"] == pytest.approx(1.5, abs=0.01)
    assert long_range["classification"] == "LONG_RANGE"

    path = tmp_path / "records.csv"
    write_records_csv(_pair_records(spreads), path)
    assert main(["rate", "--records", str(path)]) == EXIT_OK
    assert "classification: LONG_RANGE" in capsys.readouterr().out


def test_standardize_matches_records(tmp_path, capsys):
    """Test 7: The records CSV standardises directly, exactly like the records"""
    config = _write_config(tmp_path, _small_doc(tmp_path))
    assert main(["simulate", "--config", str(config)]) == EXIT_OK
    records_csv = tmp_path / "records.csv"
    records = read_records_csv(records_csv)

    areas, z = read_external_sample(records_csv)
    assert areas == [r.window_area for r in records]
    assert z == [float(r.z) for r in records]
    model = ModelSpec(TessellationSpec(TessellationKind.PVT, 1.0), TessellationSpec(TessellationKind.PLT, 1.0))
    result = standardize_report(areas, z, model)
    expected = standardize(records, theory_moments(model))
    short = result["normalizations"]["short_range"]
    assert short["norm_exponent"] == 0.5
    assert np.allclose(short["standardized"], expected, rtol=0.0, atol=1e-12)
    assert result["normalizations"]["long_range"]["norm_exponent"] == pytest.approx(0.75)
    assert result["n"] == 24

    # the two-column form and the records CSV give the same report
    data = tmp_path / "external.csv"
    lines = ["z,window_area"] + [f"{r.z},{r.window_area!r}" for r in records]
    data.write_text("\n".join(lines) + "\n", encoding="utf-8")
    capsys.readouterr()
    assert main(["standardize", "--config", str(config), "--data", str(data)]) == EXIT_OK
    from_external = json.loads(capsys.readouterr().out)
    assert main(["standardize", "--config", str(config), "--data", str(records_csv)]) == EXIT_OK
    from_records = json.loads(capsys.readouterr().out)
    assert from_external == from_records


def test_standardize_rejects_constant_column(tmp_path, capsys):
    """Test 8: z equal to its expectation fails the KS check under both normalisers"""
    config = _write_config(tmp_path, PVT_PLT_DOC)
    mean_density = 8.0 / np.pi
    areas = [100.0 * (i + 1) for i in range(20)]
    data = tmp_path / "constant.csv"
    data.write_text(
        "window_area,z\n" + "".join(f"{a!r},{mean_density * a!r}\n" for a in areas), encoding="utf-8"
    )
    assert main(["standardize", "--config", str(config), "--data", str(data)]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["normalizations"]["short_range"]["pass"] is False
    assert result["normalizations"]["long_range"]["pass"] is False
    assert result["preferred"] is None
    # one row per window size leaves no variance to fit
    assert result["normalizations"]["long_range"]["variance_slope"] is None


def test_standardize_reports_variance_slope(tmp_path, capsys):
    """Test 8b: The variance slope is flat under the matching normaliser only"""
    doc = {"model": {"initial": {"kind": "plt", "intensity": 1.0}, "component": {"kind": "plt", "intensity": 1.0}}}
    config = _write_config(tmp_path, doc)
    report = theory_moments(ModelSpec(TessellationSpec(TessellationKind.PLT, 1.0), TessellationSpec(TessellationKind.PLT, 1.0)))
    rng = np.random.default_rng(TEST_SEED)
    rows = []
    for area in (100.0, 400.0, 1600.0, 6400.0):
        noise = rng.normal(0.0, np.sqrt(report.asym_variance), 200) * area**0.75
        rows += [f"{area!r},{report.mean_density * area + e!r}" for e in noise]
    data = tmp_path / "ladder.csv"
    data.write_text("window_area,z\n" + "\n".join(rows) + "\n", encoding="utf-8")
    assert main(["standardize", "--config", str(config), "--data", str(data)]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert abs(result["normalizations"]["long_range"]["variance_slope"]) < 0.15
    assert result["normalizations"]["short_range"]["variance_slope"] > 0.3


def test_external_sample_validation(tmp_path):
    """Test 9: Malformed external files are data format errors"""
    cases = {
        "empty.csv": "",
        "header_only.csv": "window_area,z\n",
        "bad_header.csv": "area,z\n1,2\n",
        "no_z.csv": "window_area,count\n1,2\n",
        "negative.csv": "window_area,z\n-1,2\n",
        "text.csv": "window_area,z\n1,abc\n",
        "wide.csv": "window_area,z\n1,2,3\n",
    }
    for name, text in cases.items():
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        with pytest.raises(DataFormatError):
            read_external_sample(path)
    with pytest.raises(DataFormatError):
        standardize_report([1.0] * 3, [1.0] * 3, ModelSpec(
            TessellationSpec(TessellationKind.PVT, 1.0), TessellationSpec(TessellationKind.PLT, 1.0)
        ))


def test_exit_codes(tmp_path, monkeypatch):
    """Test 10: Errors map to exit codes 2, 3 and 4"""
    good = _write_config(tmp_path, _small_doc(tmp_path))
    unknown = _write_config(tmp_path, {**PVT_PLT_DOC, "colour": "red"}, "unknown.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    empty = tmp_path / "empty.csv"
    empty.write_text("window_area,z\n", encoding="utf-8")

    assert main(["moments", "--config", str(unknown)]) == EXIT_INPUT
    assert main(["moments", "--config", str(broken)]) == EXIT_INPUT
    assert main(["moments"]) == EXIT_INPUT
    assert main(["standardize", "--config", str(good), "--data", str(empty)]) == EXIT_INPUT
    assert main(["moments", "--config", str(tmp_path / "missing.json")]) == EXIT_IO
    assert main(["standardize", "--config", str(good), "--data", str(tmp_path / "missing.csv")]) == EXIT_IO

    def uncertified(config, metrics=None):
        raise ExactnessError("cell not certified", cell=4, replicate=1, rho=3.0)

    monkeypatch.setattr(cli, "run_experiment", uncertified)
    assert main(["simulate", "--config", str(good)]) == EXIT_NUMERIC


def test_constants_subcommand(capsys):
    """Test 11: constants prints estimates next to their references"""
    args = ["constants", "--which", "flat-variance", "--rho", "5", "--replications", "50", "--seed", str(TEST_SEED)]
    assert main(args) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["k"] == 1
    assert data["sigma2_theory"] == pytest.approx(16.0 / (3.0 * np.pi**1.5))

    assert main(["constants", "--which", "typical-cell", "--replications", "50"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["samples"] == 50
    assert data["reference"]["perimeter"] == pytest.approx(4.0)
