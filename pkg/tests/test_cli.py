import json
import os

import pytest
from click.testing import CliRunner

from scatterlen_cli.cli import cli


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.setenv("SCATTERLEN_LOG_DIR", str(tmp_path / "log"))
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, ["-q", "-o", str(tmp_path), *args])

    return invoke


def read_bytes(path):
    with open(path, 'rb') as f:
        return f.read()


def test_validate_default_geometry(run, tmp_path):
    result = run("validate")
    assert result.exit_code == 0, result.output
    assert "(H): pass" in result.output
    assert os.path.exists(tmp_path / "validation.csv")


def test_validate_rejects_collinear_disks(run, tmp_path):
    geometry = tmp_path / "line.json"
    geometry.write_text(json.dumps({"disks": [
        {"center": [0.0, 0.0], "radius": 1.0},
        {"center": [4.0, 0.0], "radius": 1.0},
        {"center": [8.0, 0.0], "radius": 1.0},
    ]}))
    result = run("validate", "-c", str(geometry))
    assert result.exit_code == 1
    assert "(H): fail" in result.output
    with open(tmp_path / "validation.csv") as f:
        assert len(f.read().splitlines()) > 1


def test_enumerate_writes_counts(run, tmp_path):
    result = run("enumerate", "--n", "6", "--list")
    assert result.exit_code == 0, result.output
    with open(tmp_path / "cycle_counts.csv") as f:
        lines = f.read().splitlines()
    assert lines[0].startswith("n,c_n")
    assert len(lines) == 7
    with open(tmp_path / "necklaces.csv") as f:
        assert len(f.read().splitlines()) == 1 + 3 + 2 + 3 + 6 + 9


def test_spectrum_then_pressure(run, tmp_path):
    result = run("spectrum", "--n", "8")
    assert result.exit_code == 0, result.output
    assert "71 primitive orbits" in result.output
    result = run("thermo", "pressure", "--steps", "5")
    assert result.exit_code == 0, result.output
    with open(tmp_path / "pressure.csv") as f:
        assert len(f.read().splitlines()) == 6


def test_spectrum_rerun_is_byte_identical(run, tmp_path):
    assert run("spectrum", "--n", "4").exit_code == 0
    first = read_bytes(tmp_path / "spectrum.csv")
    assert run("spectrum", "--n", "4").exit_code == 0
    assert read_bytes(tmp_path / "spectrum.csv") == first
    assert run("spectrum", "--n", "4", "--fresh").exit_code == 0
    assert read_bytes(tmp_path / "spectrum.csv") == first


def test_reversed_interval_is_an_error(run):
    assert run("spectrum", "--n", "4").exit_code == 0
    result = run("correlate", "pi", "--a", "1", "--b", "0")
    assert result.exit_code == 1
    assert "interval requires a < b" in result.output


def test_missing_spectrum(run):
    result = run("separation", "s")
    assert result.exit_code == 1
    assert "scatterlen spectrum" in result.output


def test_unknown_command(run):
    assert run("frobnicate").exit_code == 2


def test_log_records_commands(run, tmp_path):
    run("enumerate", "--n", "4")
    with open(tmp_path / "log" / "scatterlen.log") as f:
        assert any(" | enumerate | " in line for line in f)
