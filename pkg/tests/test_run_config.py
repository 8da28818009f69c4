import os

import pytest
import yaml

from scatterlen_cli.utils.errors import ConfigurationError
from scatterlen_cli.utils.run_config import RunConfig, load_run_config


def write_yaml(path, data):
    path.write_text(yaml.dump(data))
    return str(path)


def test_defaults(monkeypatch):
    monkeypatch.delenv("SCATTERLEN_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("SCATTERLEN_LOG_DIR", raising=False)
    config = RunConfig()
    assert config.n_max == 12
    assert config.spectrum_path == os.path.join("scatterlen-out", "spectrum.csv")
    assert config.log_dir == os.path.join("scatterlen-out", "log")


def test_environment_output_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("SCATTERLEN_OUTPUT_DIR", str(tmp_path))
    assert RunConfig().output_path("pi.csv") == os.path.join(str(tmp_path), "pi.csv")


def test_yaml_and_overrides(tmp_path):
    path = write_yaml(tmp_path / "run.yaml", {"geometry": "disks.json", "n_max": 10, "threads": 2})
    config = load_run_config(path)
    assert config.geometry == os.path.join(str(tmp_path), "disks.json")
    assert config.n_max == 10
    overridden = config.with_overrides(n_max=8, threads=None, memory=())
    assert overridden.n_max == 8
    assert overridden.threads == 2
    assert overridden.memory == [2, 4, 6]
    assert yaml.safe_load(overridden.to_yaml())["n_max"] == 8


@pytest.mark.parametrize("data, message", [
    ({"n_max": 1}, "n_max"),
    ({"threads": 0}, "threads"),
    ({"tol": -1.0}, "tol"),
    ({"delta": -0.5}, "delta"),
    ({"memory": [1, 4]}, "memory"),
    ({"colour": "red"}, "Unknown keys"),
])
def test_invalid_values(tmp_path, data, message):
    path = write_yaml(tmp_path / "run.yaml", data)
    with pytest.raises(ConfigurationError, match=message):
        load_run_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        load_run_config(str(tmp_path / "absent.yaml"))


def test_not_a_mapping(tmp_path):
    (tmp_path / "run.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError, match="mapping"):
        load_run_config(str(tmp_path / "run.yaml"))
