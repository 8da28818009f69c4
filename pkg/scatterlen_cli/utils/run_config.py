"""Run configuration: defaults, YAML file, command-line overrides"""

import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import List, Optional

import yaml

from scatterlen_cli.utils.errors import ConfigurationError

OUTPUT_DIR_ENV = 'SCATTERLEN_OUTPUT_DIR'
LOG_DIR_ENV = 'SCATTERLEN_LOG_DIR'
DEFAULT_OUTPUT_DIR = 'scatterlen-out'
SPECTRUM_FILE = 'spectrum.csv'


def default_output_dir():
    return os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)


@dataclass(frozen=True)
class RunConfig:
    """
    Parameters shared by the commands.

    ``geometry`` is a JSON path; None selects the built-in asymmetric system.
    """
    geometry: Optional[str] = None
    n_max: int = 12
    output_dir: str = field(default_factory=default_output_dir)
    threads: int = 1
    tol: float = 1e-12
    seed: int = 0
    a: float = -0.5
    b: float = 0.5
    delta: Optional[float] = None
    eps_rule: str = 'power:2'
    z_grid: Optional[List[float]] = None
    t_grid: List[float] = field(default_factory=lambda: [0.0, 2.0, 5.0, 10.0, 20.0, 50.0])
    memory: List[int] = field(default_factory=lambda: [2, 4, 6])
    quiet: bool = False

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ConfigurationError(f"n_max must be an integer >= 2, got {self.n_max!r}")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigurationError(f"threads must be an integer >= 1, got {self.threads!r}")
        if not self.tol > 0:
            raise ConfigurationError(f"tol must be positive, got {self.tol!r}")
        if self.delta is not None and self.delta < 0:
            raise ConfigurationError(f"delta must be non-negative, got {self.delta!r}")
        if any(k < 2 for k in self.memory):
            raise ConfigurationError(f"memory values must be >= 2, got {self.memory!r}")

    @property
    def spectrum_path(self):
        return os.path.join(self.output_dir, SPECTRUM_FILE)

    @property
    def log_dir(self):
        return os.environ.get(LOG_DIR_ENV, os.path.join(self.output_dir, 'log'))

    def output_path(self, name):
        return os.path.join(self.output_dir, name)

    def with_overrides(self, **overrides) -> "RunConfig":
        """Copy with every non-None override applied (flags beat file values)."""
        changes = {k: v for k, v in overrides.items() if v is not None and v != ()}
        try:
            return replace(self, **changes)
        except TypeError as e:
            raise ConfigurationError(f"Unknown run option: {e}")

    def to_yaml(self):
        return yaml.dump(asdict(self), default_flow_style=False, sort_keys=False)


def load_run_config(path) -> RunConfig:
    """
    Read a RunConfig from YAML.

    Args:
        path (str): Path to the YAML file

    Returns:
        RunConfig

    Raises:
        ConfigurationError: missing file, invalid YAML, unknown keys or
            values failing validation
    """
    if not os.path.exists(path):
        raise ConfigurationError(f"Run configuration not found: {path}")
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Run configuration {path} is not valid YAML: {e}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"Run configuration {path} must be a mapping")

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(f"Unknown keys in {path}: {', '.join(unknown)}")
    # relative geometry paths are taken relative to the YAML file
    geometry = data.get('geometry')
    if geometry and not os.path.isabs(geometry):
        data['geometry'] = os.path.join(os.path.dirname(os.path.abspath(path)), geometry)
    try:
        return RunConfig(**data)
    except TypeError as e:
        raise ConfigurationError(f"Invalid run configuration {path}: {e}")
