"""
Training configuration: flat key=value files parsed into a validated model
"""

from enum import Enum
from pathlib import Path
from typing import Dict, Optional
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from src.config import constants
from src.config.settings import get_settings


class ConfigError(Exception):
    """Raised when a configuration file is unreadable or invalid"""
    pass


class TaskEnum(str, Enum):
    """Supported tasks"""
    SUDOKU = "sudoku"
    CLIQUE = "clique"
    MIS = "mis"


class BackendEnum(str, Enum):
    """Abduction backends for Sudoku"""
    SAT = "sat"
    CSP = "csp"


class ConsistencyModeEnum(str, Enum):
    """Consistency measurement variants"""
    GRADED = "graded"
    BINARY = "binary"


class TrainConfig(BaseModel):
    """Hyperparameters and dataset handles for one training run"""

    model_config = ConfigDict(extra="forbid")

    task: TaskEnum = TaskEnum.SUDOKU
    side: int = 9
    d: Optional[int] = None
    T: int = constants.MESSAGE_ROUNDS
    alpha: float = Field(default=constants.LOSS_ALPHA, ge=0)
    beta: float = Field(default=constants.LOSS_BETA, ge=0)
    c: float = Field(default=constants.SIZE_THRESHOLD_C, gt=0, lt=1)
    epochs: int = Field(default=30, ge=1)
    batch: int = Field(default=32, ge=1)
    lr: float = Field(default=constants.ADAM_LR, gt=0)
    seed: int = 0
    labeled_fraction: float = Field(default=1.0, gt=0, le=1)
    train_data: Path
    val_data: Optional[Path] = None
    test_data: Optional[Path] = None
    backend: BackendEnum = BackendEnum.SAT
    eval_every: int = Field(default=1, ge=1)
    out_dir: Path = Path("runs/latest")
    consistency: ConsistencyModeEnum = ConsistencyModeEnum.GRADED
    degree_cap: int = Field(default=constants.DEGREE_CAP, ge=1)

    @field_validator("side")
    @classmethod
    def validate_side(cls, v: int) -> int:
        if v not in constants.SUDOKU_SIDES:
            raise ValueError(f"side must be one of {constants.SUDOKU_SIDES}")
        return v

    @field_validator("T")
    @classmethod
    def validate_rounds(cls, v: int) -> int:
        if v < 1:
            raise ValueError("T must be at least 1")
        return v

    @model_validator(mode="after")
    def fill_dimension(self) -> "TrainConfig":
        if self.d is None:
            self.d = constants.SUDOKU_DIM if self.task == TaskEnum.SUDOKU else constants.GRAPH_DIM
        if self.d < 1:
            raise ValueError("d must be at least 1")
        return self

    def check_paths(self) -> None:
        """Fail before any compute when a configured data path does not exist"""
        missing = [
            f"{name}={path}"
            for name, path in (("train_data", self.train_data), ("val_data", self.val_data),
                               ("test_data", self.test_data))
            if path is not None and not Path(path).exists()
        ]
        if missing:
            raise ConfigError(f"data paths not found: {', '.join(missing)}")

    def to_flat(self) -> Dict[str, str]:
        """Render back to the flat key=value form"""
        flat = {}
        for key, value in self.model_dump().items():
            if value is None:
                continue
            flat[key] = value.value if isinstance(value, Enum) else str(value)
        return flat


def parse_flat_config(text: str) -> Dict[str, str]:
    """
    Parse flat key=value text

    Args:
        text: File contents; blank lines and '#' comments are ignored

    Returns:
        Mapping of keys to raw string values
    """
    values: Dict[str, str] = {}
    bad_lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            bad_lines.append(number)
            continue
        key, value = line.split("=", 1)
        key = key.strip()
        values["T" if key in ("t", "T") else key.lower()] = value.strip()
    if bad_lines:
        raise ConfigError(f"lines without '=': {bad_lines}")
    return values


def load_train_config(
    path: Path, overrides: Optional[Dict[str, str]] = None, seed: Optional[int] = None
) -> TrainConfig:
    """
    Load and validate a training config file

    Args:
        path: Path to the key=value file
        overrides: Extra key=value pairs applied after the file (e.g. from sweeps)
        seed: Explicit seed (the --seed flag); wins over REFLX_SEED

    Returns:
        Validated TrainConfig; the seed is taken from `seed`, then REFLX_SEED, then the file
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e

    values = parse_flat_config(text)
    if overrides:
        values.update(overrides)

    unknown = sorted(set(values) - set(TrainConfig.model_fields))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    env_seed = get_settings().seed
    if env_seed is not None:
        values["seed"] = str(env_seed)
    if seed is not None:
        values["seed"] = str(seed)

    try:
        return TrainConfig(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
