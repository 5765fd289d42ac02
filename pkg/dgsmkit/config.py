"""
Configuration management for dgsmkit using Pydantic Settings.
"""

import json
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_SEED = 20140101


class DgsmConfig(BaseSettings):
    """Library defaults loaded from environment variables (prefix DGSM_)."""

    # Sampling
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    n: int = Field(default=16384, ge=2)
    k: int = Field(default=25, ge=1)
    threads: int = Field(default=0, ge=0)
    block_size: int = Field(default=4096, ge=1)

    # m-grid for the w-curve and the m* search
    m_min: float = Field(default=0.1, gt=0)
    m_max: float = Field(default=100.0, gt=0)
    m_grid_points: int = Field(default=64, ge=2)

    # Numerical differentiation
    fd_scheme: Literal["central", "forward"] = "central"

    # Base directory for relative --out paths
    output_dir: Path = Field(default_factory=Path.cwd)

    model_config = SettingsConfigDict(
        env_prefix="DGSM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    @field_validator("output_dir", mode="before")
    @classmethod
    def convert_to_path(cls, v: Any) -> Path:
        """Convert string paths to Path objects."""
        if isinstance(v, str):
            return Path(v)
        return v

    @model_validator(mode="after")
    def check_m_range(self) -> "DgsmConfig":
        if self.m_min >= self.m_max:
            raise ValueError(f"m_min ({self.m_min}) must be below m_max ({self.m_max})")
        return self

    @property
    def m_range(self) -> tuple[float, float]:
        return (self.m_min, self.m_max)


_config: DgsmConfig | None = None


def get_config() -> DgsmConfig:
    """Get or create the global config instance."""
    global _config
    if _config is None:
        _config = DgsmConfig()
    return _config


def parse_params(raw: str | None) -> dict[str, Any]:
    """
    Parse a --params value: inline JSON, or @path to a JSON/YAML file.
    Example: parse_params('{"a": [0, 1]}') -> {"a": [0, 1]}
    """
    if raw is None or raw.strip() == "":
        return {}
    if raw.startswith("@"):
        path = Path(raw[1:])
        if not path.exists():
            raise ValueError(f"Params file '{path}' not found")
        with open(path, encoding="utf-8") as f:
            if path.suffix.lower() in (".yml", ".yaml"):
                data = yaml.safe_load(f) or {}
            else:
                data = json.load(f)
    else:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in --params: {e}") from e
    if not isinstance(data, dict):
        raise ValueError("--params must describe a JSON object")
    return data


def parse_range(raw: str, cast: type = float) -> tuple[Any, Any]:
    """Parse 'lo:hi' into a (lo, hi) tuple."""
    parts = raw.split(":")
    if len(parts) != 2:
        raise ValueError(f"Expected 'lo:hi', got '{raw}'")
    return cast(parts[0]), cast(parts[1])


class RunConfig(BaseModel):
    """One CLI run. Every numeric field is validated before any model evaluation."""

    function: str
    params: dict[str, Any] = Field(default_factory=dict)
    n: int = Field(default=16384, ge=2)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    k: int = Field(default=1, ge=1)
    m_range: tuple[float, float] = (0.1, 100.0)
    dist: Literal["uniform", "normal"] | None = None
    means: list[float] | None = None
    sigmas: list[float] | None = None
    out: str = "-"
    format: Literal["json", "csv"] = "json"
    threads: int = Field(default=0, ge=0)

    # convergence only
    quantity: str | None = None
    variable: int | None = Field(default=None, ge=1)
    n_grid: tuple[int, int] | None = None

    @field_validator("m_range")
    @classmethod
    def check_m_range(cls, v: tuple[float, float]) -> tuple[float, float]:
        lo, hi = v
        if not (0 < lo < hi):
            raise ValueError(f"m_range must satisfy 0 < lo < hi, got {lo}:{hi}")
        return v

    @field_validator("sigmas")
    @classmethod
    def check_sigmas(cls, v: list[float] | None) -> list[float] | None:
        if v is not None and any(s <= 0 for s in v):
            raise ValueError("all sigmas must be > 0")
        return v

    @field_validator("n_grid")
    @classmethod
    def check_n_grid(cls, v: tuple[int, int] | None) -> tuple[int, int] | None:
        if v is None:
            return v
        lo, hi = v
        if lo < 2 or hi < lo:
            raise ValueError(f"n_grid must satisfy 2 <= lo <= hi, got {lo}:{hi}")
        return v

    @model_validator(mode="after")
    def check_distribution(self) -> "RunConfig":
        if self.dist == "normal":
            if self.sigmas is None:
                raise ValueError("--dist normal requires --sigmas")
            if self.means is not None and len(self.means) != len(self.sigmas):
                raise ValueError("--means and --sigmas must have the same length")
        return self

    def n_values(self) -> list[int]:
        """Powers of two spanning n_grid (inclusive)."""
        if self.n_grid is None:
            return []
        lo, hi = self.n_grid
        values = []
        n = 1
        while n <= hi:
            if n >= lo:
                values.append(n)
            n *= 2
        return values
