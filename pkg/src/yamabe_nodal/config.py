"""Configuration management for yamabe-nodal."""

import os
from enum import Enum
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from yamabe_nodal import __version__
from yamabe_nodal.errors import ConfigError
from yamabe_nodal.quadrature import QuadratureKind, QuadratureRule

CONFIG_ENV_VAR = "YAMABE_CRIT_CONFIG"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


class QuadratureSettings(BaseModel):
    """Resolutions, seed and tolerance of the energy quadrature."""

    rule: QuadratureKind = QuadratureKind.PRODUCT_GRID
    resolution: int = 32  # Gauss–Legendre nodes per radial panel
    angular_resolution: int = 16
    mc_samples: int = 200_000
    seed: int = 0
    tolerance: float = 1e-8

    def to_rule(self) -> QuadratureRule:
        if self.rule == QuadratureKind.MONTE_CARLO:
            return QuadratureRule(kind=self.rule, resolution=self.mc_samples, seed=self.seed,
                                  reported_tolerance=self.tolerance)
        return QuadratureRule(kind=self.rule, resolution=self.resolution, seed=self.seed,
                              reported_tolerance=self.tolerance,
                              angular_resolution=self.angular_resolution)


class SweepSettings(BaseModel):
    """β grid and table ranges."""

    beta_min_gap: float = 1e-3  # smallest β − 1
    beta_max_gap: float = 0.5
    beta_count: int = 12
    n_values: list[int] = Field(default_factory=lambda: [3, 4, 5, 6, 7, 8])
    m_max: int = 30


class OutputSettings(BaseModel):
    output_dir: Path = Path("results")
    format: OutputFormat = OutputFormat.CSV


class Settings(BaseSettings):
    """Main settings: defaults < config file < environment < CLI flags."""

    model_config = SettingsConfigDict(
        env_prefix="YAMABE_CRIT_",
        env_nested_delimiter="__",
    )

    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    log_level: str = "INFO"

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # config-file values arrive as init kwargs and must lose to the environment
        return env_settings, init_settings


class RunConfig(BaseModel):
    """The resolved configuration of one command, echoed into its outputs."""

    tool_version: str = __version__
    command: str
    n: list[int] = Field(default_factory=list)
    m: list[int] = Field(default_factory=list)
    beta_grid: list[float] = Field(default_factory=list)
    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    format: OutputFormat = OutputFormat.CSV
    config_file: str | None = None


def expand_dotted(flat: dict[str, Any]) -> dict[str, Any]:
    """{"quadrature.resolution": 32} → {"quadrature": {"resolution": 32}}."""
    nested: dict[str, Any] = {}
    for key, value in flat.items():
        node = nested
        parts = str(key).split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError("Config key is both a value and a section", {"key": key})
            node = child
        if isinstance(value, dict):
            value = expand_dotted(value)
            existing = node.get(parts[-1])
            if isinstance(existing, dict):
                existing.update(value)
                continue
        node[parts[-1]] = value
    return nested


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse a flat YAML mapping, or ``key=value`` lines when the text is not one."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError:
        data = None
    if data is None and not text.strip():
        return {}
    if isinstance(data, dict):
        return expand_dotted(data)

    flat: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("Config line is neither YAML nor key=value",
                              {"line": lineno, "text": raw})
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("Config line has an empty key", {"line": lineno})
        flat[key] = yaml.safe_load(value) if value else None
    return expand_dotted(flat)


def find_config_path(flag: Path | None = None) -> Path | None:
    """The --config flag, then $YAMABE_CRIT_CONFIG, then nothing."""
    if flag is not None:
        return flag
    env_path = os.environ.get(CONFIG_ENV_VAR)
    return Path(env_path) if env_path else None


def load_config(path: Path | None = None) -> Settings:
    """Load configuration from file and environment."""
    config_path = find_config_path(path)
    config_data: dict[str, Any] = {}
    if config_path is not None:
        try:
            text = config_path.read_text()
        except OSError as exc:
            raise ConfigError("Cannot read config file",
                              {"path": str(config_path), "reason": str(exc)}) from exc
        config_data = parse_config_text(text)
    try:
        return Settings(**config_data)
    except ValidationError as exc:
        raise ConfigError("Invalid configuration",
                          {"path": str(config_path), "errors": exc.errors()}) from exc


# Global settings instance
_settings: Settings | None = None


def get_settings(path: Path | None = None) -> Settings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = load_config(path)
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None
