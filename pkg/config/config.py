"""
Configuration loader for cmdkit
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULTS_FILE = Path(__file__).parent / "defaults.yaml"


def _env_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}")
        return None


@dataclass
class CoverageConfig:
    """Caps for cycle and path enumeration"""
    cycle_cap: int = 10000
    path_cap: int = 10000

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CoverageConfig":
        return cls(
            cycle_cap=int(data.get("cycle_cap", 10000)),
            path_cap=int(data.get("path_cap", 10000)),
        )


@dataclass
class SelectionConfig:
    """Regression test selection settings"""
    default_criticality: int = 3
    granularity: str = "method"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SelectionConfig":
        return cls(
            default_criticality=int(data.get("default_criticality", 3)),
            granularity=str(data.get("granularity", "method")),
        )


@dataclass
class StrategyConfig:
    direction: str = "bottom-up"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StrategyConfig":
        return cls(direction=str(data.get("direction", "bottom-up")))


@dataclass
class ReportConfig:
    format: str = "table"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ReportConfig":
        return cls(format=str(data.get("format", "table")))


@dataclass
class LoggingConfig:
    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LoggingConfig":
        return cls(
            level=str(data.get("level", "WARNING")).upper(),
            format=str(data.get("format", cls.format)),
        )


class Config:
    """Main configuration class: packaged YAML defaults, then CMDKIT_* environment overrides"""

    def __init__(self, defaults_file: Optional[Path] = None):
        self.config_dict = self._load_yaml_config(defaults_file or DEFAULTS_FILE)

        self.coverage = CoverageConfig.from_dict(self.config_dict.get("coverage", {}))
        self.selection = SelectionConfig.from_dict(self.config_dict.get("selection", {}))
        self.strategy = StrategyConfig.from_dict(self.config_dict.get("strategy", {}))
        self.report = ReportConfig.from_dict(self.config_dict.get("report", {}))
        self.logging = LoggingConfig.from_dict(self.config_dict.get("logging", {}))

        self._apply_env_overrides()

    def _load_yaml_config(self, file_path: Path) -> Dict[str, Any]:
        """Load the packaged defaults file"""
        if not file_path.exists():
            logger.warning(f"Defaults file not found: {file_path}, using built-in values")
            return {}
        with open(file_path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
        return data or {}

    def _apply_env_overrides(self) -> None:
        cycle_cap = _env_int("CMDKIT_CYCLE_CAP")
        if cycle_cap is not None:
            self.coverage.cycle_cap = cycle_cap
        path_cap = _env_int("CMDKIT_PATH_CAP")
        if path_cap is not None:
            self.coverage.path_cap = path_cap
        level = os.getenv("CMDKIT_LOG_LEVEL")
        if level:
            self.logging.level = level.upper()
        fmt = os.getenv("CMDKIT_FORMAT")
        if fmt:
            self.report.format = fmt.lower()
