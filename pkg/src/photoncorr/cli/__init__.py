"""Config-driven scenario runner."""

from .config import SCENARIOS, ConfigError, load, resolve, schema_document
from .main import main
from .scenarios import run_config, sweep

__all__ = ["SCENARIOS", "ConfigError", "load", "main", "resolve", "run_config", "schema_document",
           "sweep"]
