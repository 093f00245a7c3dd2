"""Bot orchestration: config, pipeline, HTTP API, CLI."""

from .config import BotConfig, ConfigInvalid, ForgeNotFound, resolve_config
from .pipeline import Pipeline, run_pipeline

__all__ = ["BotConfig", "ConfigInvalid", "ForgeNotFound", "resolve_config",
           "Pipeline", "run_pipeline"]
