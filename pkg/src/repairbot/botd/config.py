"""Bot configuration: fully serializable, echoed into the attempt log header."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

ENV_CONFIG = "REPAIRBOT_CONFIG"


class ConfigInvalid(Exception):
    pass


class ForgeNotFound(Exception):
    pass


@dataclass
class BotConfig:
    forge_dir: str = "."
    poll_interval: int = 40          # minutes from build finish to detection
    candidate_budget: int = 2000
    step_budget: int = 100_000       # local interpreter budget per test
    ci_step_budget: int = 10_000     # CI runs with tighter resource limits
    per_candidate_tick: float = 0.005
    reproduce_cost: int = 0          # logical minutes charged to stage 2
    review_latency: int = 17         # patch in hand -> reviewer validates PR
    merge_delay: int = 35            # PR opened -> maintainer merges
    build_duration: int = 2
    review_mode: str = "auto"        # auto | human
    seed: int = 0
    ui_dir: Optional[str] = None

    def validate(self) -> "BotConfig":
        positive = {
            "poll_interval": self.poll_interval,
            "step_budget": self.step_budget,
            "ci_step_budget": self.ci_step_budget,
            "build_duration": self.build_duration,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ConfigInvalid(f"{name} must be positive, got {value}")
        if self.candidate_budget < 0:
            raise ConfigInvalid("candidate_budget must be non-negative")
        if self.per_candidate_tick <= 0:
            raise ConfigInvalid("per_candidate_tick must be positive")
        if min(self.reproduce_cost, self.review_latency, self.merge_delay) < 0:
            raise ConfigInvalid("latencies must be non-negative")
        if self.review_mode not in ("auto", "human"):
            raise ConfigInvalid(f"review_mode must be auto or human, got {self.review_mode!r}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: dict) -> "BotConfig":
        known = {f for f in BotConfig.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
        return BotConfig(**data).validate()

    @staticmethod
    def load(path) -> "BotConfig":
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigInvalid(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config file {path} is not valid JSON: {exc}") from None
        return BotConfig.from_dict(data)


def resolve_config(path: Optional[str], **overrides) -> BotConfig:
    """--config flag, else $REPAIRBOT_CONFIG, else defaults; CLI overrides win."""
    if path is None:
        path = os.environ.get(ENV_CONFIG) or None
    config = BotConfig.load(path) if path else BotConfig()
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    return config.validate()
