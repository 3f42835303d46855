"""Run configuration shared by the CLI stages, plus the artifact config hash.

Every artifact embeds the hash of the configuration subset that shaped it
(tier, budgets, weighting mode, alpha); downstream stages refuse inputs
whose hashes disagree, so a model is never applied through a vocabulary it
was not trained with.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .featurize import DEFAULT_BUDGETS, WEIGHTING_MODES
from .records import TIERS


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{message} (key: {key})")
        self.key = key


@dataclass
class RunConfig:
    tier: str = "Q137"
    mode: str = "count"
    alpha: float = 1.0
    folds: int = 10
    seed: int | None = None
    threshold: float = 0.75
    quorum: int = 3
    budgets: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_BUDGETS))

    def validate(self) -> None:
        if self.tier not in TIERS:
            raise ConfigError("tier", f"tier must be one of {TIERS}, got {self.tier!r}")
        if self.mode not in WEIGHTING_MODES:
            raise ConfigError("mode", f"mode must be one of {WEIGHTING_MODES}, got {self.mode!r}")
        if not self.alpha > 0:
            raise ConfigError("alpha", f"alpha must be > 0, got {self.alpha}")
        if self.folds < 2:
            raise ConfigError("folds", f"folds must be >= 2, got {self.folds}")
        if not 0 < self.threshold <= 1:
            raise ConfigError("threshold", f"threshold must be in (0, 1], got {self.threshold}")
        if self.quorum < 1:
            raise ConfigError("quorum", f"quorum must be >= 1, got {self.quorum}")
        if sorted(self.budgets) != sorted(DEFAULT_BUDGETS):
            raise ConfigError("budgets", f"budgets must cover exactly {sorted(DEFAULT_BUDGETS)}")
        for kind, k in self.budgets.items():
            if k < 1:
                raise ConfigError("budgets", f"budget for {kind} must be >= 1, got {k}")

    def require_seed(self, stage: str) -> int:
        if self.seed is None:
            raise ConfigError("seed", f"{stage} is stochastic and needs an explicit seed")
        return self.seed

    def train_hash(self) -> str:
        """Hash over the settings that shape vocabulary, vectors and model."""
        payload = json.dumps(
            {"tier": self.tier, "mode": self.mode, "alpha": self.alpha, "budgets": self.budgets},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_config_file(path: Path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config", f"config file {path} must hold a JSON object")
    return raw


def build_config(file_path: Path | None, overrides: dict) -> RunConfig:
    """defaults < config file < explicit command-line flags."""
    cfg = RunConfig()
    if file_path is not None:
        raw = load_config_file(file_path)
        known = set(RunConfig().__dict__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError("config", f"unknown config keys: {sorted(unknown)}")
        if "budgets" in raw:
            merged = dict(DEFAULT_BUDGETS)
            merged.update(raw["budgets"])
            raw = dict(raw, budgets=merged)
        cfg = replace(cfg, **raw)
    filtered = {key: value for key, value in overrides.items() if value is not None}
    if "budgets" in filtered:
        merged = dict(cfg.budgets)
        merged.update(filtered["budgets"])
        filtered["budgets"] = merged
    cfg = replace(cfg, **filtered)
    cfg.validate()
    return cfg


def parse_budgets(text: str) -> dict[str, int]:
    """Parse "title=30,topics=10" style budget overrides."""
    budgets = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError("budgets", f"expected field=count, got {part!r}")
        kind, _, value = part.partition("=")
        try:
            budgets[kind.strip()] = int(value)
        except ValueError:
            raise ConfigError("budgets", f"budget for {kind.strip()!r} must be an integer") from None
    return budgets
