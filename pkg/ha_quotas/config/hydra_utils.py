"""Hydra/OmegaConf helpers: guards and sweep sections, config saving/loading."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from omegaconf import DictConfig, OmegaConf

from ha_quotas.config.schemas import GuardsSchema, SweepSchema, WandbSchema


def _section(cfg: DictConfig, key: str) -> dict[str, Any]:
    node = OmegaConf.select(cfg, key, default=None)
    if node is None:
        return {}
    return OmegaConf.to_container(node, resolve=True)  # type: ignore[return-value]


def guards_from_config(cfg: DictConfig) -> GuardsSchema:
    """Build validated guards from ``cfg.guards`` (missing keys take defaults)."""
    return GuardsSchema(**_section(cfg, "guards"))


def sweep_from_config(cfg: DictConfig) -> SweepSchema:
    return SweepSchema(**_section(cfg, "sweep"))


def wandb_from_config(cfg: DictConfig) -> WandbSchema:
    return WandbSchema(**_section(cfg, "wandb"))


def guard_overrides(params: list[tuple[str, str]]) -> list[str]:
    """Map CLI ``--param name value`` pairs to Hydra override strings."""
    keys = {
        "oracle-guard": "guards.oracle_max_applicants",
        "oracle-projects-guard": "guards.oracle_max_projects",
        "mquota-guard": "guards.mquota_max",
        "kernel-guard": "guards.kernel_max_applicants",
        "x3c-guard": "guards.x3c_max_sets",
    }
    overrides: list[str] = []
    for name, value in params:
        if name not in keys:
            raise ValueError(f"Unknown parameter '{name}'. Expected one of {sorted(keys)}")
        overrides.append(f"{keys[name]}={int(value)}")
    return overrides


def save_config(cfg_dict: dict[str, Any], output_path: str) -> str:
    """Save a config dict as a YAML file. Returns output_path."""
    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(OmegaConf.to_yaml(OmegaConf.create(cfg_dict)))
    return str(path)


def load_config(config_path: str) -> dict[str, Any]:
    """Load a YAML config file and return as a plain dict."""
    cfg = OmegaConf.load(config_path)
    return OmegaConf.to_container(cfg, resolve=True)  # type: ignore[return-value]
