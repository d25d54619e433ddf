"""Sweep entry point. Run with Hydra CLI overrides, e.g. ``python main.py sweep=fpt sweep.seeds=200``."""

from __future__ import annotations

import sys
from pathlib import Path

import hydra
from hydra.core.hydra_config import HydraConfig
from omegaconf import DictConfig, OmegaConf

from ha_quotas.config.hydra_utils import (
    guards_from_config,
    save_config,
    sweep_from_config,
    wandb_from_config,
)
from ha_quotas.sweeps import run_sweep
from ha_quotas.tools.wandb_tools import SweepTracker


@hydra.main(version_base=None, config_path="conf", config_name="config")
def main(cfg: DictConfig) -> None:
    sweep = sweep_from_config(cfg)
    guards = guards_from_config(cfg)
    tracker = SweepTracker(wandb_from_config(cfg))
    out_dir = Path(HydraConfig.get().runtime.output_dir)

    tracker.start(f"{sweep.name}_{sweep.seed_offset}", OmegaConf.to_container(cfg, resolve=True))
    try:
        df = run_sweep(sweep, guards, tracker)
        summary = tracker.log_summary(df)
    finally:
        tracker.finish()

    save_config(OmegaConf.to_container(cfg, resolve=True), str(out_dir / "sweep_config.yaml"))
    if cfg.run.save_csv:
        df.to_csv(out_dir / "cases.csv", index=False)

    print(f"sweep {sweep.name}: {summary['cases']} cases, {summary['disagreements']} disagreements")
    if summary["disagreements"]:
        print(df[~df["agree"]].head(20).to_string(index=False))
        sys.exit(1)


if __name__ == "__main__":
    main()
