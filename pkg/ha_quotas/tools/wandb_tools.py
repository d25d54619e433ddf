"""WandB logging for sweep experiments: one run per sweep, one log entry per case."""

from __future__ import annotations

import logging
from typing import Any, Optional

import pandas as pd
import wandb

from ha_quotas.config.schemas import WandbSchema

log = logging.getLogger(__name__)


class SweepTracker:
    """Thin wrapper around ``wandb.init`` / ``wandb.log`` / ``wandb.finish``.

    With ``mode: disabled`` (the default) no wandb call is made at all, so sweeps
    run offline without a login.
    """

    def __init__(self, settings: Optional[WandbSchema] = None) -> None:
        self.settings = settings or WandbSchema()
        self._run: Any = None
        self._step = 0

    @property
    def enabled(self) -> bool:
        return self.settings.mode != "disabled"

    @property
    def active(self) -> bool:
        return self._run is not None

    def start(self, run_name: str, config: dict[str, Any]) -> dict[str, Any]:
        """Initialize the wandb run. Returns run metadata (empty when disabled)."""
        if not self.enabled:
            return {}
        self._run = wandb.init(
            project=self.settings.project,
            entity=self.settings.entity,
            group=self.settings.group,
            name=run_name,
            config=config,
            tags=self.settings.tags,
            mode=self.settings.mode,
        )
        self._step = 0
        log.info("wandb run %s started in project %s", run_name, self.settings.project)
        return {"run_id": self._run.id, "project": self.settings.project, "name": run_name}

    def log_case(self, record: dict[str, Any]) -> None:
        if not self.active:
            return
        metrics = {k: v for k, v in record.items() if isinstance(v, (bool, int, float, str))}
        wandb.log({"case": self._step, **metrics})
        self._step += 1

    def log_summary(self, df: pd.DataFrame) -> dict[str, Any]:
        """Log the per-case table and agreement totals; returns the summary dict."""
        summary = {
            "cases": int(len(df)),
            "disagreements": int((~df["agree"]).sum()) if "agree" in df else 0,
        }
        if self.active:
            wandb.log({"cases_table": wandb.Table(dataframe=df)})
            self._run.summary.update(summary)
        return summary

    def finish(self) -> None:
        if not self.active:
            return
        wandb.finish()
        self._run = None
