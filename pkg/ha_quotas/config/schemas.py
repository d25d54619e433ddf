"""Pydantic schemas for validating the Hydra guard and sweep configs."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

# ── Guards ─────────────────────────────────────────────────────────────


class GuardsSchema(BaseModel):
    """Size limits for the exponential routines (oracle, subset sweeps, X3C search)."""

    oracle_max_applicants: int = Field(default=8, ge=0)
    oracle_max_projects: int = Field(default=6, ge=0)
    mquota_max: int = Field(default=12, ge=0, description="max |P_quota| for 2^m sweeps")
    kernel_max_applicants: int = Field(default=12, ge=0)
    x3c_max_sets: int = Field(default=40, ge=0)

    model_config = {"frozen": True}


DEFAULT_GUARDS = GuardsSchema()


# ── Sweeps ─────────────────────────────────────────────────────────────

SWEEP_NAMES = {"threshold", "lq2", "gadget", "open_set", "fpt", "kernel", "x3c", "roommates"}


class SweepSchema(BaseModel):
    name: str
    seeds: int = Field(default=100, gt=0)
    seed_offset: int = Field(default=0, ge=0)
    n_min: int = Field(default=1, ge=0)
    n_max: int = Field(default=6, ge=0)
    m_min: int = Field(default=1, ge=1)
    m_max: int = Field(default=4, ge=1)
    quota_max: int = Field(default=3, ge=1)
    list_len_min: int = Field(default=0, ge=0)
    list_len_max: Optional[int] = Field(default=None, ge=0)  # null = m
    max_weight: int = Field(default=3, ge=0)
    fail_fast: bool = False

    @field_validator("name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        if v not in SWEEP_NAMES:
            raise ValueError(f"Unknown sweep '{v}'. Expected one of {sorted(SWEEP_NAMES)}")
        return v

    @model_validator(mode="after")
    def check_ranges(self) -> SweepSchema:
        if self.n_min > self.n_max:
            raise ValueError("n_min must not exceed n_max")
        if self.m_min > self.m_max:
            raise ValueError("m_min must not exceed m_max")
        if self.list_len_max is not None and self.list_len_max < self.list_len_min:
            raise ValueError("list_len_max must not be below list_len_min")
        return self


class WandbSchema(BaseModel):
    project: str = "ha-quotas"
    entity: Optional[str] = None
    group: Optional[str] = None
    tags: list[str] = Field(default_factory=list)
    mode: str = "disabled"

    @field_validator("mode")
    @classmethod
    def validate_mode(cls, v: str) -> str:
        valid = {"online", "offline", "disabled"}
        if v not in valid:
            raise ValueError(f"Unknown wandb mode '{v}'. Expected one of {valid}")
        return v


def validate_sweep_config(raw: dict) -> tuple[bool, list[str]]:
    """Validate a raw sweep section. Returns (is_valid, error_messages)."""
    errors: list[str] = []
    try:
        SweepSchema(**raw)
    except Exception as exc:
        errors = [str(exc)]
    return len(errors) == 0, errors
