"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field

Matrix = list[list[list[float]]]  # rows of [re, im] entries


class GroupSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: str
    n: Optional[int] = None
    table: Optional[list[list[int]]] = None
    of: Optional[list["GroupSpec"]] = None


class ActionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    group: str
    domains: dict[str, list[str]] = Field(default_factory=dict)
    maps: dict[str, dict[str, str]] = Field(default_factory=dict)
    unitaries: dict[str, dict[str, Matrix]] = Field(default_factory=dict)


class SystemPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: str
    label: str = ""
    groups: dict[str, GroupSpec] = Field(default_factory=dict)
    space: list[str]
    fibers: dict[str, int] = Field(default_factory=dict)
    actions: dict[str, ActionSpec] = Field(default_factory=dict)
    metadata: dict[str, Any] = Field(default_factory=dict)

    def as_plain(self) -> dict:
        return self.model_dump(exclude_none=True)


class SystemRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    system: SystemPayload
    tol: float = 1e-9


class ActionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    system: SystemPayload
    alpha: Optional[str] = None
    tol: float = 1e-9
    seed: int = 0


class PairRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    system: SystemPayload
    alpha: Optional[str] = None
    beta: Optional[str] = None
    tol: float = 1e-9
    residual_tol: float = 1e-7
    seed: int = 0


class RandomRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    max_points: int = 8
    max_group_order: int = 4
    max_fiber_dim: int = 2


class StressRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    count: int = 20
    seed: int = 0
    max_points: int = 8
    max_group_order: int = 4
    max_fiber_dim: int = 2
    tol: float = 1e-9
    residual_tol: float = 1e-7


class ReportResponse(BaseModel):
    command: str
    input_digest: str
    seed: Optional[int]
    tol: float
    version: str
    wall_clock_s: float
    hypotheses: dict[str, bool]
    dims: dict[str, int]
    blocks: dict[str, list[int]]
    residuals: dict[str, float]
    verdicts: dict[str, bool]
    detail: dict[str, Any]
    exit_code: int


class VersionResponse(BaseModel):
    name: str
    version: str
