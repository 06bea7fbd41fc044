"""Request and response bodies for the decision service.

Everything is snake_case JSON with an explicit schema_version. Requests
reject unknown fields so a misspelled key fails loudly instead of being
ignored. The service is stateless: every request carries the full match
state, and the client owns its own history.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

OUTCOME_TOKENS = ("0", "1", "2", "3", "4", "6", "W")


class StateBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    runs_needed: int = Field(ge=0)
    balls_remaining: int = Field(ge=0)
    wickets_in_hand: int = Field(ge=0)


class RecommendRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = 1
    bundle_id: str
    state: StateBody


class WhatIfRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = 1
    bundle_id: str
    state: StateBody


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = 1
    bundle_id: str
    state: StateBody
    episodes: int = Field(ge=1, le=10_000_000)
    seed: int


class ApplyOutcomeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = 1
    state: StateBody
    outcome: Literal["0", "1", "2", "3", "4", "6", "W"]


class HealthResponse(BaseModel):
    schema_version: int = 1
    status: str = "ok"


class BoundsBody(BaseModel):
    max_runs: int
    max_balls: int
    max_wickets: int


class RewardBody(BaseModel):
    win_reward: float
    loss_reward: float
    per_wicket_penalty: float


class BundleInfo(BaseModel):
    bundle_id: str
    created_at: str
    model_hash: str
    bounds: BoundsBody
    reward: RewardBody


class BundlesResponse(BaseModel):
    schema_version: int = 1
    bundles: list[BundleInfo]


class RankedAction(BaseModel):
    action: str
    value: float


class RecommendResponse(BaseModel):
    schema_version: int = 1
    bundle_id: str
    state: StateBody
    recommendations: list[RankedAction]


class BranchBody(BaseModel):
    outcome: str
    probability: float
    successor: StateBody
    successor_value: float
    contribution: float


class ActionWhatIfBody(BaseModel):
    action: str
    value: float
    branches: list[BranchBody]


class WhatIfResponse(BaseModel):
    schema_version: int = 1
    bundle_id: str
    state: StateBody
    per_action: list[ActionWhatIfBody]


class SimulateResponse(BaseModel):
    schema_version: int = 1
    bundle_id: str
    state: StateBody
    episodes: int
    wins: int
    win_rate: float
    standard_error: float
    seed: int


class ApplyOutcomeResponse(BaseModel):
    schema_version: int = 1
    state: StateBody
    terminal_status: str
