"""Stateless decision service over immutable solved bundles.

Handlers only read from the bundle map built at startup, so concurrent
requests need no locking and identical requests always produce identical
bodies. Error contract: malformed bodies fail request validation (422
with field-level reasons), an unknown bundle_id is 404, querying a
terminal state is 422 carrying the terminal_status, and a state outside
the bundle's solved grid is 400.
"""

from __future__ import annotations

import os
from typing import Sequence

from fastapi import FastAPI, HTTPException

from ..bundle import ModelBundle, load_bundle
from ..match import BallOutcome, MatchState, apply_outcome
from ..sim import estimate_win_probability
from .schemas import (
    ActionWhatIfBody,
    ApplyOutcomeRequest,
    ApplyOutcomeResponse,
    BoundsBody,
    BranchBody,
    BundleInfo,
    BundlesResponse,
    HealthResponse,
    RankedAction,
    RecommendRequest,
    RecommendResponse,
    RewardBody,
    SimulateRequest,
    SimulateResponse,
    StateBody,
    WhatIfRequest,
    WhatIfResponse,
)

BIND_ENV = "CHASE_BIND"
PORT_ENV = "CHASE_PORT"
DEFAULT_BIND = "127.0.0.1"
DEFAULT_PORT = 8077


def resolve_bind(bind: str | None, port: int | None) -> tuple[str, int]:
    """Bind address resolution: environment beats flags, flags beat defaults."""
    host = os.environ.get(BIND_ENV) or bind or DEFAULT_BIND
    port_text = os.environ.get(PORT_ENV)
    if port_text is not None:
        return host, int(port_text)
    return host, port if port is not None else DEFAULT_PORT


def load_bundles(paths: Sequence) -> list[ModelBundle]:
    return [load_bundle(path) for path in paths]


def _state_from_body(body: StateBody) -> MatchState:
    return MatchState(
        runs_needed=body.runs_needed,
        balls_remaining=body.balls_remaining,
        wickets_in_hand=body.wickets_in_hand,
    )


def _state_to_body(state: MatchState) -> StateBody:
    return StateBody(
        runs_needed=state.runs_needed,
        balls_remaining=state.balls_remaining,
        wickets_in_hand=state.wickets_in_hand,
    )


def _require_bundle(by_id: dict, bundle_id: str) -> ModelBundle:
    bundle = by_id.get(bundle_id)
    if bundle is None:
        raise HTTPException(
            status_code=404,
            detail={"reason": "unknown_bundle", "bundle_id": bundle_id},
        )
    return bundle


def _require_queryable(bundle: ModelBundle, state: MatchState) -> None:
    if state.is_terminal:
        raise HTTPException(
            status_code=422,
            detail={"reason": "terminal_state", "terminal_status": state.status.value},
        )
    bounds = bundle.bounds
    if (
        state.runs_needed > bounds.max_runs
        or state.balls_remaining > bounds.max_balls
        or state.wickets_in_hand > bounds.max_wickets
    ):
        raise HTTPException(
            status_code=400,
            detail={
                "reason": "state_out_of_bounds",
                "bounds": {
                    "max_runs": bounds.max_runs,
                    "max_balls": bounds.max_balls,
                    "max_wickets": bounds.max_wickets,
                },
            },
        )


def create_app(bundles: Sequence[ModelBundle]) -> FastAPI:
    """Build the service around an immutable set of solved bundles."""
    by_id: dict[str, ModelBundle] = {}
    for bundle in bundles:
        if bundle.bundle_id in by_id:
            raise ValueError(f"duplicate bundle_id {bundle.bundle_id!r}")
        by_id[bundle.bundle_id] = bundle
    if not by_id:
        raise ValueError("the service needs at least one bundle")

    app = FastAPI(title="chase decision service")

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse()

    @app.get("/bundles", response_model=BundlesResponse)
    def list_bundles() -> BundlesResponse:
        infos = [
            BundleInfo(
                bundle_id=b.bundle_id,
                created_at=b.created_at,
                model_hash=b.model_hash,
                bounds=BoundsBody(
                    max_runs=b.bounds.max_runs,
                    max_balls=b.bounds.max_balls,
                    max_wickets=b.bounds.max_wickets,
                ),
                reward=RewardBody(
                    win_reward=b.reward.win_reward,
                    loss_reward=b.reward.loss_reward,
                    per_wicket_penalty=b.reward.per_wicket_penalty,
                ),
            )
            for b in by_id.values()
        ]
        return BundlesResponse(bundles=infos)

    @app.post("/recommend", response_model=RecommendResponse)
    def recommend(req: RecommendRequest) -> RecommendResponse:
        bundle = _require_bundle(by_id, req.bundle_id)
        state = _state_from_body(req.state)
        _require_queryable(bundle, state)
        ranked = bundle.recommend(state)
        return RecommendResponse(
            bundle_id=bundle.bundle_id,
            state=req.state,
            recommendations=[
                RankedAction(action=a.name, value=v) for a, v in ranked
            ],
        )

    @app.post("/what-if", response_model=WhatIfResponse)
    def what_if(req: WhatIfRequest) -> WhatIfResponse:
        bundle = _require_bundle(by_id, req.bundle_id)
        state = _state_from_body(req.state)
        _require_queryable(bundle, state)
        result = bundle.what_if(state)
        return WhatIfResponse(
            bundle_id=bundle.bundle_id,
            state=req.state,
            per_action=[
                ActionWhatIfBody(
                    action=aw.action.name,
                    value=aw.value,
                    branches=[
                        BranchBody(
                            outcome=br.outcome.value,
                            probability=br.probability,
                            successor=_state_to_body(br.successor),
                            successor_value=br.successor_value,
                            contribution=br.contribution,
                        )
                        for br in aw.branches
                    ],
                )
                for aw in result.per_action
            ],
        )

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        bundle = _require_bundle(by_id, req.bundle_id)
        state = _state_from_body(req.state)
        _require_queryable(bundle, state)
        summary = estimate_win_probability(
            state, bundle.policy, bundle.model, req.episodes, req.seed
        )
        return SimulateResponse(
            bundle_id=bundle.bundle_id,
            state=req.state,
            episodes=summary.episodes,
            wins=summary.wins,
            win_rate=summary.win_rate,
            standard_error=summary.standard_error,
            seed=summary.seed,
        )

    @app.post("/apply-outcome", response_model=ApplyOutcomeResponse)
    def apply(req: ApplyOutcomeRequest) -> ApplyOutcomeResponse:
        state = _state_from_body(req.state)
        if state.is_terminal:
            raise HTTPException(
                status_code=422,
                detail={
                    "reason": "terminal_state",
                    "terminal_status": state.status.value,
                },
            )
        outcome = next(o for o in BallOutcome if o.value == req.outcome)
        advanced = apply_outcome(state, outcome)
        return ApplyOutcomeResponse(
            state=_state_to_body(advanced),
            terminal_status=advanced.status.value,
        )

    return app
