"""Solved decision bundles: one model plus the tables derived from it.

A bundle is the unit the service and CLI hand around: transition model,
reward spec, and the exact value/policy tables solved from that model,
hash-linked so a bundle whose tables do not belong to its model cannot
be loaded. Building quantizes the model through its serialized form
FIRST, then solves: the persisted 12-decimal probabilities are the ones
the tables were computed from, so a save/load round trip re-verifies
exactly instead of within quantization noise.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import docs
from .match import (
    BallOutcome,
    BattingAction,
    MatchState,
    RewardSpec,
    TransitionModel,
    apply_outcome,
)
from .solver import (
    ACTION_ORDER,
    Bounds,
    PolicyTable,
    ValueTable,
    action_values,
    rank_actions,
    solve_chase,
)


@dataclass(frozen=True)
class OutcomeBranch:
    """One ball outcome inside a what-if breakdown."""

    outcome: BallOutcome
    probability: float
    successor: MatchState
    successor_value: float
    contribution: float


@dataclass(frozen=True)
class ActionWhatIf:
    """One action's value with the per-outcome terms that compose it."""

    action: BattingAction
    value: float
    branches: tuple[OutcomeBranch, ...]


@dataclass(frozen=True)
class WhatIfResult:
    """Per-action breakdown at one state, best action first."""

    state: MatchState
    per_action: tuple[ActionWhatIf, ...]


@dataclass(frozen=True)
class ModelBundle:
    """Immutable model + solved tables, hash-linked.

    Construct through build_bundle or load_bundle; direct construction
    re-checks the hash link so a mismatched bundle cannot exist.
    """

    bundle_id: str
    created_at: str
    model: TransitionModel
    model_hash: str
    values: ValueTable
    policy: PolicyTable

    def __post_init__(self):
        if not self.bundle_id:
            raise ValueError("bundle_id must be non-empty")
        actual = docs.model_hash(self.model)
        if self.model_hash != actual:
            raise ValueError(
                f"bundle {self.bundle_id!r} tables are hash-linked to "
                f"{self.model_hash[:12]}... but the model hashes to {actual[:12]}..."
            )
        if self.values.bounds != self.policy.bounds:
            raise ValueError("bundle value and policy tables disagree on bounds")

    @property
    def bounds(self) -> Bounds:
        return self.values.bounds

    @property
    def reward(self) -> RewardSpec:
        return self.values.reward

    def recommend(self, state: MatchState) -> list[tuple[BattingAction, float]]:
        """All actions best-first at one state, exact one-step lookahead."""
        return rank_actions(state, self.model, self.reward, self.values)

    def what_if(self, state: MatchState) -> WhatIfResult:
        """recommend plus the per-outcome terms behind each value.

        Values come from the same action_values call recommend uses, so
        the two agree bit for bit; each branch records probability,
        successor, successor value, and its contribution (wicket
        branches fold the wicket penalty into the contribution, which is
        why the contributions sum exactly to the action value).
        """
        q = action_values(state, self.model, self.reward, self.values)
        per_action = []
        for i in sorted(range(len(ACTION_ORDER)), key=lambda i: (-q[i], i)):
            action = ACTION_ORDER[i]
            branches = []
            for outcome, p in self.model.row(action).items():
                if p == 0.0:
                    continue
                nxt = apply_outcome(state, outcome)
                succ_v = self.values.value_at(nxt)
                effective = succ_v - (
                    self.reward.per_wicket_penalty if outcome.is_wicket else 0.0
                )
                branches.append(
                    OutcomeBranch(
                        outcome=outcome,
                        probability=p,
                        successor=nxt,
                        successor_value=succ_v,
                        contribution=p * effective,
                    )
                )
            per_action.append(
                ActionWhatIf(action=action, value=q[i], branches=tuple(branches))
            )
        return WhatIfResult(state=state, per_action=tuple(per_action))


def build_bundle(
    bundle_id: str,
    model: TransitionModel,
    reward: RewardSpec,
    bounds: Bounds,
    created_at: str | None = None,
) -> ModelBundle:
    """Solve a model into a bundle.

    The model is passed through its document form before solving, so the
    probabilities the tables were solved from are exactly the ones a
    saved bundle will carry.
    """
    canonical = docs.model_from_doc(docs.loads(docs.dumps(docs.model_to_doc(model))))
    values, policy, _ = solve_chase(canonical, reward, bounds)
    return ModelBundle(
        bundle_id=bundle_id,
        created_at=created_at if created_at is not None else docs.utc_now_iso(),
        model=canonical,
        model_hash=docs.model_hash(canonical),
        values=values,
        policy=policy,
    )


def save_bundle(bundle: ModelBundle, path) -> None:
    docs.dump(docs.bundle_to_doc(bundle), path)


def load_bundle(path) -> ModelBundle:
    return ModelBundle(**docs.bundle_parts_from_doc(docs.load(path)))
