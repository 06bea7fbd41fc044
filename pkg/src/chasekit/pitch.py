"""Hidden pitch-type reasoning: belief updates and QMDP ranking.

The pitch behaves as one of a finite set of types, each with its own
complete transition model; the type is fixed for the innings but never
observed directly. Ball outcomes are evidence: the belief over types is
updated by Bayes rule, and actions are ranked by the QMDP value — the
belief-weighted average of each type's exact one-step action values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .match import (
    ACTION_ORDER,
    BallOutcome,
    BattingAction,
    MatchState,
    RewardSpec,
    TransitionModel,
    default_transition_model,
    tilt_distribution,
)
from .solver import ValueTable, action_values

DEFAULT_PITCH_TILTS = {"GREEN": 0.8, "FLAT": 1.0, "DUSTY": 1.3}


@dataclass(frozen=True)
class PitchType:
    """One hidden condition: a name and the outcome model it induces."""

    name: str
    model: TransitionModel

    def __post_init__(self):
        if not self.name:
            raise ValueError("pitch type needs a non-empty name")


def pitch_model(aggression: float, base: TransitionModel | None = None) -> TransitionModel:
    """Tilt every action row of the base model by one pitch factor."""
    if base is None:
        base = default_transition_model()
    rows = {a: tilt_distribution(base.row(a), aggression) for a in ACTION_ORDER}
    return TransitionModel(rows=rows, context_key=base.context_key)


def default_pitch_types() -> tuple[PitchType, ...]:
    """GREEN suppresses scoring and wickets, DUSTY amplifies both."""
    return tuple(
        PitchType(name=name, model=pitch_model(factor))
        for name, factor in DEFAULT_PITCH_TILTS.items()
    )


@dataclass(frozen=True)
class Belief:
    """Probability over pitch types, carried with the types themselves."""

    types: tuple[PitchType, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.types) < 2:
            raise ValueError("a belief needs at least 2 pitch types")
        names = [t.name for t in self.types]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate pitch type names: {names}")
        if len(self.weights) != len(self.types):
            raise ValueError("one weight per type required")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("belief weights must be >= 0")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"belief weights sum to {sum(self.weights)}, expected 1")

    def weight(self, name: str) -> float:
        for t, w in zip(self.types, self.weights):
            if t.name == name:
                return w
        raise KeyError(f"no pitch type named {name!r}")

    def as_map(self) -> dict[str, float]:
        return {t.name: w for t, w in zip(self.types, self.weights)}


def uniform_belief(types: Sequence[PitchType]) -> Belief:
    types = tuple(types)
    n = len(types)
    if n < 2:
        raise ValueError("a belief needs at least 2 pitch types")
    return Belief(types=types, weights=tuple(1.0 / n for _ in types))


def point_mass_belief(types: Sequence[PitchType], name: str) -> Belief:
    types = tuple(types)
    if all(t.name != name for t in types):
        raise KeyError(f"no pitch type named {name!r}")
    return Belief(types=types, weights=tuple(1.0 if t.name == name else 0.0 for t in types))


def update_pitch_belief(belief: Belief, action: BattingAction, outcome: BallOutcome) -> Belief:
    """Bayes step: weight each type by how well it explains the ball."""
    likelihoods = [t.model.row(action).p(outcome) for t in belief.types]
    posterior = [w * like for w, like in zip(belief.weights, likelihoods)]
    total = sum(posterior)
    if total <= 0.0:
        raise ValueError(
            f"outcome {outcome.value!r} under action {action.name} has zero "
            "likelihood for every pitch type; the type set cannot explain it"
        )
    return Belief(types=belief.types, weights=tuple(p / total for p in posterior))


def qmdp_recommend(
    belief: Belief,
    per_type_values: Mapping[str, ValueTable],
    reward: RewardSpec,
    state: MatchState,
) -> list[tuple[BattingAction, float]]:
    """Actions ranked by belief-weighted exact action values.

    Types with zero weight are skipped and need no value table; a
    weighted type without one is an error.
    """
    if state.is_terminal:
        raise ValueError(f"no action values at terminal state {state}")
    q = [0.0] * len(ACTION_ORDER)
    for t, w in zip(belief.types, belief.weights):
        if w == 0.0:
            continue
        if t.name not in per_type_values:
            raise ValueError(f"no value table supplied for weighted pitch type {t.name!r}")
        per_type = action_values(state, t.model, reward, per_type_values[t.name])
        for i, v in enumerate(per_type):
            q[i] += w * v
    order = sorted(range(len(ACTION_ORDER)), key=lambda i: (-q[i], i))
    return [(ACTION_ORDER[i], q[i]) for i in order]
