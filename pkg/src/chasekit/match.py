"""Run-chase domain model.

States, batting actions, ball outcomes, outcome distributions, and the
transition models built from them. Every solver, simulator, and learner
in the package works in the terms defined here.

Conventions fixed package-wide:

* canonical outcome order is (0, 1, 2, 3, 4, 6, W) and every probability
  tuple, cumulative table, and serialized row uses it;
* a state with runs_needed == 0 is a WIN even if balls or wickets are
  also exhausted; a state with runs still needed and either balls or
  wickets at zero is a LOSS;
* runs_needed clamps at zero when an outcome overshoots the target;
* all value/model objects are immutable after construction and safe to
  share across threads.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Mapping

PROB_TOLERANCE = 1e-12

MIN_AGGRESSION = 0.25
MAX_AGGRESSION = 4.0


class BallOutcome(enum.Enum):
    """One delivery's result. Value is the scoreboard token."""

    DOT = "0"
    ONE = "1"
    TWO = "2"
    THREE = "3"
    FOUR = "4"
    SIX = "6"
    WICKET = "W"

    @property
    def runs(self) -> int:
        return 0 if self is BallOutcome.WICKET else int(self.value)

    @property
    def is_wicket(self) -> bool:
        return self is BallOutcome.WICKET


OUTCOME_ORDER: tuple[BallOutcome, ...] = (
    BallOutcome.DOT,
    BallOutcome.ONE,
    BallOutcome.TWO,
    BallOutcome.THREE,
    BallOutcome.FOUR,
    BallOutcome.SIX,
    BallOutcome.WICKET,
)

OUTCOME_INDEX: Mapping[BallOutcome, int] = {o: i for i, o in enumerate(OUTCOME_ORDER)}

# runs credited per outcome slot, canonical order (wicket scores none)
OUTCOME_RUNS: tuple[int, ...] = tuple(o.runs for o in OUTCOME_ORDER)


class BattingAction(enum.IntEnum):
    """Intent for the next ball, ordered least to most aggressive."""

    ULTRA_DEFENSIVE = 0
    DEFENSIVE = 1
    BALANCED = 2
    AGGRESSIVE = 3
    ULTRA_AGGRESSIVE = 4


ACTION_ORDER: tuple[BattingAction, ...] = tuple(BattingAction)


class TerminalStatus(enum.Enum):
    WIN = "WIN"
    LOSS = "LOSS"
    IN_PROGRESS = "IN_PROGRESS"


@dataclass(frozen=True)
class MatchState:
    """Chase scoreboard: runs still needed, balls left, wickets in hand."""

    runs_needed: int
    balls_remaining: int
    wickets_in_hand: int

    def __post_init__(self):
        for name in ("runs_needed", "balls_remaining", "wickets_in_hand"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def status(self) -> TerminalStatus:
        # target reached wins outright, even on the last ball or last wicket
        if self.runs_needed == 0:
            return TerminalStatus.WIN
        if self.balls_remaining == 0 or self.wickets_in_hand == 0:
            return TerminalStatus.LOSS
        return TerminalStatus.IN_PROGRESS

    @property
    def is_terminal(self) -> bool:
        return self.status is not TerminalStatus.IN_PROGRESS


def apply_outcome(state: MatchState, outcome: BallOutcome) -> MatchState:
    """Advance the scoreboard by one delivery.

    Raises ValueError if the state is already terminal: asking to bowl a
    ball in a decided match is a caller logic fault, not a modeling case.
    """
    if state.is_terminal:
        raise ValueError(f"cannot apply an outcome to terminal state {state}")
    runs = min(outcome.runs, state.runs_needed)
    return MatchState(
        runs_needed=state.runs_needed - runs,
        balls_remaining=state.balls_remaining - 1,
        wickets_in_hand=state.wickets_in_hand - (1 if outcome.is_wicket else 0),
    )


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities over the canonical outcome order.

    probs is a 7-tuple aligned with OUTCOME_ORDER; entries are >= 0 and
    sum to 1 within PROB_TOLERANCE.
    """

    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.probs) != len(OUTCOME_ORDER):
            raise ValueError(
                f"expected {len(OUTCOME_ORDER)} probabilities, got {len(self.probs)}"
            )
        for o, p in zip(OUTCOME_ORDER, self.probs):
            if not (p >= 0.0):  # also rejects NaN
                raise ValueError(f"probability of {o.value} is negative: {p!r}")
        total = 0.0
        for p in self.probs:
            total += p
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_map(cls, probs: Mapping[BallOutcome, float]) -> "OutcomeDistribution":
        """Build from a mapping; omitted outcomes get probability 0."""
        unknown = set(probs) - set(OUTCOME_ORDER)
        if unknown:
            raise ValueError(f"unknown outcomes in distribution: {unknown}")
        return cls(tuple(float(probs.get(o, 0.0)) for o in OUTCOME_ORDER))

    def p(self, outcome: BallOutcome) -> float:
        return self.probs[OUTCOME_INDEX[outcome]]

    def as_map(self) -> dict[BallOutcome, float]:
        return dict(zip(OUTCOME_ORDER, self.probs))

    def items(self) -> Iterator[tuple[BallOutcome, float]]:
        return iter(zip(OUTCOME_ORDER, self.probs))

    def expected_runs(self) -> float:
        """Mean runs per ball (a wicket scores none)."""
        total = 0.0
        for r, p in zip(OUTCOME_RUNS, self.probs):
            total += r * p
        return total


def tilt_distribution(base: OutcomeDistribution, aggression: float) -> OutcomeDistribution:
    """Scale boundary and wicket probabilities by an aggression factor.

    p(4), p(6), and p(W) are multiplied by ``aggression``; the dot ball
    absorbs the change so the distribution stays normalized. If the dot
    probability would go negative it is clipped to zero, the whole vector
    is renormalized, and a UserWarning records that the requested tilt
    was not exactly achievable. aggression = 1.0 returns ``base`` itself.
    """
    if not (MIN_AGGRESSION <= aggression <= MAX_AGGRESSION):
        raise ValueError(
            f"aggression must be in [{MIN_AGGRESSION}, {MAX_AGGRESSION}], got {aggression}"
        )
    if aggression == 1.0:
        return base
    scaled = list(base.probs)
    moved = 0.0
    for o in (BallOutcome.FOUR, BallOutcome.SIX, BallOutcome.WICKET):
        i = OUTCOME_INDEX[o]
        bumped = scaled[i] * aggression
        moved += bumped - scaled[i]
        scaled[i] = bumped
    dot = OUTCOME_INDEX[BallOutcome.DOT]
    scaled[dot] -= moved
    if scaled[dot] < 0.0:
        warnings.warn(
            f"tilt {aggression} exceeds available dot-ball mass; "
            "clipped and renormalized",
            UserWarning,
            stacklevel=2,
        )
        scaled[dot] = 0.0
        total = sum(scaled)
        scaled = [p / total for p in scaled]
    return OutcomeDistribution(tuple(scaled))


@dataclass(frozen=True)
class RewardSpec:
    """Objective weights for solving and learning.

    win_reward is paid on reaching the target, loss_reward on failing,
    per_wicket_penalty (>= 0) is charged on each wicket transition. The
    default (1, 0, 0) makes values win probabilities.
    """

    win_reward: float = 1.0
    loss_reward: float = 0.0
    per_wicket_penalty: float = 0.0

    def __post_init__(self):
        if not self.win_reward > self.loss_reward:
            raise ValueError("win_reward must exceed loss_reward")
        if self.per_wicket_penalty < 0:
            raise ValueError("per_wicket_penalty must be >= 0")


@dataclass(frozen=True)
class TransitionModel:
    """Outcome distributions per batting action, with optional context
    overrides (e.g. innings-phase specific rows) keyed by context name.

    Treated as immutable; rows must cover every BattingAction exactly.
    """

    rows: Mapping[BattingAction, OutcomeDistribution]
    context_key: str = "global"
    context_overrides: Mapping[str, Mapping[BattingAction, OutcomeDistribution]] = field(
        default_factory=dict
    )

    def __post_init__(self):
        self._check_rows(self.rows, self.context_key)
        for key, rows in self.context_overrides.items():
            self._check_rows(rows, key)

    @staticmethod
    def _check_rows(rows: Mapping[BattingAction, OutcomeDistribution], key: str):
        missing = [a.name for a in ACTION_ORDER if a not in rows]
        if missing:
            raise ValueError(f"rows for {key!r} missing actions: {missing}")
        extra = set(rows) - set(ACTION_ORDER)
        if extra:
            raise ValueError(f"rows for {key!r} have unknown actions: {extra}")

    def row(self, action: BattingAction) -> OutcomeDistribution:
        return self.rows[action]

    def contexts(self) -> tuple[str, ...]:
        return tuple(self.context_overrides)

    def with_context(self, key: str) -> "TransitionModel":
        """The model restricted to one named context's rows."""
        if key not in self.context_overrides:
            raise KeyError(f"no context {key!r}; have {sorted(self.context_overrides)}")
        return TransitionModel(rows=dict(self.context_overrides[key]), context_key=key)

    def prob_matrix(self) -> tuple[tuple[float, ...], ...]:
        """Rows in action order, probs in canonical order."""
        return tuple(self.rows[a].probs for a in ACTION_ORDER)


def balanced_baseline() -> OutcomeDistribution:
    """Reference midline row: 40% dot, 30% single, 20% boundary split
    4:0.15 / 6:0.05, 10% wicket."""
    return OutcomeDistribution.from_map(
        {
            BallOutcome.DOT: 0.40,
            BallOutcome.ONE: 0.30,
            BallOutcome.FOUR: 0.15,
            BallOutcome.SIX: 0.05,
            BallOutcome.WICKET: 0.10,
        }
    )


def aggressive_row() -> OutcomeDistribution:
    """Reference aggressive row (1.55 expected runs per ball, 10% wicket).

    Note the 20% two-run mass: this row is calibrated, not a tilt of the
    balanced baseline.
    """
    return OutcomeDistribution.from_map(
        {
            BallOutcome.DOT: 0.25,
            BallOutcome.ONE: 0.25,
            BallOutcome.TWO: 0.20,
            BallOutcome.FOUR: 0.15,
            BallOutcome.SIX: 0.05,
            BallOutcome.WICKET: 0.10,
        }
    )


def default_transition_model() -> TransitionModel:
    """Built-in five-row model.

    BALANCED is the baseline, AGGRESSIVE the calibrated reference row,
    and the remaining rows are tilts of the baseline at 0.5, 0.75, 1.5.
    """
    base = balanced_baseline()
    return TransitionModel(
        rows={
            BattingAction.ULTRA_DEFENSIVE: tilt_distribution(base, 0.5),
            BattingAction.DEFENSIVE: tilt_distribution(base, 0.75),
            BattingAction.BALANCED: base,
            BattingAction.AGGRESSIVE: aggressive_row(),
            BattingAction.ULTRA_AGGRESSIVE: tilt_distribution(base, 1.5),
        }
    )


def single_row_model(dist: OutcomeDistribution, context_key: str = "global") -> TransitionModel:
    """A model in which every action plays the same row (useful for
    evaluating a fixed style, and for deterministic test environments)."""
    return TransitionModel(rows={a: dist for a in ACTION_ORDER}, context_key=context_key)
