"""Chase simulation: single traced episodes and vectorized batches.

Draw discipline (the part that makes scalar and vectorized runs agree
bit for bit):

* every ball consumes exactly one uniform from the episode's stream;
* episode i of a batch runs on seed ``mix64(master + (i+1)*GOLDEN)``
  (see rng.py's stream layout contract);
* outcome selection is inverse-transform over the canonical-order
  cumulative sums, built by left-to-right accumulation in both paths.

If a uniform lands beyond the last cumulative value (rows may sum a few
ulp under 1), the last nonzero-probability outcome is chosen. Outcomes
with zero probability are never selected.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .match import (
    ACTION_ORDER,
    OUTCOME_ORDER,
    OUTCOME_RUNS,
    BallOutcome,
    BattingAction,
    MatchState,
    TerminalStatus,
    TransitionModel,
    apply_outcome,
)
from .rng import SplitMix64, episode_seeds, step_uniforms
from .solver import PolicyTable


class BallRecord(NamedTuple):
    state: MatchState
    action: BattingAction
    outcome: BallOutcome
    next_state: MatchState


@dataclass(frozen=True)
class EpisodeTrace:
    """One simulated chase, ball by ball."""

    start: MatchState
    seed: int
    balls: tuple[BallRecord, ...]
    result: TerminalStatus

    def to_text(self) -> str:
        """Line-oriented trace: one ball per line, then the result."""
        lines = [
            f"start {self.start.runs_needed} {self.start.balls_remaining} "
            f"{self.start.wickets_in_hand} seed {self.seed}"
        ]
        for rec in self.balls:
            s, n = rec.state, rec.next_state
            lines.append(
                f"({s.runs_needed},{s.balls_remaining},{s.wickets_in_hand})"
                f" {rec.action.name} -> {rec.outcome.value}"
                f" ({n.runs_needed},{n.balls_remaining},{n.wickets_in_hand})"
            )
        lines.append(f"result {self.result.value}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SimulationSummary:
    episodes: int
    wins: int
    win_rate: float
    standard_error: float
    seed: int


def _cumulative(probs) -> tuple[list[float], int]:
    """Left-to-right cumulative sums plus the last selectable slot."""
    cum = list(itertools.accumulate(probs))
    last_nonzero = max(i for i, p in enumerate(probs) if p > 0.0)
    return cum, last_nonzero


def _pick(cum: list[float], last_nonzero: int, u: float) -> int:
    for i, c in enumerate(cum):
        if u < c:
            return min(i, last_nonzero)
    return last_nonzero


def simulate_ball(
    state: MatchState,
    action: BattingAction,
    model: TransitionModel,
    rng: SplitMix64,
) -> BallOutcome:
    """One delivery: consumes exactly one uniform draw."""
    cum, last = _cumulative(model.row(action).probs)
    return OUTCOME_ORDER[_pick(cum, last, rng.random())]


def simulate_chase(
    start: MatchState,
    policy: PolicyTable,
    model: TransitionModel,
    seed: int,
) -> EpisodeTrace:
    """Play one chase to termination under a fixed policy."""
    if start.is_terminal:
        raise ValueError(f"cannot simulate from terminal state {start}")
    rng = SplitMix64(seed)
    tables = {a: _cumulative(model.row(a).probs) for a in ACTION_ORDER}
    state = start
    balls = []
    while not state.is_terminal:
        action = policy.action_at(state)
        cum, last = tables[action]
        outcome = OUTCOME_ORDER[_pick(cum, last, rng.random())]
        nxt = apply_outcome(state, outcome)
        balls.append(BallRecord(state, action, outcome, nxt))
        state = nxt
    return EpisodeTrace(start=start, seed=seed, balls=tuple(balls), result=state.status)


def _model_tables(model: TransitionModel):
    """Cumulative matrix (A, 7) and last-selectable index per action."""
    cums = np.empty((len(ACTION_ORDER), len(OUTCOME_ORDER)))
    last = np.empty(len(ACTION_ORDER), dtype=np.int64)
    for ai, a in enumerate(ACTION_ORDER):
        cum, last_nonzero = _cumulative(model.row(a).probs)
        cums[ai] = cum
        last[ai] = last_nonzero
    return cums, last


def estimate_win_probability(
    start: MatchState,
    policy: PolicyTable,
    model: TransitionModel,
    episodes: int,
    seed: int,
) -> SimulationSummary:
    """Monte Carlo win-rate estimate, vectorized across episodes.

    balls_remaining falls in lockstep across episodes, so each ball index
    is one array step over the still-alive episodes. Results are bit
    identical to running simulate_chase per episode on the derived seeds.
    standard_error is sqrt(p*(1-p)/episodes).
    """
    if start.is_terminal:
        raise ValueError(f"cannot simulate from terminal state {start}")
    if episodes <= 0:
        raise ValueError("episodes must be >= 1")
    seeds = episode_seeds(seed, episodes)
    cums, last = _model_tables(model)
    runs_by_idx = np.array(OUTCOME_RUNS, dtype=np.int64)
    pol = np.asarray(policy.actions, dtype=np.int64)

    r = np.full(episodes, start.runs_needed, dtype=np.int64)
    w = np.full(episodes, start.wickets_in_hand, dtype=np.int64)
    alive = np.ones(episodes, dtype=bool)
    wins = 0
    for t in range(start.balls_remaining):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        b = start.balls_remaining - t
        u = step_uniforms(seeds[idx], t)
        act = pol[r[idx], b, w[idx]]
        if np.any(act < 0):
            bad = idx[act < 0][0]
            raise ValueError(
                "policy has no action for state "
                f"{MatchState(int(r[bad]), b, int(w[bad]))}"
            )
        picked = (cums[act] <= u[:, None]).sum(axis=1)
        picked = np.minimum(picked, last[act])
        hit_runs = runs_by_idx[picked]
        wicket = picked == len(OUTCOME_ORDER) - 1
        r_new = np.maximum(r[idx] - hit_runs, 0)
        w_new = w[idx] - wicket
        r[idx] = r_new
        w[idx] = w_new
        won = r_new == 0
        wins += int(won.sum())
        done = won | (w_new == 0) | (b - 1 == 0)
        alive[idx[done]] = False
    win_rate = wins / episodes
    se = math.sqrt(win_rate * (1.0 - win_rate) / episodes)
    return SimulationSummary(
        episodes=episodes, wins=wins, win_rate=win_rate, standard_error=se, seed=seed
    )


def batch_episodes(
    start_states: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]] | MatchState,
    policy_lookup: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    model: TransitionModel,
    episodes: int,
    seed: int,
    max_balls: int,
    episode_offset: int = 0,
):
    """Shared engine for the learning-side evaluators: runs a batch of
    episodes under an arbitrary per-state action rule and returns the
    full step history as arrays.

    ``start_states``: either a fixed MatchState (no start draw consumed)
    or a callable mapping each episode's first uniform to (r, b, w)
    arrays (exploring starts; consumes draw 0, shifting ball t to draw
    t+1). ``policy_lookup(r, b, w_array) -> action codes`` is called once
    per ball layer.

    Returns dict with per-step arrays (state before the ball, action,
    outcome index, alive mask) keyed by draw-aligned ball index, plus
    final win flags. Episodes that start with fewer balls than others
    simply terminate earlier; all indexing is against balls_remaining.
    ``episode_offset`` shifts the global episode numbering so chunked
    runs consume the same seeds an unchunked run would.
    """
    seeds = episode_seeds(seed, episodes, episode_offset)
    cums, last = _model_tables(model)
    runs_by_idx = np.array(OUTCOME_RUNS, dtype=np.int64)

    if isinstance(start_states, MatchState):
        if start_states.is_terminal:
            raise ValueError(f"cannot simulate from terminal state {start_states}")
        r = np.full(episodes, start_states.runs_needed, dtype=np.int64)
        b = np.full(episodes, start_states.balls_remaining, dtype=np.int64)
        w = np.full(episodes, start_states.wickets_in_hand, dtype=np.int64)
        draw_offset = 0
    else:
        u0 = step_uniforms(seeds, 0)
        r, b, w = start_states(u0)
        draw_offset = 1

    alive = np.ones(episodes, dtype=bool)
    steps = []
    won = np.zeros(episodes, dtype=bool)
    for t in range(max_balls):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        u = step_uniforms(seeds[idx], t + draw_offset)
        act = policy_lookup(r[idx], b[idx], w[idx])
        picked = (cums[act] <= u[:, None]).sum(axis=1)
        picked = np.minimum(picked, last[act])
        steps.append(
            {
                "episodes": idx,
                "r": r[idx].copy(),
                "b": b[idx].copy(),
                "w": w[idx].copy(),
                "action": act,
                "outcome": picked,
            }
        )
        r_new = np.maximum(r[idx] - runs_by_idx[picked], 0)
        w_new = w[idx] - (picked == len(OUTCOME_ORDER) - 1)
        b_new = b[idx] - 1
        r[idx] = r_new
        w[idx] = w_new
        b[idx] = b_new
        win_now = r_new == 0
        won[idx[win_now]] = True
        dead = win_now | (w_new == 0) | (b_new == 0)
        alive[idx[dead]] = False
    return {"steps": steps, "won": won, "final_r": r, "final_w": w}
