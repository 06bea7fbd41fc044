"""Tabular model-free learning against the chase simulator.

Q-learning, SARSA, first-visit Monte Carlo evaluation, and TD(0), all
validated elsewhere against the exact solver. Learning runs are
deterministic given (config, seed); episode i draws from the stream
seeded by the master seed's (i+1)-th output, the same layout the
simulator uses.

Draw discipline inside an episode (shared by qlearn and sarsa so their
epsilon = 0 behavior coincides): the start draw (exploring starts only),
then per action choice one exploration uniform (always consumed, even
with epsilon = 0) plus one more uniform only when exploring, then one
outcome uniform per ball. Evaluation runs (mc, td) consume only the
start draw and outcome draws: they never choose actions.

Within an episode balls_remaining strictly decreases, so no state is
visited twice; every visit is a first visit, which is what lets the
Monte Carlo path batch episodes through the vectorized simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .match import (
    ACTION_ORDER,
    OUTCOME_RUNS,
    BattingAction,
    MatchState,
    RewardSpec,
    TransitionModel,
)
from .rng import GOLDEN, MASK64, SplitMix64, mix64
from .sim import _cumulative, _pick, batch_episodes
from .solver import (
    Bounds,
    PolicyTable,
    ValueTable,
    action_value_grid,
    evaluate_policy,
)

_N_ACTIONS = len(ACTION_ORDER)
_WICKET = 6  # canonical outcome index

# default schedules (used when the config carries None)
EPSILON_START = 0.3
EPSILON_END = 0.01
EPSILON_DECAY_FRACTION = 0.8
ALPHA_C = 100.0
DEFAULT_INITIAL_Q = 0.5


@dataclass(frozen=True)
class ChaseEnv:
    """A chase learning environment: model, objective, state grid.

    start = None enables exploring starts: each episode begins at a
    state drawn uniformly from the non-terminal grid states, consuming
    the episode's first uniform.
    """

    model: TransitionModel
    reward: RewardSpec
    bounds: Bounds
    start: MatchState | None = None

    def __post_init__(self):
        self.bounds.validate()
        if self.start is not None:
            if self.start.is_terminal:
                raise ValueError(f"fixed start {self.start} is terminal")
            if not self.bounds.contains(self.start):
                raise ValueError(f"fixed start {self.start} outside bounds {self.bounds}")
        elif 0 in self.bounds:
            raise ValueError("exploring starts need at least one non-terminal state")

    @property
    def reference_state(self) -> MatchState:
        """State used for curve reporting: the fixed start, or the
        hardest grid corner under exploring starts."""
        if self.start is not None:
            return self.start
        return MatchState(*self.bounds)


@dataclass(frozen=True)
class LearnConfig:
    episodes: int
    seed: int
    learning_rate: float | None = None  # None -> ALPHA_C/(ALPHA_C + visits)
    epsilon: float | None = None  # None -> linear EPSILON_START -> EPSILON_END
    discount: float = 1.0
    initial_q: float = DEFAULT_INITIAL_Q

    def __post_init__(self):
        if self.episodes < 0:
            raise ValueError("episodes must be >= 0")
        if self.learning_rate is not None and not (0.0 < self.learning_rate <= 1.0):
            raise ValueError("learning_rate must be in (0, 1]")
        if self.epsilon is not None and not (0.0 <= self.epsilon <= 1.0):
            raise ValueError("epsilon must be in [0, 1]")
        if not (0.0 < self.discount <= 1.0):
            raise ValueError("discount must be in (0, 1]")

    def epsilon_at(self, episode: int) -> float:
        if self.epsilon is not None:
            return self.epsilon
        cut = EPSILON_DECAY_FRACTION * self.episodes
        if cut <= 0 or episode >= cut:
            return EPSILON_END
        return EPSILON_START + (EPSILON_END - EPSILON_START) * (episode / cut)

    def alpha_at(self, visit_count: int) -> float:
        """Step size for the visit_count-th update of an entry (1-based)."""
        if self.learning_rate is not None:
            return self.learning_rate
        return ALPHA_C / (ALPHA_C + visit_count)


@dataclass(frozen=True)
class QTable:
    """Dense Q(s, a) with visit counts; unvisited entries keep initial_q."""

    bounds: Bounds
    initial_q: float
    values: Any  # float64 ndarray (R+1, B+1, W+1, A), read-only
    counts: Any  # int64 ndarray, same shape, read-only

    def entry(self, state: MatchState, action: BattingAction) -> float:
        return float(
            self.values[state.runs_needed, state.balls_remaining, state.wickets_in_hand, action]
        )

    def visit_count(self, state: MatchState, action: BattingAction) -> int:
        return int(
            self.counts[state.runs_needed, state.balls_remaining, state.wickets_in_hand, action]
        )

    def greedy_value(self, state: MatchState) -> float:
        return float(
            self.values[
                state.runs_needed, state.balls_remaining, state.wickets_in_hand
            ].max()
        )


@dataclass(frozen=True)
class CurvePoint:
    episode: int
    greedy_value: float
    max_q_error: float | None = None


@dataclass(frozen=True)
class LearningCurve:
    """Progress checkpoints: exact greedy-policy value at the reference
    state, plus max |Q - Q*| when an exact table was supplied."""

    points: tuple[CurvePoint, ...]
    reference_state: MatchState

    def to_csv_text(self) -> str:
        lines = ["episode,greedy_value,max_q_error"]
        for p in self.points:
            err = "" if p.max_q_error is None else f"{p.max_q_error:.12f}"
            lines.append(f"{p.episode},{p.greedy_value:.12f},{err}")
        return "\n".join(lines) + "\n"


def greedy_policy_from(q: QTable) -> PolicyTable:
    """Argmax policy with the solver's tie rule (lowest aggression)."""
    actions = q.values.argmax(axis=3).astype(np.int8)
    actions[0, :, :] = -1
    actions[:, 0, :] = -1
    actions[:, :, 0] = -1
    actions.setflags(write=False)
    return PolicyTable(bounds=q.bounds, actions=actions)


def _episode_seed(master: int, episode: int) -> int:
    return mix64((master + (episode + 1) * GOLDEN) & MASK64)


def _freeze_q(bounds: Bounds, initial_q: float, q_flat, counts_flat) -> QTable:
    r_max, b_max, w_max = bounds
    shape = (r_max + 1, b_max + 1, w_max + 1, _N_ACTIONS)
    values = np.asarray(q_flat).reshape(shape)
    counts = np.asarray(counts_flat, dtype=np.int64).reshape(shape)
    values.setflags(write=False)
    counts.setflags(write=False)
    return QTable(bounds=bounds, initial_q=initial_q, values=values, counts=counts)


def _control_run(
    env: ChaseEnv,
    config: LearnConfig,
    reference: ValueTable | None,
    on_policy: bool,
) -> tuple[QTable, LearningCurve]:
    """Shared engine for qlearn (off-policy) and sarsa (on-policy)."""
    r_max, b_max, w_max = env.bounds
    n_flat = (r_max + 1) * (b_max + 1) * (w_max + 1) * _N_ACTIONS
    q = [config.initial_q] * n_flat
    counts = [0] * n_flat
    tables = [_cumulative(env.model.row(a).probs) for a in ACTION_ORDER]
    runs = OUTCOME_RUNS
    gamma = config.discount
    win_r = env.reward.win_reward
    loss_r = env.reward.loss_reward
    pen = env.reward.per_wicket_penalty
    w_stride = _N_ACTIONS
    b_stride = (w_max + 1) * w_stride
    r_stride = (b_max + 1) * b_stride
    fixed = env.start
    n_starts = r_max * b_max * w_max

    qstar = None
    if reference is not None:
        qstar = action_value_grid(env.model, env.reward, reference)
    checkpoint_every = max(1, config.episodes // 20)
    points: list[CurvePoint] = []

    def checkpoint(done: int):
        table = _freeze_q(env.bounds, config.initial_q, list(q), list(counts))
        policy = greedy_policy_from(table)
        value = evaluate_policy(env.model, env.reward, policy).value_at(env.reference_state)
        err = None
        if qstar is not None:
            err = float(np.max(np.abs(table.values[1:, 1:, 1:, :] - qstar[1:, 1:, 1:, :])))
        points.append(CurvePoint(episode=done, greedy_value=value, max_q_error=err))

    for ep in range(config.episodes):
        rng = SplitMix64(_episode_seed(config.seed, ep))
        eps = config.epsilon_at(ep)
        if fixed is None:
            k = min(int(rng.random() * n_starts), n_starts - 1)
            r = 1 + k // (b_max * w_max)
            rem = k % (b_max * w_max)
            b = 1 + rem // w_max
            w = 1 + rem % w_max
        else:
            r, b, w = fixed.runs_needed, fixed.balls_remaining, fixed.wickets_in_hand

        def behavior(base: int) -> int:
            # one uniform always burned on the explore decision
            if rng.random() < eps:
                return min(int(rng.random() * _N_ACTIONS), _N_ACTIONS - 1)
            best_a, best_v = 0, q[base]
            for a in range(1, _N_ACTIONS):
                v = q[base + a]
                if v > best_v:
                    best_a, best_v = a, v
            return best_a

        base = r * r_stride + b * b_stride + w * w_stride
        a = behavior(base) if on_policy else -1
        while True:
            if not on_policy:
                a = behavior(base)
            cum, last = tables[a]
            o = _pick(cum, last, rng.random())
            if o == _WICKET:
                r2, b2, w2 = r, b - 1, w - 1
                reward = -pen
            else:
                gain = runs[o]
                r2, b2, w2 = (r - gain if gain < r else 0), b - 1, w
                reward = 0.0
            terminal = r2 == 0 or b2 == 0 or w2 == 0
            if r2 == 0:
                reward += win_r
            elif terminal:
                reward += loss_r
            sa = base + a
            if terminal:
                target = reward
            else:
                base2 = r2 * r_stride + b2 * b_stride + w2 * w_stride
                if on_policy:
                    a2 = behavior(base2)
                    target = reward + gamma * q[base2 + a2]
                else:
                    best = q[base2]
                    for k2 in range(1, _N_ACTIONS):
                        v = q[base2 + k2]
                        if v > best:
                            best = v
                    target = reward + gamma * best
            counts[sa] += 1
            q[sa] += config.alpha_at(counts[sa]) * (target - q[sa])
            if terminal:
                break
            r, b, w = r2, b2, w2
            base = base2
            if on_policy:
                a = a2
        if (ep + 1) % checkpoint_every == 0 or ep + 1 == config.episodes:
            if not points or points[-1].episode != ep + 1:
                checkpoint(ep + 1)

    table = _freeze_q(env.bounds, config.initial_q, q, counts)
    return table, LearningCurve(points=tuple(points), reference_state=env.reference_state)


def qlearn(
    env: ChaseEnv, config: LearnConfig, reference: ValueTable | None = None
) -> tuple[QTable, LearningCurve]:
    """Off-policy control: targets use max over next-state actions."""
    return _control_run(env, config, reference, on_policy=False)


def sarsa(
    env: ChaseEnv, config: LearnConfig, reference: ValueTable | None = None
) -> tuple[QTable, LearningCurve]:
    """On-policy control: targets use the action the behavior policy
    actually takes next."""
    return _control_run(env, config, reference, on_policy=True)


def _policy_lookup(policy: PolicyTable):
    pol = np.asarray(policy.actions, dtype=np.int64)

    def lookup(r: np.ndarray, b: np.ndarray, w: np.ndarray) -> np.ndarray:
        act = pol[r, b, w]
        if np.any(act < 0):
            i = int(np.nonzero(act < 0)[0][0])
            raise ValueError(
                f"policy has no action for state {MatchState(int(r[i]), int(b[i]), int(w[i]))}"
            )
        return act

    return lookup


def _start_rule(env: ChaseEnv):
    """batch_episodes start argument for this env."""
    if env.start is not None:
        return env.start
    r_max, b_max, w_max = env.bounds
    n = r_max * b_max * w_max

    def starts(u0: np.ndarray):
        k = np.minimum((u0 * n).astype(np.int64), n - 1)
        r = 1 + k // (b_max * w_max)
        rem = k % (b_max * w_max)
        return r, 1 + rem // w_max, 1 + rem % w_max

    return starts


_MC_CHUNK = 200_000


def mc_evaluate(
    env: ChaseEnv, policy: PolicyTable, episodes: int, seed: int
) -> dict[MatchState, float]:
    """First-visit Monte Carlo policy evaluation.

    Returns the mean observed return per visited state; states never
    visited are absent. No state repeats within an episode, so first
    visits are simply all visits, and episodes batch through the
    vectorized simulator in chunks.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    r_max, b_max, w_max = env.bounds
    win_r, loss_r, pen = (
        env.reward.win_reward,
        env.reward.loss_reward,
        env.reward.per_wicket_penalty,
    )
    shape = (r_max + 1, b_max + 1, w_max + 1)
    returns = np.zeros(shape)
    visits = np.zeros(shape, dtype=np.int64)
    lookup = _policy_lookup(policy)
    start_rule = _start_rule(env)
    done = 0
    while done < episodes:
        n = min(_MC_CHUNK, episodes - done)
        batch = batch_episodes(
            start_rule, lookup, env.model, n, seed, max_balls=b_max, episode_offset=done
        )
        terminal_reward = np.where(batch["won"], win_r, loss_r)
        if pen:
            # wickets still to fall after each step, per episode
            falls = np.zeros(n)
            for step in reversed(batch["steps"]):
                idx = step["episodes"]
                falls[idx] += step["outcome"] == _WICKET
                g = terminal_reward[idx] - pen * falls[idx]
                np.add.at(returns, (step["r"], step["b"], step["w"]), g)
                np.add.at(visits, (step["r"], step["b"], step["w"]), 1)
        else:
            for step in batch["steps"]:
                idx = step["episodes"]
                np.add.at(returns, (step["r"], step["b"], step["w"]), terminal_reward[idx])
                np.add.at(visits, (step["r"], step["b"], step["w"]), 1)
        done += n
    out: dict[MatchState, float] = {}
    for r, b, w in zip(*np.nonzero(visits)):
        out[MatchState(int(r), int(b), int(w))] = float(returns[r, b, w] / visits[r, b, w])
    return out


def td_zero_evaluate(
    env: ChaseEnv, policy: PolicyTable, config: LearnConfig
) -> dict[MatchState, float]:
    """TD(0) policy evaluation along simulated episodes.

    Returns a value for every non-terminal grid state; states never
    updated keep config.initial_q. Updates within and across episodes
    are strictly sequential (order matters to the step-size schedule).
    """
    r_max, b_max, w_max = env.bounds
    pol = np.asarray(policy.actions, dtype=np.int64)
    hole = (pol[1:, 1:, 1:] < 0).nonzero()
    if hole[0].size:
        r, b, w = (int(i[0]) + 1 for i in hole)
        raise ValueError(f"policy has no action for state {MatchState(r, b, w)}")
    tables = [_cumulative(env.model.row(a).probs) for a in ACTION_ORDER]
    runs = OUTCOME_RUNS
    gamma = config.discount
    win_r, loss_r, pen = (
        env.reward.win_reward,
        env.reward.loss_reward,
        env.reward.per_wicket_penalty,
    )
    w_stride = 1
    b_stride = w_max + 1
    r_stride = (b_max + 1) * b_stride
    n_flat = (r_max + 1) * r_stride
    v = [config.initial_q] * n_flat
    counts = [0] * n_flat
    pol_flat = pol.reshape(-1).tolist()
    fixed = env.start
    n_starts = r_max * b_max * w_max

    for ep in range(config.episodes):
        rng = SplitMix64(_episode_seed(config.seed, ep))
        if fixed is None:
            k = min(int(rng.random() * n_starts), n_starts - 1)
            r = 1 + k // (b_max * w_max)
            rem = k % (b_max * w_max)
            b = 1 + rem // w_max
            w = 1 + rem % w_max
        else:
            r, b, w = fixed.runs_needed, fixed.balls_remaining, fixed.wickets_in_hand
        s = r * r_stride + b * b_stride + w
        while True:
            a = pol_flat[s]
            cum, last = tables[a]
            o = _pick(cum, last, rng.random())
            if o == _WICKET:
                r2, b2, w2 = r, b - 1, w - 1
                reward = -pen
            else:
                gain = runs[o]
                r2, b2, w2 = (r - gain if gain < r else 0), b - 1, w
                reward = 0.0
            terminal = r2 == 0 or b2 == 0 or w2 == 0
            if r2 == 0:
                reward += win_r
            elif terminal:
                reward += loss_r
            s2 = r2 * r_stride + b2 * b_stride + w2
            target = reward if terminal else reward + gamma * v[s2]
            counts[s] += 1
            v[s] += config.alpha_at(counts[s]) * (target - v[s])
            if terminal:
                break
            r, b, w, s = r2, b2, w2, s2

    out: dict[MatchState, float] = {}
    for r in range(1, r_max + 1):
        for b in range(1, b_max + 1):
            for w in range(1, w_max + 1):
                out[MatchState(r, b, w)] = v[r * r_stride + b * b_stride + w]
    return out
