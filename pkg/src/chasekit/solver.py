"""Exact planning: backward induction for chases, value iteration for
arbitrary finite MDPs.

The chase is a DAG in balls_remaining, so solve_chase does one exact
backward pass per ball layer, vectorized over (runs, wickets). The
generic path (value_iterate) takes any MdpInstance and runs Jacobi
sweeps to a residual tolerance.

Terminal-value conventions differ between the two paths and both are
deliberate: chase tables store win_reward / loss_reward at terminal
states so lookups answer "value of being here", while the generic MDP
path pins terminal values to 0 and pays rewards on the transition into
a terminal state. Over non-terminal states the two assign identical
values (the equivalence is under test).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable, NamedTuple, Sequence

import numpy as np

from .match import (
    ACTION_ORDER,
    OUTCOME_ORDER,
    OUTCOME_RUNS,
    PROB_TOLERANCE,
    BallOutcome,
    BattingAction,
    MatchState,
    RewardSpec,
    TerminalStatus,
    TransitionModel,
    apply_outcome,
)

_WICKET_IDX = len(OUTCOME_ORDER) - 1  # canonical order puts W last


class Bounds(NamedTuple):
    """Inclusive state-grid limits for tabulated solutions."""

    max_runs: int
    max_balls: int
    max_wickets: int

    def validate(self) -> None:
        for name, v in zip(self._fields, self):
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    def contains(self, state: MatchState) -> bool:
        return (
            state.runs_needed <= self.max_runs
            and state.balls_remaining <= self.max_balls
            and state.wickets_in_hand <= self.max_wickets
        )

    def states(self):
        """All states on the grid, terminal ones included."""
        for r in range(self.max_runs + 1):
            for b in range(self.max_balls + 1):
                for w in range(self.max_wickets + 1):
                    yield MatchState(r, b, w)


@dataclass(frozen=True)
class SolveReport:
    states_evaluated: int
    sweeps: int
    max_residual: float
    converged: bool


def _require_on_grid(bounds: Bounds, state: MatchState) -> None:
    if not bounds.contains(state):
        raise ValueError(f"state {state} outside solved bounds {bounds}")


@dataclass(frozen=True)
class ValueTable:
    """Optimal (or policy) values on a bounds grid.

    values[r, b, w] holds the state value; terminal cells hold
    win_reward / loss_reward so value_at answers uniformly.
    """

    bounds: Bounds
    reward: RewardSpec
    values: Any  # float64 ndarray, shape (R+1, B+1, W+1), read-only

    def value_at(self, state: MatchState) -> float:
        _require_on_grid(self.bounds, state)
        return float(self.values[state.runs_needed, state.balls_remaining, state.wickets_in_hand])


@dataclass(frozen=True)
class PolicyTable:
    """Action per non-terminal grid state. Terminal cells hold -1."""

    bounds: Bounds
    actions: Any  # int8 ndarray, shape (R+1, B+1, W+1), read-only

    def action_at(self, state: MatchState) -> BattingAction:
        _require_on_grid(self.bounds, state)
        if state.is_terminal:
            raise ValueError(f"no action defined at terminal state {state}")
        code = int(self.actions[state.runs_needed, state.balls_remaining, state.wickets_in_hand])
        if code < 0:
            raise ValueError(f"policy has no action for state {state}")
        return BattingAction(code)


def _terminal_filled(bounds: Bounds, reward: RewardSpec) -> np.ndarray:
    """Grid preloaded with terminal values (win row, loss faces)."""
    r_max, b_max, w_max = bounds
    v = np.zeros((r_max + 1, b_max + 1, w_max + 1))
    v[1:, :, 0] = reward.loss_reward
    v[1:, 0, :] = reward.loss_reward
    v[0, :, :] = reward.win_reward
    return v


def _layer_action_values(
    prev_layer: np.ndarray, probs: Sequence[Sequence[float]], reward: RewardSpec, r_max: int
) -> np.ndarray:
    """Q values for one balls layer, all actions at once.

    prev_layer is V[:, b-1, :] of shape (R+1, W+1); returns (A, R, W) for
    runs 1..R and wickets 1..W (the non-terminal part of the layer).
    """
    r_idx = np.arange(1, r_max + 1)
    q = np.zeros((len(probs), r_max, prev_layer.shape[1] - 1))
    for ai, row in enumerate(probs):
        acc = q[ai]
        for oi, p in enumerate(row[:-1]):
            if p == 0.0:
                continue
            succ_r = np.maximum(r_idx - OUTCOME_RUNS[oi], 0)
            acc += p * prev_layer[succ_r, 1:]
        pw = row[_WICKET_IDX]
        if pw != 0.0:
            acc += pw * (prev_layer[1:, :-1] - reward.per_wicket_penalty)
    return q


def solve_chase(
    model: TransitionModel, reward: RewardSpec, bounds: Bounds
) -> tuple[ValueTable, PolicyTable, SolveReport]:
    """Exact optimum for every grid state, one backward pass.

    Ties between equal-valued actions go to the less aggressive one
    (strict improvement required to switch).
    """
    bounds.validate()
    r_max, b_max, w_max = bounds
    probs = model.prob_matrix()
    values = _terminal_filled(bounds, reward)
    actions = np.full((r_max + 1, b_max + 1, w_max + 1), -1, dtype=np.int8)
    for b in range(1, b_max + 1):
        if r_max == 0 or w_max == 0:
            break
        q = _layer_action_values(values[:, b - 1, :], probs, reward, r_max)
        values[1:, b, 1:] = q.max(axis=0)
        actions[1:, b, 1:] = q.argmax(axis=0)  # first max = least aggressive
    values.setflags(write=False)
    actions.setflags(write=False)
    n_nonterminal = r_max * b_max * w_max
    report = SolveReport(
        states_evaluated=n_nonterminal, sweeps=b_max, max_residual=0.0, converged=True
    )
    return (
        ValueTable(bounds=bounds, reward=reward, values=values),
        PolicyTable(bounds=bounds, actions=actions),
        report,
    )


def evaluate_policy(
    model: TransitionModel, reward: RewardSpec, policy: PolicyTable
) -> ValueTable:
    """Exact value of a fixed policy over the policy's own grid.

    Every non-terminal grid state must be covered; a gap raises
    ValueError naming the first missing state.
    """
    bounds = policy.bounds
    r_max, b_max, w_max = bounds
    hole = (policy.actions[1:, 1:, 1:] < 0).nonzero()
    if hole[0].size:
        r, b, w = (int(i[0]) + 1 for i in hole)
        raise ValueError(f"policy has no action for state {MatchState(r, b, w)}")
    probs = model.prob_matrix()
    values = _terminal_filled(bounds, reward)
    if r_max and w_max:
        rr = np.arange(r_max)[:, None]
        ww = np.arange(w_max)[None, :]
        for b in range(1, b_max + 1):
            q = _layer_action_values(values[:, b - 1, :], probs, reward, r_max)
            sel = policy.actions[1:, b, 1:].astype(np.int64)
            values[1:, b, 1:] = q[sel, rr, ww]
    values.setflags(write=False)
    return ValueTable(bounds=bounds, reward=reward, values=values)


def action_values(
    state: MatchState, model: TransitionModel, reward: RewardSpec, values: ValueTable
) -> tuple[float, ...]:
    """One-step lookahead Q(state, a) for every action, action order.

    This is the single arithmetic path used by recommend, what-if
    breakdowns, and belief-weighted ranking, so they agree bit for bit.
    """
    if state.is_terminal:
        raise ValueError(f"no action values at terminal state {state}")
    _require_on_grid(values.bounds, state)
    out = []
    for a in ACTION_ORDER:
        total = 0.0
        for outcome, p in model.row(a).items():
            if p == 0.0:
                continue
            nxt = apply_outcome(state, outcome)
            v = values.value_at(nxt)
            if outcome.is_wicket:
                v -= reward.per_wicket_penalty
            total += p * v
        out.append(total)
    return tuple(out)


def rank_actions(
    state: MatchState, model: TransitionModel, reward: RewardSpec, values: ValueTable
) -> list[tuple[BattingAction, float]]:
    """Actions best-first; ties keep the less aggressive one first."""
    q = action_values(state, model, reward, values)
    order = sorted(range(len(ACTION_ORDER)), key=lambda i: (-q[i], i))
    return [(ACTION_ORDER[i], q[i]) for i in order]


def action_value_grid(
    model: TransitionModel, reward: RewardSpec, values: ValueTable
) -> np.ndarray:
    """Q(s, a) for every non-terminal grid state, shape (R+1, B+1, W+1, A).

    One-step lookahead against the given table; terminal and off-grid
    cells hold NaN. Used as the exact reference when grading learned Q
    tables.
    """
    r_max, b_max, w_max = values.bounds
    probs = model.prob_matrix()
    grid = np.full((r_max + 1, b_max + 1, w_max + 1, len(ACTION_ORDER)), np.nan)
    for b in range(1, b_max + 1):
        if r_max == 0 or w_max == 0:
            break
        q = _layer_action_values(values.values[:, b - 1, :], probs, reward, r_max)
        grid[1:, b, 1:, :] = np.moveaxis(q, 0, -1)
    return grid


# ---------------------------------------------------------------------------
# generic MDP path


@dataclass(frozen=True)
class MdpInstance:
    """A finite MDP in explicit form.

    transition(s, a) returns (probability, next_state) pairs; duplicate
    next_states are allowed and summed. reward(s, a, s') is paid on the
    transition. States must be hashable; terminal states need no
    transitions and their value is fixed at 0.
    """

    states: tuple[Hashable, ...]
    actions: tuple[Hashable, ...]
    transition: Callable[[Any, Any], Sequence[tuple[float, Any]]]
    reward: Callable[[Any, Any, Any], float]
    discount: float
    terminal_states: frozenset

    def __post_init__(self):
        if not 0.0 < self.discount <= 1.0:
            raise ValueError(f"discount must be in (0, 1], got {self.discount}")
        if not self.states:
            raise ValueError("MdpInstance needs at least one state")
        if not self.actions:
            raise ValueError("MdpInstance needs at least one action")


def _materialize(mdp: MdpInstance):
    """Padded successor/probability/reward arrays per action."""
    index = {s: i for i, s in enumerate(mdp.states)}
    if len(index) != len(mdp.states):
        raise ValueError("duplicate states in MdpInstance")
    n = len(mdp.states)
    terminal = np.zeros(n, dtype=bool)
    for s in mdp.terminal_states:
        if s not in index:
            raise ValueError(f"terminal state {s!r} not in states")
        terminal[index[s]] = True
    per_action = []
    for a in mdp.actions:
        rows = []
        for si, s in enumerate(mdp.states):
            if terminal[si]:
                rows.append([])
                continue
            branches = list(mdp.transition(s, a))
            total = 0.0
            row = []
            for p, nxt in branches:
                if p < 0.0:
                    raise ValueError(f"negative probability in transition({s!r}, {a!r})")
                if nxt not in index:
                    raise ValueError(f"transition({s!r}, {a!r}) leaves the state set: {nxt!r}")
                total += p
                row.append((p, index[nxt], float(mdp.reward(s, a, nxt))))
            if abs(total - 1.0) > PROB_TOLERANCE:
                raise ValueError(
                    f"transition({s!r}, {a!r}) probabilities sum to {total!r}, not 1"
                )
            rows.append(row)
        width = max((len(r) for r in rows), default=0) or 1
        probs = np.zeros((n, width))
        succ = np.zeros((n, width), dtype=np.int64)
        rew = np.zeros((n, width))
        for si, row in enumerate(rows):
            for j, (p, ni, rw) in enumerate(row):
                probs[si, j] = p
                succ[si, j] = ni
                rew[si, j] = rw
        per_action.append((probs, succ, rew))
    return index, terminal, per_action


@dataclass(frozen=True)
class GenericSolution:
    """value_iterate output: per-state values and greedy policy."""

    values: dict
    policy: dict
    report: SolveReport


def value_iterate(
    mdp: MdpInstance, *, tolerance: float = 1e-10, max_sweeps: int = 100_000
) -> GenericSolution:
    """Jacobi value iteration to a max-residual tolerance.

    Runs until the largest absolute value change in a sweep drops below
    ``tolerance``; if ``max_sweeps`` arrives first the report's converged
    flag is False and the caller decides what that means.
    """
    index, terminal, per_action = _materialize(mdp)
    n = len(mdp.states)
    v = np.zeros(n)
    sweeps = 0
    residual = np.inf
    converged = False
    while sweeps < max_sweeps:
        sweeps += 1
        best = None
        for probs, succ, rew in per_action:
            q = (probs * (rew + mdp.discount * v[succ])).sum(axis=1)
            best = q if best is None else np.maximum(best, q)
        best[terminal] = 0.0
        residual = float(np.max(np.abs(best - v))) if n else 0.0
        v = best
        if residual < tolerance:
            converged = True
            break
    qs = np.stack(
        [(probs * (rew + mdp.discount * v[succ])).sum(axis=1) for probs, succ, rew in per_action]
    )
    greedy = qs.argmax(axis=0)  # ties: first action in mdp.actions order
    values = {s: float(v[i]) for s, i in index.items()}
    policy = {
        s: mdp.actions[int(greedy[i])] for s, i in index.items() if not terminal[i]
    }
    report = SolveReport(
        states_evaluated=int(n - terminal.sum()),
        sweeps=sweeps,
        max_residual=residual,
        converged=converged,
    )
    return GenericSolution(values=values, policy=policy, report=report)
