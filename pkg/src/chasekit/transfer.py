"""The countdown MDP re-parameterized for engineering domains.

Three problems share one structure: a quantity still needed, a step
budget ticking down, and a stock of resources lost to a failure
outcome. The run chase counts (runs, balls, wickets); manufacturing
scheduling counts (units, periods, machines). countdown_mdp builds that
structure once as a generic MdpInstance, and both domain builders are
plain relabelings of it, so "the same solver handles both" is literal
rather than a slogan. Inventory control keeps the engine but not the
countdown: an infinite-horizon discounted restocking loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping

from .match import (
    ACTION_ORDER,
    OUTCOME_ORDER,
    PROB_TOLERANCE,
    BallOutcome,
    OutcomeDistribution,
    RewardSpec,
    TransitionModel,
)
from .solver import Bounds, MdpInstance


def countdown_mdp(
    need: int,
    steps: int,
    resources: int,
    rows: Mapping[Hashable, OutcomeDistribution],
    *,
    win_reward: float = 1.0,
    loss_reward: float = 0.0,
    per_resource_penalty: float = 0.0,
) -> MdpInstance:
    """Generic (need, steps, resources) countdown as an explicit MDP.

    States are every grid triple; a state is terminal when the need is
    met (a win, taking precedence) or when steps or resources run out.
    Each action's outcome row either reduces the need by a scored amount
    or burns one resource (the wicket slot). Rewards are paid on the
    transition that ENTERS a terminal state, so terminal values are 0 by
    the generic convention; with_terminal_rewards converts back to the
    table convention that stores win/loss payoffs at terminals.
    """
    if need < 0 or steps < 0 or resources < 0:
        raise ValueError("need, steps, and resources must each be >= 0")
    if not rows:
        raise ValueError("countdown_mdp needs at least one action row")
    if per_resource_penalty < 0:
        raise ValueError("per_resource_penalty must be >= 0")
    states = tuple(
        (r, b, w)
        for r in range(need + 1)
        for b in range(steps + 1)
        for w in range(resources + 1)
    )
    terminal = frozenset(s for s in states if s[0] == 0 or s[1] == 0 or s[2] == 0)
    branches = {
        a: tuple(
            (p, None if o is BallOutcome.WICKET else o.runs)
            for o, p in zip(OUTCOME_ORDER, dist.probs)
            if p > 0.0
        )
        for a, dist in rows.items()
    }

    def transition(s, a):
        r, b, w = s
        out = []
        for p, scored in branches[a]:
            if scored is None:
                out.append((p, (r, b - 1, w - 1)))
            else:
                out.append((p, (max(r - scored, 0), b - 1, w)))
        return out

    def pay(s, a, nxt):
        r2, b2, w2 = nxt
        amount = -per_resource_penalty if w2 < s[2] else 0.0
        if r2 == 0:
            amount += win_reward
        elif b2 == 0 or w2 == 0:
            amount += loss_reward
        return amount

    return MdpInstance(
        states=states,
        actions=tuple(branches),
        transition=transition,
        reward=pay,
        discount=1.0,
        terminal_states=terminal,
    )


def with_terminal_rewards(
    values: Mapping[tuple, float], *, win_reward: float = 1.0, loss_reward: float = 0.0
) -> dict:
    """Backfill countdown terminals with their payoff.

    The generic solution pins terminal values at 0 because payoffs ride
    on the entering transition; the chase tables store the payoff AT the
    terminal instead. This maps the former convention onto the latter so
    whole grids compare entry for entry.
    """
    out = {}
    for (r, b, w), v in values.items():
        if r == 0:
            out[(r, b, w)] = win_reward
        elif b == 0 or w == 0:
            out[(r, b, w)] = loss_reward
        else:
            out[(r, b, w)] = v
    return out


def chase_mdp_instance(
    model: TransitionModel, reward: RewardSpec, bounds: Bounds
) -> MdpInstance:
    """The run chase in explicit-MDP form (states are plain triples).

    Exists as the cross-check on the layered chase solver: the generic
    iterator on this instance must reproduce solve_chase exactly.
    """
    bounds.validate()
    rows = {a: model.row(a) for a in ACTION_ORDER}
    return countdown_mdp(
        bounds.max_runs,
        bounds.max_balls,
        bounds.max_wickets,
        rows,
        win_reward=reward.win_reward,
        loss_reward=reward.loss_reward,
        per_resource_penalty=reward.per_wicket_penalty,
    )


@dataclass(frozen=True)
class ManufacturingParams:
    """A production target: units to finish, periods to do it, machines
    that can break.

    Each intensity row is a distribution over units produced per period,
    with the wicket slot read as a BREAKDOWN that removes one machine.
    """

    units_needed: int
    periods_remaining: int
    machines_working: int
    intensity_rows: Mapping[str, OutcomeDistribution]

    def __post_init__(self):
        if self.units_needed < 0 or self.periods_remaining < 0 or self.machines_working < 0:
            raise ValueError("units, periods, and machines must each be >= 0")
        if not self.intensity_rows:
            raise ValueError("at least one intensity row required")


def build_manufacturing_mdp(params: ManufacturingParams) -> MdpInstance:
    """Production scheduling as the countdown MDP: reward 1 on finishing
    the units inside the period budget, 0 otherwise."""
    return countdown_mdp(
        params.units_needed,
        params.periods_remaining,
        params.machines_working,
        dict(params.intensity_rows),
    )


@dataclass(frozen=True)
class InventoryParams:
    """A discounted restocking loop with lost sales.

    States are stock levels 0..max_stock; actions are order quantities
    0..max_order. Arrivals are capped at warehouse capacity but the
    order cost is paid on the full quantity ordered. Unmet demand is
    lost (no backorders) and charged per unit; holding cost is charged
    on end-of-period stock after spoilage removes
    floor(stock * spoilage_fraction) units.
    """

    max_stock: int
    max_order: int
    demand_distribution: Mapping[int, float]
    holding_cost: float = 0.0
    stockout_cost: float = 0.0
    order_cost: float = 0.0
    discount: float = 0.95
    spoilage_fraction: float = 0.0

    def __post_init__(self):
        if self.max_stock < 0:
            raise ValueError("max_stock must be >= 0")
        if self.max_order < 0:
            raise ValueError("max_order must be >= 0")
        for name in ("holding_cost", "stockout_cost", "order_cost"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 < self.discount < 1.0:
            raise ValueError(f"discount must be in (0, 1), got {self.discount}")
        if not 0.0 <= self.spoilage_fraction < 1.0:
            raise ValueError("spoilage_fraction must be in [0, 1)")
        if not self.demand_distribution:
            raise ValueError("demand distribution must be non-empty")
        total = 0.0
        for d, p in self.demand_distribution.items():
            if not isinstance(d, int) or d < 0:
                raise ValueError(f"demand values must be integers >= 0, got {d!r}")
            if p < 0.0:
                raise ValueError(f"demand probability for {d} is negative")
            total += p
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ValueError(f"demand probabilities sum to {total!r}, not 1")


def build_inventory_mdp(params: InventoryParams) -> MdpInstance:
    """Restocking as an explicit MDP with costs folded into rewards.

    Several demand draws can land on the same end-of-period stock, and
    reward(s, a, s') must be a pure function of the triple, so demand
    branches are grouped by successor and the reward for that successor
    is the conditional expected cost (negated). The (s, a) expectation
    is unchanged by the grouping.
    """
    states = tuple(range(params.max_stock + 1))
    actions = tuple(range(params.max_order + 1))
    demand = sorted(params.demand_distribution.items())
    transitions: dict[tuple[int, int], tuple[tuple[float, int], ...]] = {}
    rewards: dict[tuple[int, int, int], float] = {}
    for s in states:
        for a in actions:
            stocked = min(s + a, params.max_stock)
            mass: dict[int, float] = {}
            cost_mass: dict[int, float] = {}
            for d, pd in demand:
                if pd == 0.0:
                    continue
                sold = min(stocked, d)
                left = stocked - sold
                spoiled = int(math.floor(left * params.spoilage_fraction))
                nxt = left - spoiled
                cost = (
                    params.order_cost * a
                    + params.holding_cost * nxt
                    + params.stockout_cost * (d - sold)
                )
                mass[nxt] = mass.get(nxt, 0.0) + pd
                cost_mass[nxt] = cost_mass.get(nxt, 0.0) + pd * cost
            transitions[(s, a)] = tuple((mass[nxt], nxt) for nxt in sorted(mass))
            for nxt, p in mass.items():
                rewards[(s, a, nxt)] = -cost_mass[nxt] / p

    return MdpInstance(
        states=states,
        actions=actions,
        transition=lambda s, a: transitions[(s, a)],
        reward=lambda s, a, nxt: rewards[(s, a, nxt)],
        discount=params.discount,
        terminal_states=frozenset(),
    )
