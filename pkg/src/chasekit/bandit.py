"""Bowler selection as Bernoulli multi-armed bandits.

Four selection rules (epsilon-greedy, softmax, UCB1, Thompson sampling)
over success-count arm statistics, plus a seeded simulator that tracks
cumulative pseudo-regret against the hidden true means.

Shared forced-initialization rule: while any arm is unpulled, every
rule selects the lowest-index unpulled arm and consumes no randomness.
This guarantees one pull per arm within the first k steps and keeps the
estimate-based scores well defined afterwards.

Per-step draw discipline in the simulator (documented so traces are
reproducible): the selection rule draws first (epsilon-greedy: one
uniform for the explore test, plus one for the arm when exploring;
softmax: one uniform; UCB1: none; Thompson: one Beta sample per arm in
index order), then exactly one uniform decides the Bernoulli reward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .rng import SplitMix64

POLICY_NAMES = ("epsilon_greedy", "softmax", "ucb1", "thompson")


@dataclass(frozen=True)
class ArmState:
    """Pull bookkeeping for one arm under Bernoulli rewards."""

    pulls: int = 0
    successes: int = 0

    def __post_init__(self):
        if self.pulls < 0 or self.successes < 0:
            raise ValueError("pulls and successes must be >= 0")
        if self.successes > self.pulls:
            raise ValueError(f"successes {self.successes} exceed pulls {self.pulls}")

    @property
    def mean_estimate(self) -> float:
        return self.successes / self.pulls if self.pulls else 0.0

    def record(self, reward: int) -> "ArmState":
        if reward not in (0, 1):
            raise ValueError(f"reward must be 0 or 1, got {reward}")
        return ArmState(pulls=self.pulls + 1, successes=self.successes + reward)


def fresh_arms(count: int) -> list[ArmState]:
    if count < 1:
        raise ValueError("need at least one arm")
    return [ArmState() for _ in range(count)]


@dataclass(frozen=True)
class BanditInstance:
    """Hidden truth for simulation: per-arm success probabilities."""

    true_means: tuple[float, ...]
    horizon: int

    def __post_init__(self):
        if len(self.true_means) < 2:
            raise ValueError("a bandit instance needs at least 2 arms")
        if any(not (0.0 <= m <= 1.0) for m in self.true_means):
            raise ValueError("true means must lie in [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True)
class RegretTrace:
    """Full history of one simulated run.

    cumulative_pseudo_regret[t] = (t+1)*max(true_means) minus the
    expected reward collected so far, which is non-negative and
    non-decreasing by construction.
    """

    selections: tuple[int, ...]
    rewards: tuple[int, ...]
    cumulative_pseudo_regret: tuple[float, ...]

    def to_csv_text(self) -> str:
        lines = ["step,arm,reward,cumulative_pseudo_regret"]
        for i, (arm, reward, regret) in enumerate(
            zip(self.selections, self.rewards, self.cumulative_pseudo_regret)
        ):
            lines.append(f"{i + 1},{arm},{reward},{regret:.12f}")
        return "\n".join(lines) + "\n"


def _require_arms(arms: Sequence[ArmState]) -> None:
    if not arms:
        raise ValueError("need at least one arm")


def _forced_initial(arms: Sequence[ArmState]) -> int | None:
    for i, arm in enumerate(arms):
        if arm.pulls == 0:
            return i
    return None


def _argmax(scores: Sequence[float]) -> int:
    best, best_score = 0, scores[0]
    for i in range(1, len(scores)):
        if scores[i] > best_score:
            best, best_score = i, scores[i]
    return best


def select_epsilon_greedy(arms: Sequence[ArmState], epsilon: float, rng: SplitMix64) -> int:
    """Explore uniformly with probability epsilon, else exploit."""
    _require_arms(arms)
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    forced = _forced_initial(arms)
    if forced is not None:
        return forced
    if rng.random() < epsilon:
        return rng.below(len(arms))
    return _argmax([arm.mean_estimate for arm in arms])


def select_softmax(arms: Sequence[ArmState], temperature: float, rng: SplitMix64) -> int:
    """Sample proportional to exp(mean_estimate / temperature)."""
    _require_arms(arms)
    if not (temperature > 0.0):
        raise ValueError(f"temperature must be > 0, got {temperature}")
    forced = _forced_initial(arms)
    if forced is not None:
        return forced
    scaled = [arm.mean_estimate / temperature for arm in arms]
    top = max(scaled)  # max-subtraction keeps exp in range at tiny temperatures
    weights = [math.exp(s - top) for s in scaled]
    total = sum(weights)
    u = rng.random() * total
    cum = 0.0
    for i, w in enumerate(weights):
        cum += w
        if u < cum:
            return i
    return len(arms) - 1


def _ucb1_scores(arms: Sequence[ArmState], t: int) -> list[float]:
    bonus = 2.0 * math.log(t)
    return [arm.mean_estimate + math.sqrt(bonus / arm.pulls) for arm in arms]


def select_ucb1(arms: Sequence[ArmState], t: int, rng: SplitMix64 | None = None) -> int:
    """Argmax of mean plus sqrt(2 ln t / pulls); draws nothing."""
    _require_arms(arms)
    forced = _forced_initial(arms)
    if forced is not None:
        return forced
    if t < len(arms):
        raise ValueError(f"t={t} below arm count {len(arms)} with every arm pulled")
    return _argmax(_ucb1_scores(arms, t))


def select_thompson(arms: Sequence[ArmState], rng: SplitMix64) -> int:
    """Sample Beta(1+successes, 1+failures) per arm, pick the largest."""
    _require_arms(arms)
    samples = [
        rng.beta(1.0 + arm.successes, 1.0 + (arm.pulls - arm.successes)) for arm in arms
    ]
    return _argmax(samples)


def run_bandit_sim(
    instance: BanditInstance,
    policy: str,
    seed: int,
    epsilon: float = 0.1,
    temperature: float = 0.1,
) -> RegretTrace:
    """Simulate one run of the named policy; deterministic given seed."""
    if policy not in POLICY_NAMES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICY_NAMES}")
    rng = SplitMix64(seed)
    arms = fresh_arms(len(instance.true_means))
    best = max(instance.true_means)
    # accumulating per-step gaps keeps the trace exactly non-decreasing
    # (best - mean is 0.0 exactly whenever the best arm is pulled)
    gaps = [best - m for m in instance.true_means]
    selections: list[int] = []
    rewards: list[int] = []
    regret: list[float] = []
    cumulative = 0.0
    for step in range(instance.horizon):
        if policy == "epsilon_greedy":
            arm = select_epsilon_greedy(arms, epsilon, rng)
        elif policy == "softmax":
            arm = select_softmax(arms, temperature, rng)
        elif policy == "ucb1":
            arm = select_ucb1(arms, step, rng)
        else:
            arm = select_thompson(arms, rng)
        reward = 1 if rng.random() < instance.true_means[arm] else 0
        arms[arm] = arms[arm].record(reward)
        cumulative += gaps[arm]
        selections.append(arm)
        rewards.append(reward)
        regret.append(cumulative)
    return RegretTrace(
        selections=tuple(selections),
        rewards=tuple(rewards),
        cumulative_pseudo_regret=tuple(regret),
    )
