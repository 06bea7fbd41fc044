"""Decision analytics for limited-overs run chases.

The chase — needing R runs from B balls with W wickets in hand — is a
small, fully observable sequential decision problem. This package fits
per-ball outcome models from delivery data, solves the chase exactly by
backward induction, checks the solution with Monte Carlo simulation and
model-free learning, and ships the result as a hash-linked bundle that
a CLI and an HTTP service answer questions from.

Submodules group by concern: `match` (states, outcomes, transition
models), `solver` (exact dynamic programming and generic value
iteration), `sim` (Monte Carlo), `rl` (Q-learning / SARSA), `bandit`
(action-selection testbed), `player` (conjugate ability beliefs),
`pitch` (hidden pitch-type beliefs and QMDP), `ingest` (data to model),
`transfer` (the same MDP re-skinned for engineering domains), `docs`
(versioned document persistence), `bundle` (solved-artifact packaging),
`service` (HTTP layer), and `cli`.
"""

from .bandit import BanditInstance, RegretTrace, run_bandit_sim
from .bundle import (
    ActionWhatIf,
    ModelBundle,
    OutcomeBranch,
    WhatIfResult,
    build_bundle,
    load_bundle,
    save_bundle,
)
from .ingest import (
    CleaningReport,
    EstimationConfig,
    EstimationResult,
    clean_records,
    estimate_transition_model,
    parse_ball_by_ball,
)
from .match import (
    ACTION_ORDER,
    OUTCOME_ORDER,
    BallOutcome,
    BattingAction,
    MatchState,
    OutcomeDistribution,
    RewardSpec,
    TerminalStatus,
    TransitionModel,
    apply_outcome,
    default_transition_model,
    tilt_distribution,
)
from .pitch import (
    DEFAULT_PITCH_TILTS,
    Belief,
    PitchType,
    default_pitch_types,
    pitch_model,
    point_mass_belief,
    qmdp_recommend,
    uniform_belief,
    update_pitch_belief,
)
from .player import (
    NormalBelief,
    ObservationModel,
    credible_interval,
    posterior_predictive,
    update_belief,
    update_belief_batch,
)
from .rl import ChaseEnv, LearnConfig, LearningCurve, QTable, qlearn, sarsa
from .rng import SplitMix64, episode_seeds, mix64, step_uniforms
from .sim import (
    EpisodeTrace,
    SimulationSummary,
    estimate_win_probability,
    simulate_ball,
    simulate_chase,
)
from .solver import (
    Bounds,
    GenericSolution,
    MdpInstance,
    PolicyTable,
    SolveReport,
    ValueTable,
    action_value_grid,
    action_values,
    evaluate_policy,
    rank_actions,
    solve_chase,
    value_iterate,
)
from .transfer import (
    InventoryParams,
    ManufacturingParams,
    build_inventory_mdp,
    build_manufacturing_mdp,
    chase_mdp_instance,
    countdown_mdp,
    with_terminal_rewards,
)

__version__ = "0.1.0"

__all__ = [
    "ACTION_ORDER",
    "ActionWhatIf",
    "BallOutcome",
    "BanditInstance",
    "BattingAction",
    "Belief",
    "Bounds",
    "ChaseEnv",
    "CleaningReport",
    "DEFAULT_PITCH_TILTS",
    "EpisodeTrace",
    "EstimationConfig",
    "EstimationResult",
    "GenericSolution",
    "InventoryParams",
    "LearnConfig",
    "LearningCurve",
    "ManufacturingParams",
    "MatchState",
    "MdpInstance",
    "ModelBundle",
    "NormalBelief",
    "OUTCOME_ORDER",
    "ObservationModel",
    "OutcomeBranch",
    "OutcomeDistribution",
    "PitchType",
    "PolicyTable",
    "QTable",
    "RegretTrace",
    "RewardSpec",
    "SimulationSummary",
    "SolveReport",
    "SplitMix64",
    "TerminalStatus",
    "TransitionModel",
    "ValueTable",
    "WhatIfResult",
    "action_value_grid",
    "action_values",
    "apply_outcome",
    "build_bundle",
    "build_inventory_mdp",
    "build_manufacturing_mdp",
    "chase_mdp_instance",
    "clean_records",
    "countdown_mdp",
    "credible_interval",
    "default_pitch_types",
    "default_transition_model",
    "episode_seeds",
    "estimate_transition_model",
    "estimate_win_probability",
    "evaluate_policy",
    "load_bundle",
    "mix64",
    "parse_ball_by_ball",
    "pitch_model",
    "point_mass_belief",
    "posterior_predictive",
    "qlearn",
    "qmdp_recommend",
    "rank_actions",
    "run_bandit_sim",
    "sarsa",
    "save_bundle",
    "simulate_ball",
    "simulate_chase",
    "solve_chase",
    "step_uniforms",
    "tilt_distribution",
    "uniform_belief",
    "update_belief",
    "update_belief_batch",
    "update_pitch_belief",
    "value_iterate",
    "with_terminal_rewards",
]
