"""Command-line front door for the chase toolkit.

Every answer the HTTP service can give is reproducible here against the
same bundle document; the CLI calls the library directly rather than
going through a running server. Structured results go to stdout as
canonical documents, diagnostics go to stderr.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import docs
from .bandit import POLICY_NAMES, BanditInstance, run_bandit_sim
from .bundle import ModelBundle, build_bundle, load_bundle, save_bundle
from .ingest import (
    EstimationConfig,
    clean_records,
    estimate_transition_model,
    parse_ball_by_ball,
)
from .match import (
    ACTION_ORDER,
    OUTCOME_ORDER,
    BallOutcome,
    MatchState,
    TransitionModel,
    apply_outcome,
    default_transition_model,
)
from .player import (
    NormalBelief,
    ObservationModel,
    credible_interval,
    posterior_predictive,
    update_belief_batch,
)
from .rl import ChaseEnv, LearnConfig, qlearn, sarsa
from .sim import estimate_win_probability
from .solver import Bounds, RewardSpec, solve_chase, value_iterate
from .transfer import (
    InventoryParams,
    ManufacturingParams,
    build_inventory_mdp,
    build_manufacturing_mdp,
    with_terminal_rewards,
)

OUTCOME_TOKENS = tuple(o.value for o in OUTCOME_ORDER)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(doc: dict) -> None:
    sys.stdout.write(docs.dumps(doc) + "\n")


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_state(text: str) -> MatchState:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"state must be 'runs,balls,wickets', got {text!r}")
    try:
        r, b, w = (int(p) for p in parts)
    except ValueError:
        raise ValueError(f"state must be three integers, got {text!r}") from None
    if min(r, b, w) < 0:
        raise ValueError(f"state components must be non-negative, got {text!r}")
    return MatchState(r, b, w)


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    try:
        values = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"{what} must be comma-separated numbers, got {text!r}") from None
    if not values:
        raise ValueError(f"{what} must not be empty")
    return values


def _load_model(path: str | None) -> TransitionModel:
    if path is None:
        return default_transition_model()
    return docs.model_from_doc(docs.load(path))


def _state_doc(state: MatchState) -> dict:
    return {
        "runs_needed": state.runs_needed,
        "balls_remaining": state.balls_remaining,
        "wickets_in_hand": state.wickets_in_hand,
    }


def _require_queryable(state: MatchState, bundle: ModelBundle) -> None:
    if state.is_terminal:
        raise ValueError(f"state is terminal ({state.status.value})")
    b = bundle.bounds
    if not b.contains(state):
        raise ValueError(
            f"state outside bundle bounds "
            f"(max {b.max_runs},{b.max_balls},{b.max_wickets})"
        )


# --- subcommand bodies -------------------------------------------------


def _cmd_estimate(args: argparse.Namespace) -> int:
    text = Path(args.data).read_text(encoding="utf-8")
    records, issues = parse_ball_by_ball(text)
    for issue in issues:
        _note(f"line {issue.line}: {issue.reason}")
    cleaned, report = clean_records(records)
    config = EstimationConfig(
        smoothing_alpha=args.alpha, min_samples=args.min_samples
    )
    result = estimate_transition_model(cleaned, config)
    docs.dump(docs.model_to_doc(result.model), args.out)
    _emit(
        {
            "schema_version": 1,
            "kind": "estimate_summary",
            "records_parsed": len(records),
            "parse_issues": len(issues),
            "duplicates_removed": report.duplicates_removed,
            "dismissals_imputed": report.dismissals_imputed,
            "overthrows_remapped": report.overthrows_remapped,
            "records_used": result.records_used,
            "bucket_samples": dict(sorted(result.bucket_samples.items())),
            "substituted_buckets": sorted(result.substituted_buckets),
            "out": str(args.out),
        }
    )
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    bounds = Bounds(args.max_runs, args.max_balls, args.max_wickets)
    reward = RewardSpec(args.win_reward, args.loss_reward, args.wicket_penalty)
    model = _load_model(args.model)
    if args.bundle_out is not None:
        # one solve: the value/policy docs come from the bundle's tables
        bundle = build_bundle(args.bundle_id, model, reward, bounds)
        save_bundle(bundle, args.bundle_out)
        values, policy = bundle.values, bundle.policy
        report = None
    else:
        values, policy, report = solve_chase(model, reward, bounds)
    docs.dump(docs.value_table_to_doc(values), args.out)
    if args.policy_out is not None:
        docs.dump(docs.policy_table_to_doc(policy), args.policy_out)
    start = MatchState(bounds.max_runs, bounds.max_balls, bounds.max_wickets)
    summary = {
        "schema_version": 1,
        "kind": "solve_summary",
        "bounds": {
            "max_runs": bounds.max_runs,
            "max_balls": bounds.max_balls,
            "max_wickets": bounds.max_wickets,
        },
        "start_value": values.value_at(start),
        "out": str(args.out),
    }
    if report is not None:
        summary["states_evaluated"] = report.states_evaluated
    if args.bundle_out is not None:
        summary["bundle_out"] = str(args.bundle_out)
    _emit(summary)
    return 0


def _cmd_recommend(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    state = _parse_state(args.state)
    if args.apply is not None:
        if state.is_terminal:
            raise ValueError(f"state is terminal ({state.status.value})")
        outcome = next(o for o in BallOutcome if o.value == args.apply)
        nxt = apply_outcome(state, outcome)
        _emit(
            {
                "schema_version": 1,
                "kind": "applied_state",
                "state": _state_doc(nxt),
                "terminal_status": nxt.status.value,
            }
        )
        return 0
    _require_queryable(state, bundle)
    ranked = bundle.recommend(state)
    _emit(
        {
            "schema_version": 1,
            "kind": "recommendation",
            "bundle_id": bundle.bundle_id,
            "state": _state_doc(state),
            "actions": [
                {"action": action.name, "value": value} for action, value in ranked
            ],
        }
    )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    state = _parse_state(args.state)
    _require_queryable(state, bundle)
    summary = estimate_win_probability(
        state, bundle.policy, bundle.model, args.episodes, args.seed
    )
    _emit(
        {
            "schema_version": 1,
            "kind": "simulation_summary",
            "bundle_id": bundle.bundle_id,
            "state": _state_doc(state),
            "episodes": summary.episodes,
            "wins": summary.wins,
            "win_rate": summary.win_rate,
            "standard_error": summary.standard_error,
            "seed": summary.seed,
        }
    )
    return 0


def _cmd_learn(args: argparse.Namespace) -> int:
    bounds = Bounds(args.max_runs, args.max_balls, args.max_wickets)
    reward = RewardSpec(args.win_reward, args.loss_reward, args.wicket_penalty)
    env = ChaseEnv(_load_model(args.model), reward, bounds)
    config = LearnConfig(
        episodes=args.episodes,
        seed=args.seed,
        learning_rate=args.learning_rate,
        epsilon=args.epsilon,
        discount=args.discount,
        initial_q=args.initial_q,
    )
    learner = qlearn if args.algo == "qlearn" else sarsa
    table, curve = learner(env, config)
    docs.dump(docs.q_table_to_doc(table), args.out)
    if args.curve_csv is not None:
        Path(args.curve_csv).write_text(curve.to_csv_text(), encoding="utf-8")
    start = MatchState(bounds.max_runs, bounds.max_balls, bounds.max_wickets)
    _emit(
        {
            "schema_version": 1,
            "kind": "learn_summary",
            "algo": args.algo,
            "episodes": args.episodes,
            "seed": args.seed,
            "greedy_start_value": table.greedy_value(start),
            "out": str(args.out),
        }
    )
    return 0


def _cmd_bandit(args: argparse.Namespace) -> int:
    arms = _parse_floats(args.arms, "--arms")
    instance = BanditInstance(arms, args.horizon)
    trace = run_bandit_sim(
        instance,
        args.algo,
        args.seed,
        epsilon=args.epsilon,
        temperature=args.temperature,
    )
    if args.trace_csv is not None:
        Path(args.trace_csv).write_text(trace.to_csv_text(), encoding="utf-8")
    pulls = [0] * len(arms)
    for arm in trace.selections:
        pulls[arm] += 1
    _emit(
        {
            "schema_version": 1,
            "kind": "bandit_summary",
            "algo": args.algo,
            "arms": list(arms),
            "horizon": args.horizon,
            "seed": args.seed,
            "pulls": pulls,
            "final_regret": trace.cumulative_pseudo_regret[-1],
        }
    )
    return 0


def _cmd_belief(args: argparse.Namespace) -> int:
    scores = _parse_floats(args.scores, "--scores")
    prior = NormalBelief(args.prior_mean, args.prior_variance)
    obs = ObservationModel(args.obs_variance)
    posterior = update_belief_batch(prior, scores, obs)
    pred_mean, pred_variance = posterior_predictive(posterior, obs)
    low, high = credible_interval(posterior, args.interval)
    if args.out is not None:
        docs.dump(
            docs.belief_snapshot_to_doc(args.player_id, posterior, len(scores)),
            args.out,
        )
    _emit(
        {
            "schema_version": 1,
            "kind": "belief_summary",
            "player_id": args.player_id,
            "observations": len(scores),
            "posterior_mean": posterior.mean,
            "posterior_variance": posterior.variance,
            "predictive_mean": pred_mean,
            "predictive_variance": pred_variance,
            "interval_mass": args.interval,
            "interval_low": low,
            "interval_high": high,
        }
    )
    return 0


def _cmd_transfer(args: argparse.Namespace) -> int:
    if args.domain == "manufacturing":
        model = _load_model(args.model)
        params = ManufacturingParams(
            units_needed=args.units,
            periods_remaining=args.periods,
            machines_working=args.machines,
            intensity_rows={a.name: model.row(a) for a in ACTION_ORDER},
        )
        mdp = build_manufacturing_mdp(params)
        solution = value_iterate(mdp)
        values = with_terminal_rewards(
            solution.values, win_reward=1.0, loss_reward=0.0
        )
        start = (args.units, args.periods, args.machines)
        body = {
            "schema_version": 1,
            "kind": "transfer_summary",
            "domain": "manufacturing",
            "start_value": values[start],
            "start_policy": solution.policy.get(start),
            "sweeps": solution.report.sweeps,
            "converged": solution.report.converged,
        }
        if args.out is not None:
            docs.dump(
                {
                    "schema_version": 1,
                    "kind": "transfer_values",
                    "domain": "manufacturing",
                    "values": {
                        f"{r},{b},{w}": v for (r, b, w), v in sorted(values.items())
                    },
                },
                args.out,
            )
            body["out"] = str(args.out)
        _emit(body)
        return 0

    demand: dict[int, float] = {}
    for part in args.demand.split(","):
        left, _, right = part.partition(":")
        try:
            demand[int(left)] = float(right)
        except ValueError:
            raise ValueError(
                f"--demand entries must look like 'units:probability', got {part!r}"
            ) from None
    params = InventoryParams(
        max_stock=args.max_stock,
        max_order=args.max_order,
        demand_distribution=demand,
        holding_cost=args.holding_cost,
        stockout_cost=args.stockout_cost,
        order_cost=args.order_cost,
        discount=args.discount,
        spoilage_fraction=args.spoilage,
    )
    mdp = build_inventory_mdp(params)
    solution = value_iterate(mdp)
    body = {
        "schema_version": 1,
        "kind": "transfer_summary",
        "domain": "inventory",
        "values": {str(s): v for s, v in sorted(solution.values.items())},
        "policy": {str(s): a for s, a in sorted(solution.policy.items())},
        "sweeps": solution.report.sweeps,
        "converged": solution.report.converged,
    }
    if args.out is not None:
        docs.dump(body, args.out)
        body = dict(body)
        body["out"] = str(args.out)
    _emit(body)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import create_app, load_bundles, resolve_bind

    bundles = load_bundles(args.bundle)
    app = create_app(bundles)
    host, port = resolve_bind(args.bind, args.port)
    if args.check:
        _emit(
            {
                "schema_version": 1,
                "kind": "serve_check",
                "bind": host,
                "port": port,
                "bundles": [b.bundle_id for b in bundles],
            }
        )
        return 0
    import uvicorn

    _note(f"serving {len(bundles)} bundle(s) on {host}:{port}")
    uvicorn.run(app, host=host, port=port)
    return 0


# --- parser wiring -----------------------------------------------------


def _add_bounds_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--max-runs", type=int, required=True)
    sub.add_argument("--max-balls", type=int, required=True)
    sub.add_argument("--max-wickets", type=int, required=True)


def _add_reward_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--win-reward", type=float, default=1.0)
    sub.add_argument("--loss-reward", type=float, default=0.0)
    sub.add_argument("--wicket-penalty", type=float, default=0.0)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="chasekit",
        description="Run-chase decision tools: estimate, solve, explore, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("estimate", help="fit a transition model from delivery data")
    p.add_argument("--data", required=True, help="ball-by-ball CSV file")
    p.add_argument("--out", required=True, help="where to write the model document")
    p.add_argument("--min-samples", type=int, default=50)
    p.add_argument("--alpha", type=float, default=1.0, help="smoothing pseudo-count")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("solve", help="solve the chase and write a value document")
    _add_bounds_flags(p)
    _add_reward_flags(p)
    p.add_argument("--model", help="model document; omit for the built-in baseline")
    p.add_argument("--out", required=True, help="where to write the value document")
    p.add_argument("--policy-out", help="also write the greedy policy document")
    p.add_argument("--bundle-out", help="also write a hash-linked bundle document")
    p.add_argument("--bundle-id", default="cli", help="bundle identifier")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("recommend", help="rank actions for a state from a bundle")
    p.add_argument("--state", required=True, help="runs,balls,wickets")
    p.add_argument("--bundle", required=True, help="bundle document")
    p.add_argument(
        "--apply",
        choices=OUTCOME_TOKENS,
        help="instead of ranking, advance the state by this ball outcome",
    )
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("simulate", help="Monte Carlo win probability under a bundle")
    p.add_argument("--state", required=True, help="runs,balls,wickets")
    p.add_argument("--bundle", required=True, help="bundle document")
    p.add_argument("--episodes", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("learn", help="tabular model-free control on the chase")
    p.add_argument("--algo", choices=("qlearn", "sarsa"), required=True)
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    _add_bounds_flags(p)
    _add_reward_flags(p)
    p.add_argument("--model", help="model document; omit for the built-in baseline")
    p.add_argument("--out", required=True, help="where to write the Q-table document")
    p.add_argument("--curve-csv", help="also write the learning curve as CSV")
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--discount", type=float, default=1.0)
    p.add_argument("--initial-q", type=float, default=0.5)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("bandit", help="simulate a bandit policy on known arms")
    p.add_argument("--arms", required=True, help="true means, comma-separated")
    p.add_argument("--algo", choices=POLICY_NAMES, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--temperature", type=float, default=0.1)
    p.add_argument("--trace-csv", help="write the per-step regret trace as CSV")
    p.set_defaults(func=_cmd_bandit)

    p = sub.add_parser("belief", help="update a normal ability belief from scores")
    p.add_argument("--prior-mean", type=float, required=True)
    p.add_argument("--prior-variance", type=float, required=True)
    p.add_argument("--obs-variance", type=float, required=True)
    p.add_argument("--scores", required=True, help="observed scores, comma-separated")
    p.add_argument("--interval", type=float, default=0.9, help="credible mass")
    p.add_argument("--player-id", default="player")
    p.add_argument("--out", help="also write a belief snapshot document")
    p.set_defaults(func=_cmd_belief)

    p = sub.add_parser("transfer", help="solve a re-skinned countdown domain")
    domain = p.add_subparsers(dest="domain", required=True, metavar="DOMAIN")

    m = domain.add_parser("manufacturing", help="units/periods/machines countdown")
    m.add_argument("--units", type=int, required=True)
    m.add_argument("--periods", type=int, required=True)
    m.add_argument("--machines", type=int, required=True)
    m.add_argument("--model", help="chase model document supplying intensity rows")
    m.add_argument("--out", help="also write the value grid as a document")
    m.set_defaults(func=_cmd_transfer)

    i = domain.add_parser("inventory", help="discounted stock-control MDP")
    i.add_argument("--max-stock", type=int, required=True)
    i.add_argument("--max-order", type=int, required=True)
    i.add_argument("--demand", required=True, help="e.g. 0:0.2,1:0.5,2:0.3")
    i.add_argument("--holding-cost", type=float, default=0.0)
    i.add_argument("--stockout-cost", type=float, default=0.0)
    i.add_argument("--order-cost", type=float, default=0.0)
    i.add_argument("--discount", type=float, default=0.95)
    i.add_argument("--spoilage", type=float, default=0.0)
    i.add_argument("--out", help="also write values and policy as a document")
    i.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("serve", help="run the HTTP decision service")
    p.add_argument(
        "--bundle",
        action="append",
        required=True,
        help="bundle document (repeatable)",
    )
    p.add_argument("--bind", help="listen address (env CHASE_BIND overrides)")
    p.add_argument("--port", type=int, help="listen port (env CHASE_PORT overrides)")
    p.add_argument(
        "--check",
        action="store_true",
        help="load bundles and report the configuration without serving",
    )
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse --help exits 0; _Parser.error raises 1
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        # KeyError's str() quotes the key; everything else reads fine as-is
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
