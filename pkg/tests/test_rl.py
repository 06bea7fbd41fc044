"""Model-free learning: schedules, determinism, convergence, evaluators."""

import numpy as np
import pytest

import chasekit.rl as rl_module
from chasekit.match import (
    BallOutcome,
    BattingAction,
    MatchState,
    OutcomeDistribution,
    RewardSpec,
    aggressive_row,
    default_transition_model,
    single_row_model,
)
from chasekit.rl import (
    ChaseEnv,
    LearnConfig,
    QTable,
    greedy_policy_from,
    mc_evaluate,
    qlearn,
    sarsa,
    td_zero_evaluate,
)
from chasekit.solver import Bounds, evaluate_policy, solve_chase


def one_run_model():
    return single_row_model(OutcomeDistribution.from_map({BallOutcome.ONE: 1.0}))


def all_action_policy(bounds, code=0):
    actions = np.full((bounds[0] + 1, bounds[1] + 1, bounds[2] + 1), code, dtype=np.int8)
    actions[0, :, :] = -1
    actions[:, 0, :] = -1
    actions[:, :, 0] = -1
    actions.setflags(write=False)
    from chasekit.solver import PolicyTable

    return PolicyTable(bounds=bounds, actions=actions)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            LearnConfig(episodes=-1, seed=0)
        with pytest.raises(ValueError):
            LearnConfig(episodes=1, seed=0, learning_rate=0.0)
        with pytest.raises(ValueError):
            LearnConfig(episodes=1, seed=0, learning_rate=1.5)
        with pytest.raises(ValueError):
            LearnConfig(episodes=1, seed=0, epsilon=1.5)
        with pytest.raises(ValueError):
            LearnConfig(episodes=1, seed=0, discount=0.0)

    def test_epsilon_schedule_linear_then_floor(self):
        cfg = LearnConfig(episodes=1000, seed=0)
        assert cfg.epsilon_at(0) == 0.3
        assert cfg.epsilon_at(800) == 0.01
        assert cfg.epsilon_at(999) == 0.01
        mid = cfg.epsilon_at(400)
        assert 0.01 < mid < 0.3
        assert mid == pytest.approx(0.3 + (0.01 - 0.3) * 0.5)

    def test_epsilon_fixed_overrides_schedule(self):
        cfg = LearnConfig(episodes=1000, seed=0, epsilon=0.07)
        assert cfg.epsilon_at(0) == cfg.epsilon_at(999) == 0.07

    def test_alpha_schedule(self):
        cfg = LearnConfig(episodes=1, seed=0)
        assert cfg.alpha_at(1) == pytest.approx(100 / 101)
        assert cfg.alpha_at(900) == pytest.approx(0.1)
        fixed = LearnConfig(episodes=1, seed=0, learning_rate=0.25)
        assert fixed.alpha_at(1) == fixed.alpha_at(10_000) == 0.25


class TestEnv:
    def test_terminal_fixed_start_rejected(self):
        with pytest.raises(ValueError, match="terminal"):
            ChaseEnv(one_run_model(), RewardSpec(), Bounds(4, 4, 2), start=MatchState(4, 0, 2))

    def test_out_of_bounds_start_rejected(self):
        with pytest.raises(ValueError, match="outside bounds"):
            ChaseEnv(one_run_model(), RewardSpec(), Bounds(4, 4, 2), start=MatchState(5, 4, 2))

    def test_exploring_starts_need_nonempty_grid(self):
        with pytest.raises(ValueError, match="non-terminal"):
            ChaseEnv(one_run_model(), RewardSpec(), Bounds(4, 0, 2))

    def test_reference_state(self):
        env = ChaseEnv(one_run_model(), RewardSpec(), Bounds(4, 4, 2))
        assert env.reference_state == MatchState(4, 4, 2)
        fixed = ChaseEnv(one_run_model(), RewardSpec(), Bounds(4, 4, 2), start=MatchState(2, 3, 1))
        assert fixed.reference_state == MatchState(2, 3, 1)


class TestControl:
    def test_zero_episodes_initial_table(self):
        env = ChaseEnv(default_transition_model(), RewardSpec(), Bounds(5, 4, 2))
        for learner in (qlearn, sarsa):
            table, curve = learner(env, LearnConfig(episodes=0, seed=3))
            assert np.all(table.values == 0.5)
            assert np.all(table.counts == 0)
            assert curve.points == ()

    def test_one_ball_full_credit_backup(self):
        # win is certain; alpha=1 writes the observed return verbatim
        env = ChaseEnv(one_run_model(), RewardSpec(), Bounds(1, 1, 1), start=MatchState(1, 1, 1))
        cfg = LearnConfig(episodes=1, seed=5, learning_rate=1.0, epsilon=0.0)
        table, _ = qlearn(env, cfg)
        start = MatchState(1, 1, 1)
        assert table.entry(start, BattingAction.ULTRA_DEFENSIVE) == 1.0
        assert table.visit_count(start, BattingAction.ULTRA_DEFENSIVE) == 1
        assert table.greedy_value(start) == 1.0

    def test_epsilon_zero_qlearn_equals_sarsa(self):
        env = ChaseEnv(one_run_model(), RewardSpec(), Bounds(4, 5, 2), start=MatchState(4, 5, 2))
        cfg = LearnConfig(episodes=60, seed=9, epsilon=0.0, learning_rate=0.5)
        qt, _ = qlearn(env, cfg)
        st, _ = sarsa(env, cfg)
        assert np.array_equal(qt.values, st.values)
        assert np.array_equal(qt.counts, st.counts)

    def test_identical_config_identical_table(self):
        env = ChaseEnv(default_transition_model(), RewardSpec(), Bounds(6, 4, 2))
        for learner in (qlearn, sarsa):
            a, _ = learner(env, LearnConfig(episodes=400, seed=42))
            b, _ = learner(env, LearnConfig(episodes=400, seed=42))
            assert np.array_equal(a.values, b.values)
            assert np.array_equal(a.counts, b.counts)

    def test_q_values_stay_in_unit_interval(self):
        env = ChaseEnv(default_transition_model(), RewardSpec(), Bounds(6, 4, 2))
        table, _ = qlearn(env, LearnConfig(episodes=20_000, seed=11))
        assert table.values.min() >= 0.0
        assert table.values.max() <= 1.0

    def test_unvisited_entries_keep_initial_value(self):
        env = ChaseEnv(default_transition_model(), RewardSpec(), Bounds(8, 6, 3))
        table, _ = qlearn(env, LearnConfig(episodes=10, seed=2, initial_q=0.4))
        untouched = table.counts == 0
        assert untouched.any()
        assert np.all(table.values[untouched] == 0.4)

    def test_qlearn_converges_on_small_grid(self):
        model = default_transition_model()
        reward = RewardSpec()
        bounds = Bounds(4, 3, 2)
        env = ChaseEnv(model, reward, bounds)
        values, _, _ = solve_chase(model, reward, bounds)
        table, _ = qlearn(env, LearnConfig(episodes=300_000, seed=17))
        got = evaluate_policy(model, reward, greedy_policy_from(table))
        gap = np.abs(np.asarray(got.values)[1:, 1:, 1:] - np.asarray(values.values)[1:, 1:, 1:])
        assert gap.max() <= 0.05

    def test_sarsa_converges_on_small_grid(self):
        model = default_transition_model()
        reward = RewardSpec()
        bounds = Bounds(4, 3, 2)
        env = ChaseEnv(model, reward, bounds)
        values, _, _ = solve_chase(model, reward, bounds)
        table, _ = sarsa(env, LearnConfig(episodes=300_000, seed=17))
        got = evaluate_policy(model, reward, greedy_policy_from(table))
        gap = np.abs(np.asarray(got.values)[1:, 1:, 1:] - np.asarray(values.values)[1:, 1:, 1:])
        assert gap.max() <= 0.05


class TestCurve:
    def test_checkpoints_strictly_increasing_and_final(self):
        env = ChaseEnv(default_transition_model(), RewardSpec(), Bounds(5, 3, 2))
        _, curve = qlearn(env, LearnConfig(episodes=1003, seed=1))
        episodes = [p.episode for p in curve.points]
        assert episodes == sorted(set(episodes))
        assert episodes[-1] == 1003
        assert all(0.0 <= p.greedy_value <= 1.0 for p in curve.points)
        assert all(p.max_q_error is None for p in curve.points)

    def test_reference_enables_q_error_tracking(self):
        model = default_transition_model()
        reward = RewardSpec()
        bounds = Bounds(5, 3, 2)
        env = ChaseEnv(model, reward, bounds)
        values, _, _ = solve_chase(model, reward, bounds)
        table, curve = qlearn(env, LearnConfig(episodes=500, seed=1), reference=values)
        assert all(p.max_q_error is not None for p in curve.points)
        from chasekit.solver import action_value_grid

        qstar = action_value_grid(model, reward, values)
        direct = float(
            np.max(np.abs(table.values[1:, 1:, 1:, :] - qstar[1:, 1:, 1:, :]))
        )
        assert curve.points[-1].max_q_error == direct

    def test_csv_export_shape(self):
        env = ChaseEnv(default_transition_model(), RewardSpec(), Bounds(5, 3, 2))
        _, curve = qlearn(env, LearnConfig(episodes=100, seed=1))
        text = curve.to_csv_text()
        lines = text.strip().split("\n")
        assert lines[0] == "episode,greedy_value,max_q_error"
        assert len(lines) == len(curve.points) + 1


class TestGreedyPolicy:
    def build_table(self, bounds, values):
        counts = np.zeros(values.shape, dtype=np.int64)
        values = np.array(values)
        values.setflags(write=False)
        counts.setflags(write=False)
        return QTable(bounds=bounds, initial_q=0.5, values=values, counts=counts)

    def test_all_equal_picks_least_aggressive(self):
        bounds = Bounds(2, 2, 1)
        table = self.build_table(bounds, np.full((3, 3, 2, 5), 0.5))
        policy = greedy_policy_from(table)
        assert policy.action_at(MatchState(1, 1, 1)) == BattingAction.ULTRA_DEFENSIVE
        assert policy.action_at(MatchState(2, 2, 1)) == BattingAction.ULTRA_DEFENSIVE

    def test_dominant_action_chosen(self):
        bounds = Bounds(2, 2, 1)
        values = np.full((3, 3, 2, 5), 0.25)
        values[1, 1, 1, BattingAction.AGGRESSIVE] = 0.75
        policy = greedy_policy_from(self.build_table(bounds, values))
        assert policy.action_at(MatchState(1, 1, 1)) == BattingAction.AGGRESSIVE

    def test_terminal_cells_hold_no_action(self):
        bounds = Bounds(2, 2, 1)
        policy = greedy_policy_from(self.build_table(bounds, np.full((3, 3, 2, 5), 0.5)))
        with pytest.raises(ValueError, match="terminal"):
            policy.action_at(MatchState(0, 2, 1))

    def test_shift_invariance(self):
        # coarse grid keeps the +0.25 shift exact in binary
        rng = np.random.default_rng(8)
        bounds = Bounds(3, 3, 2)
        values = rng.integers(0, 8, size=(4, 4, 3, 5)) / 8.0
        base = greedy_policy_from(self.build_table(bounds, values))
        shifted = greedy_policy_from(self.build_table(bounds, values + 0.25))
        assert np.array_equal(np.asarray(base.actions), np.asarray(shifted.actions))


class TestMonteCarlo:
    def test_always_win_estimates_one(self):
        model = single_row_model(OutcomeDistribution.from_map({BallOutcome.SIX: 1.0}))
        bounds = Bounds(6, 3, 2)
        env = ChaseEnv(model, RewardSpec(), bounds)
        got = mc_evaluate(env, all_action_policy(bounds), episodes=500, seed=3)
        assert got
        assert all(v == 1.0 for v in got.values())

    def test_one_ball_within_three_standard_errors(self):
        model = single_row_model(aggressive_row())
        env = ChaseEnv(model, RewardSpec(), Bounds(1, 1, 1), start=MatchState(1, 1, 1))
        got = mc_evaluate(env, all_action_policy(Bounds(1, 1, 1)), episodes=100_000, seed=6)
        se = (0.65 * 0.35 / 100_000) ** 0.5
        assert abs(got[MatchState(1, 1, 1)] - 0.65) <= 3 * se

    def test_unreachable_states_absent(self):
        model = default_transition_model()
        bounds = Bounds(3, 2, 2)
        env = ChaseEnv(model, RewardSpec(), bounds, start=MatchState(2, 2, 2))
        got = mc_evaluate(env, all_action_policy(bounds), episodes=2_000, seed=4)
        assert MatchState(2, 2, 2) in got
        # a wicket always costs the ball too, so w=1 at full balls is unreachable
        assert MatchState(2, 2, 1) not in got
        assert MatchState(3, 2, 2) not in got

    def test_policy_hole_raises(self):
        bounds = Bounds(2, 2, 1)
        actions = np.full((3, 3, 2), -1, dtype=np.int8)
        from chasekit.solver import PolicyTable

        holed = PolicyTable(bounds=bounds, actions=actions)
        env = ChaseEnv(default_transition_model(), RewardSpec(), bounds, start=MatchState(2, 2, 1))
        with pytest.raises(ValueError, match="no action"):
            mc_evaluate(env, holed, episodes=10, seed=1)

    def test_chunked_run_matches_unchunked(self, monkeypatch):
        model = default_transition_model()
        bounds = Bounds(4, 3, 2)
        env = ChaseEnv(model, RewardSpec(), bounds)
        policy = all_action_policy(bounds, code=2)
        whole = mc_evaluate(env, policy, episodes=3_000, seed=12)
        monkeypatch.setattr(rl_module, "_MC_CHUNK", 700)
        chunked = mc_evaluate(env, policy, episodes=3_000, seed=12)
        assert whole == chunked

    def test_requires_episodes(self):
        env = ChaseEnv(default_transition_model(), RewardSpec(), Bounds(2, 2, 1))
        with pytest.raises(ValueError):
            mc_evaluate(env, all_action_policy(Bounds(2, 2, 1)), episodes=0, seed=1)


class TestTdZero:
    def test_one_step_full_credit(self):
        env = ChaseEnv(one_run_model(), RewardSpec(), Bounds(1, 1, 1), start=MatchState(1, 1, 1))
        cfg = LearnConfig(episodes=1, seed=5, learning_rate=1.0)
        got = td_zero_evaluate(env, all_action_policy(Bounds(1, 1, 1)), cfg)
        assert got[MatchState(1, 1, 1)] == 1.0

    def test_zero_episodes_all_initial(self):
        bounds = Bounds(3, 2, 2)
        env = ChaseEnv(default_transition_model(), RewardSpec(), bounds)
        got = td_zero_evaluate(env, all_action_policy(bounds), LearnConfig(episodes=0, seed=1))
        assert len(got) == 3 * 2 * 2
        assert all(v == 0.5 for v in got.values())

    def test_covers_every_nonterminal_state(self):
        bounds = Bounds(3, 2, 2)
        env = ChaseEnv(default_transition_model(), RewardSpec(), bounds)
        got = td_zero_evaluate(env, all_action_policy(bounds), LearnConfig(episodes=50, seed=1))
        for r in range(1, 4):
            for b in range(1, 3):
                for w in range(1, 3):
                    assert MatchState(r, b, w) in got

    def test_policy_hole_raises(self):
        bounds = Bounds(2, 2, 1)
        actions = np.full((3, 3, 2), -1, dtype=np.int8)
        from chasekit.solver import PolicyTable

        holed = PolicyTable(bounds=bounds, actions=actions)
        env = ChaseEnv(default_transition_model(), RewardSpec(), bounds)
        with pytest.raises(ValueError, match="no action"):
            td_zero_evaluate(env, holed, LearnConfig(episodes=5, seed=1))

    def test_tracks_fixed_policy_value(self):
        model = default_transition_model()
        reward = RewardSpec()
        bounds = Bounds(4, 3, 2)
        env = ChaseEnv(model, reward, bounds)
        _, policy, _ = solve_chase(model, reward, bounds)
        exact = evaluate_policy(model, reward, policy)
        got = td_zero_evaluate(env, policy, LearnConfig(episodes=200_000, seed=13))
        worst = max(abs(v - exact.value_at(s)) for s, v in got.items())
        assert worst <= 0.05
