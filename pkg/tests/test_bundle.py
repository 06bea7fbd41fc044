"""Bundle construction, hash linking, and what-if breakdowns."""

import pytest

from chasekit import docs
from chasekit.bundle import ModelBundle, build_bundle, load_bundle, save_bundle
from chasekit.match import (
    ACTION_ORDER,
    BallOutcome,
    MatchState,
    OutcomeDistribution,
    RewardSpec,
    aggressive_row,
    single_row_model,
)
from chasekit.solver import Bounds, rank_actions, solve_chase


@pytest.fixture(scope="module")
def bundle(default_model, win_reward):
    return build_bundle(
        "demo", default_model, win_reward, Bounds(8, 6, 3), created_at="2026-08-18T00:00:00Z"
    )


class TestBuildBundle:
    def test_fields_and_properties(self, bundle, win_reward):
        assert bundle.bundle_id == "demo"
        assert bundle.created_at == "2026-08-18T00:00:00Z"
        assert bundle.bounds == Bounds(8, 6, 3)
        assert bundle.reward == win_reward
        assert bundle.model_hash == docs.model_hash(bundle.model)

    def test_tables_solved_from_the_bundled_model(self, bundle, win_reward):
        values, policy, _ = solve_chase(bundle.model, win_reward, bundle.bounds)
        assert (values.values == bundle.values.values).all()
        assert (policy.actions == bundle.policy.actions).all()

    def test_model_is_canonicalized_before_solving(self, win_reward):
        # a model with non-representable probabilities must be quantized
        # first, so saved tables are exact solutions of the saved model
        row = OutcomeDistribution.from_map(
            {BallOutcome.DOT: 1 / 3, BallOutcome.ONE: 1 / 3, BallOutcome.FOUR: 1 / 3}
        )
        built = build_bundle("thirds", single_row_model(row), win_reward, Bounds(4, 3, 2))
        text = docs.dumps(docs.model_to_doc(built.model))
        reparsed = docs.model_from_doc(docs.loads(text))
        for a in ACTION_ORDER:
            assert built.model.row(a).probs == reparsed.row(a).probs

    def test_empty_bundle_id_rejected(self, default_model, win_reward):
        with pytest.raises(ValueError, match="bundle_id"):
            build_bundle("", default_model, win_reward, Bounds(4, 3, 2))

    def test_hash_link_enforced_on_construction(self, bundle, default_model):
        with pytest.raises(ValueError, match="hash"):
            ModelBundle(
                bundle_id="tampered",
                created_at=bundle.created_at,
                model=bundle.model,
                model_hash="0" * 64,
                values=bundle.values,
                policy=bundle.policy,
            )

    def test_mismatched_table_bounds_rejected(self, bundle, default_model, win_reward):
        other_values, _, _ = solve_chase(default_model, win_reward, Bounds(4, 3, 2))
        with pytest.raises(ValueError, match="bounds"):
            ModelBundle(
                bundle_id="mixed",
                created_at=bundle.created_at,
                model=bundle.model,
                model_hash=bundle.model_hash,
                values=other_values,
                policy=bundle.policy,
            )


class TestRecommend:
    def test_matches_rank_actions_exactly(self, bundle):
        state = MatchState(7, 5, 2)
        got = bundle.recommend(state)
        want = rank_actions(state, bundle.model, bundle.reward, bundle.values)
        assert got == want

    def test_terminal_state_rejected(self, bundle):
        with pytest.raises(ValueError, match="terminal"):
            bundle.recommend(MatchState(0, 5, 2))


class TestWhatIf:
    def test_values_equal_recommend_bit_for_bit(self, bundle):
        state = MatchState(6, 4, 3)
        breakdown = bundle.what_if(state)
        ranked = bundle.recommend(state)
        assert [(aw.action, aw.value) for aw in breakdown.per_action] == ranked

    def test_contributions_sum_to_the_action_value(self, bundle):
        breakdown = bundle.what_if(MatchState(8, 6, 3))
        for aw in breakdown.per_action:
            assert sum(br.contribution for br in aw.branches) == aw.value

    def test_branches_reverify_against_the_value_table(self, bundle):
        state = MatchState(5, 3, 2)
        for aw in bundle.what_if(state).per_action:
            for br in aw.branches:
                assert br.successor_value == bundle.values.value_at(br.successor)
                assert br.probability == bundle.model.row(aw.action).p(br.outcome)
            recomputed = sum(
                br.probability * br.successor_value for br in aw.branches
            )
            assert abs(recomputed - aw.value) <= 1e-12

    def test_wicket_branch_folds_the_penalty(self, default_model):
        reward = RewardSpec(win_reward=1.0, loss_reward=0.0, per_wicket_penalty=0.1)
        built = build_bundle("pen", default_model, reward, Bounds(4, 3, 2))
        aw = built.what_if(MatchState(4, 3, 2)).per_action[0]
        wicket = next(br for br in aw.branches if br.outcome is BallOutcome.WICKET)
        assert wicket.contribution == wicket.probability * (wicket.successor_value - 0.1)
        assert sum(br.contribution for br in aw.branches) == aw.value

    def test_ties_keep_aggression_order(self, win_reward):
        built = build_bundle(
            "flat", single_row_model(aggressive_row()), win_reward, Bounds(4, 3, 2)
        )
        breakdown = built.what_if(MatchState(4, 3, 2))
        assert [aw.action for aw in breakdown.per_action] == list(ACTION_ORDER)

    def test_zero_probability_outcomes_omitted(self, bundle):
        # the calibrated aggressive row has no three
        aw = next(
            x
            for x in bundle.what_if(MatchState(8, 6, 3)).per_action
            if x.action.name == "AGGRESSIVE"
        )
        assert all(br.outcome is not BallOutcome.THREE for br in aw.branches)
        assert all(br.probability > 0.0 for br in aw.branches)

    def test_terminal_state_rejected(self, bundle):
        with pytest.raises(ValueError, match="terminal"):
            bundle.what_if(MatchState(8, 0, 3))


class TestSaveLoad:
    def test_round_trip_preserves_identity_and_reverifies(self, bundle, tmp_path):
        path = tmp_path / "demo.doc"
        save_bundle(bundle, path)
        loaded = load_bundle(path)
        assert loaded.bundle_id == bundle.bundle_id
        assert loaded.created_at == bundle.created_at
        assert loaded.model_hash == bundle.model_hash
        state = MatchState(8, 6, 3)
        for aw in loaded.what_if(state).per_action:
            recomputed = sum(br.probability * br.successor_value for br in aw.branches)
            assert abs(recomputed - aw.value) <= 1e-12
        # stored tables round-trip within emitter precision
        assert abs(loaded.values.value_at(state) - bundle.values.value_at(state)) <= 5e-13

    def test_resave_is_byte_identical(self, bundle, tmp_path):
        first = tmp_path / "a.doc"
        second = tmp_path / "b.doc"
        save_bundle(bundle, first)
        save_bundle(load_bundle(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_tampered_model_refused(self, bundle, tmp_path):
        path = tmp_path / "demo.doc"
        save_bundle(bundle, path)
        doc = docs.load(path)
        doc["model"]["rows"]["BALANCED"]["0"] = 0.5
        doc["model"]["rows"]["BALANCED"]["1"] = 0.2
        docs.dump(doc, path)
        with pytest.raises(ValueError, match="hash"):
            load_bundle(path)
