import pytest

from chasekit.match import RewardSpec, default_transition_model
from chasekit.solver import Bounds, solve_chase


@pytest.fixture(scope="session")
def default_model():
    return default_transition_model()


@pytest.fixture(scope="session")
def win_reward():
    return RewardSpec()


@pytest.fixture(scope="session")
def small_solution(default_model, win_reward):
    """Default model solved on a (12, 8, 4) grid: (values, policy, report)."""
    return solve_chase(default_model, win_reward, Bounds(12, 8, 4))
