import pytest

from acblocks.instances import random_task
from acblocks.planner import (
    NAIVE, TWO_APPROX, Match, match_stacks, misplaced_count, plan_2approx, plan_naive,
)
from acblocks.world import (
    BWConfig, PutOn, ToTable, WorldError, all_configs, distances_from, validate_plan,
)

FIG_A_INIT = BWConfig.of([4, 1, 2], [3, 5])
FIG_A_GOAL = BWConfig.of([4, 5, 3, 1, 2])


def test_match_fig_a():
    matches = match_stacks(FIG_A_INIT, FIG_A_GOAL)
    i = FIG_A_INIT.stacks.index((4, 1, 2))
    assert matches == [Match(i, 0, 2)]


def test_match_identity():
    c = BWConfig.of([1, 2], [3, 4, 5], [6])
    matches = match_stacks(c, c)
    assert [(m.init, m.goal, m.height) for m in matches] == [
        (i, i, len(s)) for i, s in enumerate(c.stacks)]


def test_match_singletons():
    init, goal = BWConfig.of([1], [2], [3]), BWConfig.of([3], [1], [2])
    assert all(m.height <= 1 for m in match_stacks(init, goal))


def test_match_pairs_stacks_with_common_bottoms():
    init = BWConfig.of([4, 2, 3], [1, 5])
    goal = BWConfig.of([1, 2, 3], [4, 5])
    matches = match_stacks(init, goal)
    assert {(init.stacks[m.init], goal.stacks[m.goal], m.height) for m in matches} == {
        ((4, 2, 3), (1, 2, 3), 2), ((1, 5), (4, 5), 1)}


def test_mismatched_blocks():
    with pytest.raises(WorldError):
        match_stacks(BWConfig.of([1]), BWConfig.of([2]))
    with pytest.raises(WorldError):
        plan_naive(BWConfig.of([1, 2]), BWConfig.of([1]))


def test_misplaced_fig_a():
    assert misplaced_count(FIG_A_INIT, FIG_A_GOAL) == 3


@pytest.mark.parametrize("planner", [plan_naive, plan_2approx])
def test_identity_is_empty(planner):
    c = BWConfig.of([7])
    assert planner(c, c).moves == []


def test_2approx_identity_multi():
    c = BWConfig.of([3, 1], [2, 5, 4])
    assert plan_2approx(c, c).moves == []


def test_2approx_fig_a():
    plan = plan_2approx(FIG_A_INIT, FIG_A_GOAL)
    assert plan.moves == [ToTable(4), ToTable(3), PutOn(3, 1), PutOn(5, 3), PutOn(4, 5)]
    assert plan.provenance == TWO_APPROX
    assert len(plan) <= 2 * misplaced_count(FIG_A_INIT, FIG_A_GOAL)


def test_naive_reverse_three():
    plan = plan_naive(BWConfig.of([1, 2, 3]), BWConfig.of([3, 2, 1]))
    assert plan.moves == [ToTable(1), ToTable(2), PutOn(2, 1), PutOn(3, 2)]
    assert plan.provenance == NAIVE


def test_plan_text():
    plan = plan_2approx(FIG_A_INIT, FIG_A_GOAL)
    assert plan.text() == "TABLE 4\nTABLE 3\nPUT 3 ON 1\nPUT 5 ON 3\nPUT 4 ON 5\n"


def random_tasks(count=100, s=10, max_stacks=5, max_height=7):
    return [random_task(s, max_stacks, max_height, seed) for seed in range(count)]


def test_naive_length_formula():
    for task in random_tasks():
        plan = plan_naive(task.initial, task.goal)
        s = task.num_blocks
        assert len(plan) == (s - len(task.initial.stacks)) + (s - len(task.goal.stacks))


def test_symbolic_plans_validate():
    for task in random_tasks():
        for planner in (plan_naive, plan_2approx):
            assert validate_plan(task.initial, task.goal, planner(task.initial, task.goal).moves)


def test_2approx_dominates_naive_on_random_tasks():
    for task in random_tasks():
        approx = plan_2approx(task.initial, task.goal)
        assert len(approx) <= len(plan_naive(task.initial, task.goal))
        assert len(approx) <= 2 * misplaced_count(task.initial, task.goal)


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_exhaustive_bound_small(s):
    # the five-block sweep lives in the acceptance suite
    configs = all_configs(list(range(1, s + 1)))
    for goal in configs:
        dist = distances_from(goal)
        for init in configs:
            approx = plan_2approx(init, goal)
            assert validate_plan(init, goal, approx.moves)
            assert len(approx) <= 2 * dist[init.key]
            assert len(approx) <= len(plan_naive(init, goal))
