import pytest
from hypothesis import given, settings, strategies as st

from acblocks.world import (
    BWConfig, MoveError, PutOn, ToTable, WorldError, all_configs, apply_move, common_suffix,
    distances_from, format_plan, legal_moves, optimal_plan_length, parse_plan, validate_plan,
)


def test_config_equality_ignores_stack_order():
    assert BWConfig.of([1, 2], [3]) == BWConfig.of([3], [1, 2])
    assert BWConfig.of([1, 2], [3]) != BWConfig.of([2, 1], [3])
    assert len({BWConfig.of([1], [2]), BWConfig.of([2], [1])}) == 1


def test_config_rejects_duplicates_and_empty_stacks():
    with pytest.raises(WorldError):
        BWConfig.of([1, 2], [2])
    with pytest.raises(WorldError):
        BWConfig.of([1], [])


def test_to_table():
    assert apply_move(BWConfig.of([1, 2, 3]), ToTable(1)) == BWConfig.of([2, 3], [1])


def test_put_on():
    assert apply_move(BWConfig.of([2, 3], [1]), PutOn(1, 2)) == BWConfig.of([1, 2, 3])


def test_to_table_needs_a_top():
    with pytest.raises(MoveError):
        apply_move(BWConfig.of([1, 2, 3]), ToTable(3))


def test_to_table_of_a_table_block():
    with pytest.raises(MoveError):
        apply_move(BWConfig.of([1], [2]), ToTable(1))


def test_put_on_needs_a_table_block_and_a_top():
    c = BWConfig.of([1, 2], [3])
    with pytest.raises(MoveError):
        apply_move(c, PutOn(1, 3))
    with pytest.raises(MoveError):
        apply_move(c, PutOn(3, 2))
    with pytest.raises(MoveError):
        apply_move(c, PutOn(3, 3))


def test_plan_text_roundtrip():
    moves = [ToTable(4), PutOn(3, 1)]
    text = format_plan(moves)
    assert text == "TABLE 4\nPUT 3 ON 1\n"
    assert parse_plan(text) == moves


@pytest.mark.parametrize("line", ["TABLE", "PUT 1 2", "PUT 1 ON x", "MOVE 1"])
def test_bad_plan_lines(line):
    with pytest.raises(WorldError, match="line 2"):
        parse_plan("TABLE 1\n" + line + "\n")


def test_validate_plan():
    init, goal = BWConfig.of([1, 2]), BWConfig.of([2, 1])
    moves = [ToTable(1), PutOn(2, 1)]
    assert validate_plan(init, goal, moves)
    bad = validate_plan(init, goal, moves[1:])
    assert not bad and bad.failed_index == 0
    short = validate_plan(init, goal, moves[:1])
    assert not short and short.failed_index == 1
    assert not validate_plan(init, goal, [])
    assert validate_plan(init, init, [])


def test_common_suffix():
    assert common_suffix([4, 5, 3, 1, 2], [4, 1, 2]) == (2, 1)
    assert common_suffix([1, 2], [1, 2]) == (2, 1)
    assert common_suffix([1, 2], [2, 1]) == (0, None)


def test_optimal_identity():
    c = BWConfig.of([1, 2, 3])
    assert optimal_plan_length(c, c) == 0


def test_optimal_swap_two():
    # TABLE 1 then PUT 2 ON 1; the BFS finds nothing shorter
    assert optimal_plan_length(BWConfig.of([1, 2]), BWConfig.of([2, 1])) == 2


def test_optimal_reverse_three():
    assert optimal_plan_length(BWConfig.of([1, 2, 3]), BWConfig.of([3, 2, 1])) == 4


def test_optimal_rejects_large_or_mismatched():
    with pytest.raises(WorldError):
        optimal_plan_length(BWConfig.of(list(range(1, 9))), BWConfig.of(list(range(1, 9))))
    with pytest.raises(WorldError):
        optimal_plan_length(BWConfig.of([1]), BWConfig.of([2]))


@pytest.mark.parametrize("s,count", [(1, 1), (2, 3), (3, 13), (4, 73), (5, 501)])
def test_all_configs_counts(s, count):
    # Lah numbers: ordered stacks of s labelled blocks
    configs = all_configs(list(range(1, s + 1)))
    assert len(configs) == count
    assert len(set(configs)) == count


def test_distances_agree_with_pairwise_search():
    blocks = [1, 2, 3]
    configs = all_configs(blocks)
    for goal in configs:
        dist = distances_from(goal)
        for init in configs:
            assert dist[init.key] == optimal_plan_length(init, goal)


@st.composite
def configs(draw, max_blocks=6):
    s = draw(st.integers(1, max_blocks))
    order = draw(st.permutations(list(range(1, s + 1))))
    cuts = draw(st.lists(st.booleans(), min_size=s - 1, max_size=s - 1))
    stacks, cur = [], [order[0]]
    for b, cut in zip(order[1:], cuts):
        if cut:
            stacks.append(cur)
            cur = []
        cur.append(b)
    stacks.append(cur)
    return BWConfig(tuple(tuple(x) for x in stacks))


@given(configs(), st.data())
@settings(max_examples=100)
def test_moves_preserve_blocks_and_invert(config, data):
    moves = list(legal_moves(config))
    if not moves:
        return
    move = data.draw(st.sampled_from(moves))
    after = apply_move(config, move)
    assert after.blocks == config.blocks
    if isinstance(move, ToTable):
        below = next(s for s in config.stacks if s[0] == move.block)[1]
        back = PutOn(move.block, below)
    else:
        back = ToTable(move.block)
    assert apply_move(after, back) == config
