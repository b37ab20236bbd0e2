import numpy as np
import pytest

from acblocks.config import BrainConfig, ProgramConfig
from acblocks.stacks import (
    Intersection, StackError, StackRep, build_brain, count_strong_assemblies, decode_block,
    intersect, intersect_readouts, parse_stack, pop_top, put_block, read_chain, readout,
)

CFG = BrainConfig(n=100_000, k=50, p=0.1, beta=0.1)


def fresh(seed=0, blocks=7, banks=("",)):
    brain, regs = build_brain(CFG.replace(seed=seed), blocks, banks)
    return brain, regs


@pytest.fixture(scope="module")
def fig_c():
    # seed 1 is a capture case: element 4 lands on element 1's Node0 assembly
    brain, regs = fresh(seed=0)
    return brain, parse_stack(brain, regs[""], [4, 5, 3, 1, 2])


def test_parse_rep(fig_c):
    _, rep = fig_c
    assert rep.head_node == 0 and rep.length == 5
    assert rep.shadow == [4, 5, 3, 1, 2]
    assert rep.rounds == [ProgramConfig().strong_min_rounds] * 5


def test_parse_leaves_everything_inhibited(fig_c):
    brain, _ = fig_c
    assert all(a.inhibited for a in brain.areas.values())
    assert all(f.inhibited for f in brain.fibers.values() if not f.recurrent)


def test_fig_c_readout(fig_c):
    brain, rep = fig_c
    chain = read_chain(brain, rep)
    assert chain.blocks == [4, 5, 3, 1, 2]
    assert min(chain.scores) >= ProgramConfig().decode_threshold


def test_readout_is_repeatable(fig_c):
    brain, rep = fig_c
    assert readout(brain, rep) == readout(brain, rep) == [4, 5, 3, 1, 2]


def test_readout_prefix(fig_c):
    brain, rep = fig_c
    assert readout(brain, rep, 2) == [4, 5]


def test_strong_count_bounded(fig_c):
    brain, rep = fig_c
    assert 0 <= count_strong_assemblies(brain, rep) <= 5


def test_singleton():
    brain, regs = fresh()
    rep = parse_stack(brain, regs[""], [7])
    assert rep.head_node == 0 and len(rep.rounds) == 1
    assert readout(brain, rep) == [7]


def test_empty_rep():
    brain, regs = fresh()
    rep = StackRep(regs[""])
    assert readout(brain, rep) == []
    assert count_strong_assemblies(brain, rep) == 0
    with pytest.raises(StackError):
        pop_top(brain, rep)


@pytest.mark.parametrize("stack", [[], [1, 1], [0], [8]])
def test_parse_rejects(stack):
    brain, regs = fresh()
    with pytest.raises(StackError):
        parse_stack(brain, regs[""], stack)


@pytest.mark.parametrize("seed", range(3))
def test_length_three_roundtrip(seed):
    brain, regs = fresh(seed)
    stack = [int(x) for x in np.random.default_rng(seed).permutation(7)[:3] + 1]
    assert readout(brain, parse_stack(brain, regs[""], stack)) == stack


def test_pop_fig_d():
    brain, regs = fresh(seed=0)
    rep = parse_stack(brain, regs[""], [4, 5, 3, 1, 2])
    assert pop_top(brain, rep) == 4
    assert rep.length == 4 and rep.head_node == 1
    assert readout(brain, rep) == [5, 3, 1, 2]


def test_pop_singleton():
    brain, regs = fresh()
    rep = parse_stack(brain, regs[""], [3])
    assert pop_top(brain, rep) == 3
    assert rep.length == 0 and rep.head_assembly is None
    assert readout(brain, rep) == []


def test_pop_records_table():
    brain, regs = fresh(banks=("", "T_"))
    rep = parse_stack(brain, regs[""], [2, 6, 1])
    table = StackRep(regs["T_"])
    assert pop_top(brain, rep, table) == 2
    assert pop_top(brain, rep, table) == 6
    assert readout(brain, table) == [6, 2]
    assert readout(brain, rep) == [1]


def test_put_fig_e():
    brain, regs = fresh(seed=0)
    rep = parse_stack(brain, regs[""], [5, 3, 1, 2])
    put_block(brain, rep, 4)
    assert rep.length == 5 and rep.head_node == 2
    assert readout(brain, rep) == [4, 5, 3, 1, 2]


def test_put_on_empty_restarts_chain():
    brain, regs = fresh()
    rep = StackRep(regs[""])
    put_block(brain, rep, 6)
    put_block(brain, rep, 2)
    assert readout(brain, rep) == [2, 6]


def test_pop_then_put_restores():
    brain, regs = fresh(seed=2)
    rep = parse_stack(brain, regs[""], [3, 1, 2])
    block = pop_top(brain, rep)
    put_block(brain, rep, block)
    assert readout(brain, rep) == [3, 1, 2]


def test_put_guards():
    brain, regs = fresh()
    rep = parse_stack(brain, regs[""], [3, 1])
    with pytest.raises(StackError):
        put_block(brain, rep, 1)
    with pytest.raises(StackError):
        put_block(brain, rep, 9)


def test_intersect_fig_a():
    brain, regs = fresh(seed=0, banks=("A_", "B_"))
    a = parse_stack(brain, regs["A_"], [4, 5, 3, 1, 2])
    b = parse_stack(brain, regs["B_"], [4, 1, 2])
    assert intersect(brain, a, b) == Intersection(2, 1, False)


def test_intersect_readouts():
    assert intersect_readouts([3, 1, 2], 3, [3, 1, 2], 3) == Intersection(3, 3)
    assert intersect_readouts([1, 2], 2, [2, 1], 2) == Intersection(0, None)
    assert intersect_readouts([1], 2, [2, 1], 2).degraded


def test_decode_block_silent_area():
    brain, _ = fresh()
    assert decode_block(brain)[1] == 0.0
