import pytest

from llp.knapsack import KnapsackInstance
from llp.lis import LisInstance
from llp.obst import ChainInstance, ObstInstance
from llp.oracles import (
    CyclicPrecedence,
    InstanceTooLarge,
    oracle_chain,
    oracle_jobs,
    oracle_knapsack,
    oracle_lis,
    oracle_obst,
    tree_to_dict,
)


def test_lis_oracle():
    res = oracle_lis(LisInstance((35, 38, 27, 45, 32)))
    assert res.per_subproblem == {1: 1, 2: 2, 3: 1, 4: 3, 5: 2}
    assert res.optimum == 3
    assert res.witness == [1, 2, 4]
    assert oracle_lis(LisInstance((4,))).per_subproblem == {1: 1}
    gap = oracle_lis(LisInstance((35, 38, 27, 45, 32), gap_k=4))
    assert list(gap.per_subproblem.values()) == [1, 1, 1, 2, 2]


def test_obst_oracle():
    res = oracle_obst(ObstInstance((1, 2, 3)))
    assert res.optimum == 10
    assert tree_to_dict(res.witness)["key"] in (2, 3)
    assert oracle_obst(ObstInstance((7,))).optimum == 7
    assert oracle_obst(ObstInstance((1, 2, 3), forbidden_root=2)).optimum == 11


def test_knapsack_oracle():
    res = oracle_knapsack(KnapsackInstance((2, 3, 4), (3, 4, 5), 5))
    assert (res.optimum, res.witness) == (7, {1, 2})
    zero = oracle_knapsack(KnapsackInstance((2, 3, 4), (3, 4, 5), 0))
    assert (zero.optimum, zero.witness) == (0, set())
    implied = oracle_knapsack(KnapsackInstance((3, 2), (4, 10), 4, ((2, 1),)))
    assert implied.optimum == 4


def test_chain_oracle():
    assert oracle_chain(ChainInstance((10, 30, 5, 60))).optimum == 4500
    assert oracle_chain(ChainInstance((2, 3, 4))).optimum == 24
    assert oracle_chain(ChainInstance((2, 2, 2, 2))).optimum == 16


def test_jobs_oracle():
    assert list(oracle_jobs([1, 2, 1], [[], [1], [1, 2]]).per_subproblem.values()) == [1, 3, 4]
    assert list(oracle_jobs([4, 5, 6], [[], [], []]).per_subproblem.values()) == [4, 5, 6]
    diamond = oracle_jobs([1, 1, 2, 1], [[], [1], [1], [2, 3]])
    assert list(diamond.per_subproblem.values()) == [1, 2, 3, 4]
    assert diamond.witness == [1, 3, 4]


def test_cycle_detection():
    with pytest.raises(CyclicPrecedence):
        oracle_jobs([1, 1], [[2], [1]])


@pytest.mark.parametrize(
    "call",
    [
        lambda: oracle_lis(LisInstance(tuple(range(21)))),
        lambda: oracle_obst(ObstInstance((1,) * 11)),
        lambda: oracle_chain(ChainInstance((2,) * 12)),
        lambda: oracle_knapsack(KnapsackInstance((1,) * 21, (1,) * 21, 3)),
        lambda: oracle_jobs([1] * 21, [[]] * 21),
    ],
)
def test_enumeration_guard(call):
    with pytest.raises(InstanceTooLarge):
        call()
