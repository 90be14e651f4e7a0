import random

import pytest

from llp import ScheduleConfig, solve, solve_priority, solve_rounds
from llp.knapsack import (
    KnapsackInstance,
    incr_knapsack,
    knapsack_iterative,
    knapsack_spec,
    reconstruct_items,
    solve_knapsack,
)
from llp.oracles import oracle_knapsack

from instances import random_knapsack

BASIC = KnapsackInstance((2, 3, 4), (3, 4, 5), 5)
IMPLIED = KnapsackInstance((3, 2), (4, 10), 5, implications=((2, 1),))


def oracle_grid(instance):
    per = oracle_knapsack(instance).per_subproblem
    return [[per[(i, j)] for j in range(instance.W + 1)] for i in range(instance.n + 1)]


def check_witness(instance, items, optimum):
    assert sum(instance.v[i - 1] for i in items) == optimum
    assert sum(instance.w[i - 1] for i in items) <= instance.W
    assert all(b in items for a, b in instance.implications if a in items)


@pytest.mark.parametrize(
    "C, w, v, expected",
    [
        ([0, 0, 0, 0, 0], 2, 3, [0, 0, 3, 3, 3]),
        ([0, 0, 3, 3, 3], 3, 4, [0, 0, 3, 4, 4]),
        ([0, 1, 2], 5, 9, [0, 1, 2]),
    ],
)
def test_incremental_update(C, w, v, expected):
    assert incr_knapsack(C, w, v) == expected


def test_incremental_update_is_one_round():
    from llp.knapsack import incr_spec

    report = solve_rounds(incr_spec([0, 0, 3, 3, 3, 7], 2, 5))
    assert report.rounds == 1


@pytest.mark.parametrize(
    "instance, row",
    [
        (BASIC, [0, 0, 3, 4, 5, 7]),
        (KnapsackInstance((), (), 4), [0, 0, 0, 0, 0]),
        (KnapsackInstance((5,), (9,), 3), [0, 0, 0, 0]),
    ],
)
def test_iterative_driver(instance, row):
    assert knapsack_iterative(instance) == row
    assert oracle_grid(instance)[-1] == row


def test_iterative_driver_rejects_implications():
    with pytest.raises(ValueError):
        knapsack_iterative(IMPLIED)


def test_basic_table_and_items():
    table = solve_knapsack(BASIC)
    assert table.optimum == 7
    assert table.G == oracle_grid(BASIC)
    assert reconstruct_items(BASIC, table) == {1, 2}


def test_zero_capacity_column():
    inst = KnapsackInstance((1, 2), (5, 6), 0)
    table = solve_knapsack(inst)
    assert [row[0] for row in table.G] == [0, 0, 0]
    assert reconstruct_items(inst, table) == set()


def test_zero_values_take_nothing():
    inst = KnapsackInstance((1, 2, 3), (0, 0, 0), 6)
    assert reconstruct_items(inst, solve_knapsack(inst)) == set()


@pytest.mark.parametrize("mode", ["exact", "recorded"])
def test_implication_example(mode):
    table = solve_knapsack(IMPLIED, implication_mode=mode)
    assert table.G[2][5] == 14
    assert table.G[2][4] == 4
    assert reconstruct_items(IMPLIED, table) == {1, 2}
    smaller = KnapsackInstance(IMPLIED.w, IMPLIED.v, 4, IMPLIED.implications)
    assert reconstruct_items(smaller, solve_knapsack(smaller, implication_mode=mode)) == {1}


def test_recorded_sets_are_maintained():
    table = solve_knapsack(IMPLIED, implication_mode="recorded")
    for i in range(1, IMPLIED.n + 1):
        for j in range(IMPLIED.W + 1):
            items = {k for k in range(1, IMPLIED.n + 1) if table.S[i][j] >> (k - 1) & 1}
            assert sum(IMPLIED.v[k - 1] for k in items) == table.G[i][j]
            assert sum(IMPLIED.w[k - 1] for k in items) <= j


@pytest.mark.parametrize(
    "instance, recorded, exact",
    [
        # item 1 is worthless, so the recorded sets never contain it
        (KnapsackInstance((2, 1), (0, 30), 5, ((2, 1),)), 0, 30),
        # the best set for the lighter capacity omits item 2
        (KnapsackInstance((2, 3, 2), (21, 3, 25), 5, ((3, 2),)), 24, 28),
    ],
)
def test_recorded_witnesses_can_miss_the_optimum(instance, recorded, exact):
    assert solve_knapsack(instance, implication_mode="recorded").optimum == recorded
    table = solve_knapsack(instance)
    assert table.optimum == exact == oracle_knapsack(instance).optimum
    check_witness(instance, reconstruct_items(instance, table), exact)


def test_unknown_implication_mode():
    with pytest.raises(ValueError):
        knapsack_spec(IMPLIED, implication_mode="guess")


@pytest.mark.parametrize("seed", range(100))
def test_random_tables_match_oracle(seed):
    rng = random.Random(seed)
    inst = random_knapsack(rng, n_max=10, W_max=30, implications=seed % 3)
    mode = ["sequential", "rounds", "priority", "async-stale"][seed % 4]
    config = ScheduleConfig(mode=mode, workers=1 + seed % 4, seed=seed, staleness_bound=seed % 3)
    table = solve_knapsack(inst, config)
    assert table.G == oracle_grid(inst)
    check_witness(inst, reconstruct_items(inst, table), table.optimum)
    for i in range(inst.n + 1):
        for j in range(inst.W + 1):
            if j < inst.W:
                assert table.G[i][j] <= table.G[i][j + 1]
            if i < inst.n:
                assert table.G[i][j] <= table.G[i + 1][j]
    if not inst.implications:
        assert knapsack_iterative(inst) == table.G[inst.n]


@pytest.mark.parametrize("seed", range(20))
def test_priority_matches_rounds_and_updates_once(seed):
    inst = random_knapsack(random.Random(seed), n_max=8, W_max=25, implications=seed % 2)
    spec = knapsack_spec(inst)
    pri = solve_priority(spec)
    assert pri.values == solve_rounds(spec).values
    assert max(pri.per_index_advances, default=0) <= 1


@pytest.mark.parametrize("seed", range(100))
def test_stale_runs_on_basic_instance(seed):
    config = ScheduleConfig(mode="async", workers=1 + seed % 8, seed=seed, staleness_bound=seed % 6)
    assert solve_knapsack(BASIC, config).G[3][5] == 7


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(w=(0,), v=(1,), W=1),
        dict(w=(1,), v=(-1,), W=1),
        dict(w=(1,), v=(1,), W=-1),
        dict(w=(1, 2), v=(1,), W=1),
        dict(w=(1, 2), v=(1, 1), W=1, implications=((1, 2),)),
        dict(w=(1, 2), v=(1, 1), W=1, implications=((3, 1),)),
    ],
)
def test_invalid_instances(kwargs):
    with pytest.raises(ValueError):
        KnapsackInstance(**kwargs)


def test_solve_dispatch_on_plain_spec():
    assert solve(knapsack_spec(BASIC)).values[-1] == 7
