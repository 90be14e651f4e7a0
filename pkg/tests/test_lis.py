import random

import pytest

from llp import ScheduleConfig, solve, solve_rounds, solve_sequential
from llp.lis import (
    LisInstance,
    build_pre,
    lis_fixed_spec,
    lis_spec,
    longest_path_vertices,
    odd_lower_bound,
    reconstruct_lis,
)
from llp.oracles import oracle_lis

from instances import random_lis

SAMPLE_A = (35, 38, 27, 45, 32)
MODES = ["sequential", "rounds", "priority", "async-stale"]


def per_index(result):
    return [result.per_subproblem[j] for j in sorted(result.per_subproblem)]


def test_precedence_graph():
    assert build_pre(LisInstance(SAMPLE_A)) == [(), (1,), (), (1, 2, 3), (3,)]
    assert build_pre(LisInstance((5, 4, 3))) == [(), (), ()]
    assert build_pre(LisInstance(SAMPLE_A, gap_k=4)) == [(), (), (), (1, 2, 3), (3,)]


def test_gap_one_is_the_plain_graph():
    rng = random.Random(3)
    for _ in range(30):
        inst = random_lis(rng)
        assert build_pre(LisInstance(inst.A, gap_k=1)) == build_pre(inst)


@pytest.mark.parametrize("fixed", [False, True])
@pytest.mark.parametrize("mode", MODES)
def test_sample_all_schedules(mode, fixed):
    spec = (lis_fixed_spec if fixed else lis_spec)(LisInstance(SAMPLE_A))
    assert solve(spec, ScheduleConfig(mode=mode)).values == [1, 2, 1, 3, 2]


def test_sample_with_stale_workers():
    config = ScheduleConfig(mode="async", workers=4, seed=1, staleness_bound=3)
    assert solve(lis_spec(LisInstance(SAMPLE_A)), config).values == [1, 2, 1, 3, 2]


def test_single_element():
    report = solve_sequential(lis_spec(LisInstance((9,))))
    assert report.values == [1]
    assert report.total_advances == 0
    assert reconstruct_lis(LisInstance((9,)), report.values) == [1]


def test_gap_constrained_example():
    inst = LisInstance(SAMPLE_A, gap_k=4)
    G = solve_sequential(lis_spec(inst)).values
    assert G == [1, 1, 1, 2, 2]
    seq = reconstruct_lis(inst, G)
    assert len(seq) == 2
    assert all(SAMPLE_A[b - 1] - SAMPLE_A[a - 1] >= 4 for a, b in zip(seq, seq[1:]))


def test_reconstruction_of_sample():
    inst = LisInstance(SAMPLE_A)
    assert reconstruct_lis(inst, solve_sequential(lis_spec(inst)).values) == [1, 2, 4]


@pytest.mark.parametrize(
    "A, rounds",
    [(SAMPLE_A, 3), ((1, 2, 3, 4), 4), ((6, 5, 4, 3, 2, 1), 1)],
)
def test_fixed_flag_rounds_equal_critical_path(A, rounds):
    inst = LisInstance(A)
    report = solve_rounds(lis_fixed_spec(inst))
    assert report.rounds == rounds == longest_path_vertices(build_pre(inst))
    assert report.values == per_index(oracle_lis(inst))


@pytest.mark.parametrize("seed", range(200))
def test_random_arrays_match_oracle(seed):
    rng = random.Random(seed)
    inst = random_lis(rng, gap=seed % 2 == 1)
    expected = oracle_lis(inst)
    G = solve_sequential(lis_spec(inst)).values
    assert G == per_index(expected)
    seq = reconstruct_lis(inst, G)
    assert len(seq) == expected.optimum
    assert all(inst.allows(inst.A[a - 1], inst.A[b - 1]) for a, b in zip(seq, seq[1:]))


@pytest.mark.parametrize("seed", range(40))
def test_fixed_flag_form_updates_each_index_once(seed):
    rng = random.Random(1000 + seed)
    inst = random_lis(rng)
    mode = MODES[seed % 4]
    config = ScheduleConfig(mode=mode, workers=1 + seed % 5, seed=seed, staleness_bound=seed % 4)
    ensure = solve_sequential(lis_spec(inst))
    fixed = solve(lis_fixed_spec(inst), config)
    assert fixed.values == ensure.values
    assert max(fixed.per_index_advances) <= 1


def test_odd_lower_bound():
    assert odd_lower_bound((3, 2, 5, 1, 7)) == [1, 0, 2, 1, 3]


@pytest.mark.parametrize("seed", range(30))
def test_odd_variants_match_oracle(seed):
    rng = random.Random(2000 + seed)
    A = random_lis(rng, n_max=10).A
    for kwargs in (dict(odd_bound=True), dict(odd_only=True)):
        inst = LisInstance(A, **kwargs)
        assert solve_sequential(lis_spec(inst)).values == per_index(oracle_lis(inst))


def test_odd_only_ignores_even_entries():
    inst = LisInstance((1, 4, 3, 6, 5), odd_only=True)
    G = solve_sequential(lis_spec(inst)).values
    assert G == [1, 0, 2, 0, 3]
    assert reconstruct_lis(inst, G) == [1, 3, 5]


def test_extra_lower_bound_is_respected():
    inst = LisInstance((1, 2, 3), extra_lower_bound=(4, 0, 0))
    assert solve_sequential(lis_spec(inst)).values == [4, 5, 6]
    assert per_index(oracle_lis(inst)) == [4, 5, 6]


@pytest.mark.parametrize(
    "kwargs",
    [dict(A=()), dict(A=(1, 1)), dict(A=(1, 2), gap_k=0), dict(A=(1, 2), extra_lower_bound=(1,))],
)
def test_invalid_instances(kwargs):
    with pytest.raises(ValueError):
        LisInstance(**kwargs)
