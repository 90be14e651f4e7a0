"""Exhaustive reference solutions.

Nothing here memoises or shares code with the solvers: subsequences, trees,
parenthesisations, subsets and paths are enumerated outright.  Every oracle
re-evaluates its witness before returning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterator, Optional, Sequence

from .knapsack import KnapsackInstance
from .lis import LisInstance
from .obst import ChainInstance, ObstInstance


class InstanceTooLarge(ValueError):
    pass


class CyclicPrecedence(ValueError):
    pass


@dataclass
class OracleResult:
    optimum: Optional[int]
    witness: Any
    per_subproblem: dict[Any, Optional[int]] = field(default_factory=dict)


def _guard(size: int, limit: int, what: str) -> None:
    if size > limit:
        raise InstanceTooLarge(f"{what}: size {size} exceeds the enumeration guard {limit}")


def _check(ok: bool, what: str) -> None:
    if not ok:
        raise AssertionError(f"oracle self-check failed: {what}")


# --- longest increasing subsequence ---------------------------------------

def _lis_valid(instance: LisInstance, idx: Sequence[int]) -> bool:
    A = instance.A
    for j in idx:
        if instance.odd_only and A[j] % 2 == 0:
            return False
    for x, y in zip(idx, idx[1:]):
        if instance.odd_only and (A[x] % 2 == 0 or A[y] % 2 == 0):
            return False
        if instance.gap_k is None:
            if not A[x] < A[y]:
                return False
        elif not A[x] + instance.gap_k <= A[y]:
            return False
    return True


def _odd_runs(A: Sequence[int]) -> list[int]:
    n = len(A)
    best = [0] * n
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            if all(A[j] % 2 for j in idx) and all(A[x] < A[y] for x, y in zip(idx, idx[1:])):
                best[idx[-1]] = max(best[idx[-1]], size)
    return best


def oracle_lis(instance: LisInstance) -> OracleResult:
    """per_subproblem[j] (1-based) = best constrained length ending at j.

    With a lower bound active, a subsequence starting at s scores
    ``max(1, bound[s]) + len - 1``; that is the least vector meeting both the
    chain constraint and the bound.
    """
    n = instance.n
    _guard(n, 20, "oracle_lis")
    bound = None
    if instance.odd_bound:
        bound = _odd_runs(instance.A)
    if instance.extra_lower_bound is not None:
        extra = list(instance.extra_lower_bound)
        bound = extra if bound is None else [max(a, b) for a, b in zip(bound, extra)]

    best = [0] * n
    if bound is not None:
        best = list(bound)
    best_path: list[Optional[tuple[int, ...]]] = [None] * n
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            if not _lis_valid(instance, idx):
                continue
            start = bound[idx[0]] if bound is not None else 1
            score = max(1, start) + size - 1
            if score > best[idx[-1]] or best_path[idx[-1]] is None and score == best[idx[-1]]:
                best[idx[-1]] = score
                best_path[idx[-1]] = idx
    optimum = max(best)
    witness: list[int] = []
    longest = max((p for p in best_path if p is not None), key=len, default=())
    witness = [j + 1 for j in longest]
    _check(_lis_valid(instance, [j - 1 for j in witness]), "LIS witness violates constraints")
    if bound is None:
        _check(len(witness) == optimum, "LIS witness length")
    return OracleResult(optimum, witness, {j + 1: best[j] for j in range(n)})


# --- optimal binary search tree --------------------------------------------

Tree = Optional[tuple[int, Any, Any]]


def _trees(i: int, j: int) -> Iterator[Tree]:
    if i > j:
        yield None
        return
    for k in range(i, j + 1):
        for left in _trees(i, k - 1):
            for right in _trees(k + 1, j):
                yield (k, left, right)


def _cost(tree: Tree, p: Sequence[int], depth: int = 1) -> int:
    if tree is None:
        return 0
    k, left, right = tree
    return p[k - 1] * depth + _cost(left, p, depth + 1) + _cost(right, p, depth + 1)


def _size(tree: Tree) -> int:
    return 0 if tree is None else 1 + _size(tree[1]) + _size(tree[2])


def _tree_ok(instance: ObstInstance, tree: Tree, is_root: bool = True) -> bool:
    if tree is None:
        return True
    k, left, right = tree
    if instance.forbidden_root == k and (left is not None or right is not None):
        return False
    if instance.balanced and (instance.balance_scope == "recursive" or is_root):
        if abs(_size(left) - _size(right)) > 1:
            return False
    return _tree_ok(instance, left, False) and _tree_ok(instance, right, False)


def oracle_obst(instance: ObstInstance) -> OracleResult:
    """Cheapest admissible tree for every key range; ``None`` when no tree is admissible."""
    n = instance.n
    _guard(n, 10, "oracle_obst")
    p = instance.p
    per: dict[Any, Optional[int]] = {}
    best_full: Tree = None
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            best = None
            best_tree = None
            for tree in _trees(i, j):
                # "root" scope applies only to the full range
                root_here = (i, j) == (1, n)
                if instance.balance_scope == "root" and not root_here:
                    ok = _tree_ok(_without_balance(instance), tree)
                else:
                    ok = _tree_ok(instance, tree)
                if not ok:
                    continue
                c = _cost(tree, p)
                if best is None or c < best:
                    best, best_tree = c, tree
            per[(i, j)] = best
            if (i, j) == (1, n):
                best_full = best_tree
    optimum = per[(1, n)]
    if optimum is not None:
        _check(_cost(best_full, p) == optimum, "OBST witness cost")
    return OracleResult(optimum, best_full, per)


def _without_balance(instance: ObstInstance) -> ObstInstance:
    return ObstInstance(instance.p, forbidden_root=instance.forbidden_root)


def tree_to_dict(tree: Tree) -> Optional[dict[str, Any]]:
    if tree is None:
        return None
    k, left, right = tree
    return {"key": k, "left": tree_to_dict(left), "right": tree_to_dict(right)}


# --- matrix chain ------------------------------------------------------------

def _brackets(i: int, j: int) -> Iterator[Any]:
    if i == j:
        yield i
        return
    for k in range(i, j):
        for left in _brackets(i, k):
            for right in _brackets(k + 1, j):
                yield (left, right)


def _chain_eval(expr: Any, m: Sequence[int]) -> tuple[int, int, int]:
    """(rows, cols, scalar multiplications) of a bracketing."""
    if isinstance(expr, int):
        return m[expr - 1], m[expr], 0
    r1, c1, x = _chain_eval(expr[0], m)
    r2, c2, y = _chain_eval(expr[1], m)
    _check(c1 == r2, "chain shapes")
    return r1, c2, x + y + r1 * c1 * c2


def bracket_str(expr: Any) -> str:
    if isinstance(expr, int):
        return f"M{expr}"
    return f"({bracket_str(expr[0])} {bracket_str(expr[1])})"


def oracle_chain(instance: ChainInstance) -> OracleResult:
    n = instance.n
    _guard(n, 10, "oracle_chain")
    m = instance.dims
    per: dict[Any, Optional[int]] = {}
    witness = None
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            best = None
            for expr in _brackets(i, j):
                c = _chain_eval(expr, m)[2]
                if best is None or c < best[0]:
                    best = (c, expr)
            assert best is not None
            per[(i, j)] = best[0]
            if (i, j) == (1, n):
                witness = best[1]
    optimum = per[(1, n)]
    _check(_chain_eval(witness, m)[2] == optimum, "chain witness cost")
    return OracleResult(optimum, bracket_str(witness), per)


# --- knapsack ----------------------------------------------------------------

def _subset_ok(instance: KnapsackInstance, items: set[int]) -> bool:
    return all(b in items for a, b in instance.implications if a in items)


def oracle_knapsack(instance: KnapsackInstance) -> OracleResult:
    """per_subproblem[(i, j)]: best over subsets of items 1..i with weight <= j
    that satisfy every implication (a subset containing a must contain b)."""
    n, W = instance.n, instance.W
    _guard(n, 20, "oracle_knapsack")
    # best_exact[i][c]: best value of a valid subset whose largest item is i and weight is c
    best_exact = [[-1] * (W + 1) for _ in range(n + 1)]
    best_set: dict[tuple[int, int], frozenset[int]] = {}
    best_exact[0][0] = 0
    best_set[(0, 0)] = frozenset()
    for mask in range(1, 1 << n):
        items = {k + 1 for k in range(n) if mask >> k & 1}
        weight = sum(instance.w[k - 1] for k in items)
        if weight > W or not _subset_ok(instance, items):
            continue
        value = sum(instance.v[k - 1] for k in items)
        top = max(items)
        if value > best_exact[top][weight]:
            best_exact[top][weight] = value
            best_set[(top, weight)] = frozenset(items)
    # running maximum over "largest item <= i" and "weight <= j"
    per: dict[Any, Optional[int]] = {}
    for i in range(n + 1):
        for j in range(W + 1):
            per[(i, j)] = max(
                best_exact[i][j],
                per[(i - 1, j)] if i else -1,
                per[(i, j - 1)] if j else -1,
            )
    optimum = per[(n, W)]
    cells = [(t, c) for t in range(n + 1) for c in range(W + 1) if best_exact[t][c] == optimum]
    witness = set(best_set[cells[0]])
    _check(sum(instance.v[k - 1] for k in witness) == optimum, "knapsack witness value")
    _check(sum(instance.w[k - 1] for k in witness) <= W, "knapsack witness weight")
    _check(_subset_ok(instance, witness), "knapsack witness implications")
    return OracleResult(optimum, witness, per)


# --- job scheduling ------------------------------------------------------------

def oracle_jobs(t: Sequence[int], pre: Sequence[Sequence[int]]) -> OracleResult:
    """per_subproblem[j] (1-based): heaviest path ending at j, weights t."""
    n = len(t)
    _guard(n, 20, "oracle_jobs")
    preds = [tuple(p) for p in pre]

    def paths_into(j: int, seen: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if j in seen:
            raise CyclicPrecedence(f"cycle through job {j}")
        yield (j,)
        for i in preds[j - 1]:
            for path in paths_into(i, seen + (j,)):
                yield path + (j,)

    per: dict[Any, Optional[int]] = {}
    witness: tuple[int, ...] = ()
    best_total = -1
    for j in range(1, n + 1):
        best = None
        for path in paths_into(j, ()):
            weight = sum(t[k - 1] for k in path)
            if best is None or weight > best[0]:
                best = (weight, path)
        assert best is not None
        per[j] = best[0]
        if best[0] > best_total:
            best_total, witness = best
    optimum = best_total if n else 0
    _check(sum(t[k - 1] for k in witness) == optimum, "jobs witness weight")
    return OracleResult(optimum, list(witness), per)
