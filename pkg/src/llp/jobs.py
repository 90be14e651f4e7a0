"""Earliest completion times for jobs with durations and prerequisites."""

from __future__ import annotations

from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Optional, Sequence, Union

from .engine import PredicateSpec


class CyclicPrecedence(ValueError):
    pass


def normalize_pre(n: int, pre: Sequence[Iterable[int]]) -> list[tuple[int, ...]]:
    """Validate 1-based prerequisite lists and return them as sorted tuples."""
    if len(pre) != n:
        raise ValueError(f"expected {n} prerequisite lists, got {len(pre)}")
    out = []
    for j, preds in enumerate(pre, start=1):
        preds = tuple(sorted(set(int(i) for i in preds)))
        for i in preds:
            if not 1 <= i <= n:
                raise ValueError(f"job {j}: prerequisite {i} out of range 1..{n}")
        out.append(preds)
    return out


def topological_order(pre: Sequence[Sequence[int]]) -> list[int]:
    """1-based job ids in an order where every job follows its prerequisites."""
    graph = {j: set(preds) for j, preds in enumerate(pre, start=1)}
    try:
        return list(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise CyclicPrecedence(f"precedence graph has a cycle: {exc.args[1]}") from None


def jobs_spec(
    t: Sequence[int],
    pre: Sequence[Iterable[int]],
    top: Union[None, int, Sequence[Optional[int]]] = None,
) -> PredicateSpec:
    """G[j] starts at t[j] and must reach max(G[i] + t[j]) over prerequisites i."""
    n = len(t)
    t = [int(x) for x in t]
    if any(x < 0 for x in t):
        raise ValueError("job durations must be non-negative")
    preds = normalize_pre(n, pre)
    flat_pre = [tuple(i - 1 for i in p) for p in preds]
    position = {job - 1: k for k, job in enumerate(topological_order(preds))}

    if top is None:
        tops: list[Optional[int]] = [None] * n
    elif isinstance(top, int):
        tops = [top] * n
    else:
        tops = list(top)

    def target(G, j: int) -> int:
        return max((G[i] + t[j] for i in flat_pre[j]), default=t[j])

    return PredicateSpec(
        index_count=n,
        bottom=lambda j: t[j],
        forbidden=lambda G, j: G[j] < target(G, j),
        alpha=target,
        top=lambda j: tops[j],
        priority=lambda j: position[j],
        deps=lambda j: flat_pre[j],
        coords=list(range(1, n + 1)),
        name="jobs",
    )
