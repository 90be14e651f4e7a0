"""Longest increasing subsequence as a least-fixpoint problem.

G[j] is the length of the longest increasing subsequence ending at position
j.  Two formulations are provided: the ensure form, where G[j] may be raised
several times, and the fixed-flag form, where each position is finalised once
all of its predecessors are.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .engine import PredicateSpec


@dataclass(frozen=True)
class LisInstance:
    """Input sequence plus optional constraints.

    ``gap_k``: consecutive chosen elements must grow by at least ``k``.
    ``odd_bound``: G[j] must also be at least the longest increasing run of
    odd entries ending at j (a precomputed per-index lower bound).
    ``odd_only``: only odd entries may be used at all; even positions get 0.
    ``extra_lower_bound``: an arbitrary per-index lower bound.
    """

    A: tuple[int, ...]
    gap_k: Optional[int] = None
    odd_bound: bool = False
    odd_only: bool = False
    extra_lower_bound: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", tuple(int(a) for a in self.A))
        if not self.A:
            raise ValueError("A must contain at least one element")
        if len(set(self.A)) != len(self.A):
            raise ValueError("entries of A must be distinct")
        if self.gap_k is not None and self.gap_k < 1:
            raise ValueError("gap_k must be at least 1")
        if self.extra_lower_bound is not None:
            bound = tuple(int(b) for b in self.extra_lower_bound)
            if len(bound) != len(self.A) or any(b < 0 for b in bound):
                raise ValueError("extra_lower_bound needs one non-negative entry per element")
            object.__setattr__(self, "extra_lower_bound", bound)

    @property
    def n(self) -> int:
        return len(self.A)

    def allows(self, x: int, y: int) -> bool:
        """Can value ``y`` directly follow value ``x`` in a subsequence?"""
        if self.odd_only and (x % 2 == 0 or y % 2 == 0):
            return False
        if self.gap_k is None:
            return x < y
        return x + self.gap_k <= y

    def usable(self, j: int) -> bool:
        """Is 0-based position ``j`` allowed to appear at all?"""
        return not self.odd_only or self.A[j] % 2 != 0

    def lower_bounds(self) -> Optional[list[int]]:
        bounds = None
        if self.odd_bound:
            bounds = odd_lower_bound(self.A)
        if self.extra_lower_bound is not None:
            extra = list(self.extra_lower_bound)
            bounds = extra if bounds is None else [max(a, b) for a, b in zip(bounds, extra)]
        return bounds


def odd_lower_bound(A: Sequence[int]) -> list[int]:
    """Length of the longest increasing subsequence of odd entries ending at each j."""
    out: list[int] = []
    for j, a in enumerate(A):
        if a % 2 == 0:
            out.append(0)
            continue
        best = max((out[i] for i in range(j) if A[i] % 2 != 0 and A[i] < a), default=0)
        out.append(best + 1)
    return out


def build_pre(instance: LisInstance) -> list[tuple[int, ...]]:
    """1-based predecessor sets: ``pre[j-1]`` lists every i < j with an edge i -> j."""
    A = instance.A
    return [
        tuple(i + 1 for i in range(j) if instance.allows(A[i], A[j]))
        for j in range(instance.n)
    ]


def longest_path_vertices(pre: Sequence[Sequence[int]]) -> int:
    """Vertex count of the longest path in a graph whose edges go to higher indices."""
    depth: list[int] = []
    for preds in pre:
        depth.append(1 + max((depth[i - 1] for i in preds), default=0))
    return max(depth, default=0)


def _flat_pre(instance: LisInstance) -> list[tuple[int, ...]]:
    return [tuple(i - 1 for i in p) for p in build_pre(instance)]


def lis_spec(instance: LisInstance) -> PredicateSpec:
    """Ensure form: G[j] >= max(G[i] + 1 for i in pre(j)), starting from all ones."""
    pre = _flat_pre(instance)
    base = [1 if instance.usable(j) else 0 for j in range(instance.n)]
    bounds = instance.lower_bounds()

    def target(G, j: int) -> int:
        best = max((G[i] + 1 for i in pre[j]), default=0)
        if bounds is not None and bounds[j] > best:
            best = bounds[j]
        return best

    return PredicateSpec(
        index_count=instance.n,
        bottom=lambda j: base[j],
        forbidden=lambda G, j: G[j] < target(G, j),
        alpha=target,
        priority=lambda j: j,
        deps=lambda j: pre[j],
        coords=list(range(1, instance.n + 1)),
        name="lis",
    )


def lis_fixed_spec(instance: LisInstance) -> PredicateSpec:
    """Fixed-flag form: a position advances once, after all its predecessors.

    The flag lives in the low bit of the stored word (``2 * length + fixed``),
    so one store publishes the length and the flag together and a reader that
    sees the flag set also sees the final length.  ``decode`` strips the flag.
    """
    pre = _flat_pre(instance)
    base = [1 if instance.usable(j) else 0 for j in range(instance.n)]
    bounds = instance.lower_bounds()

    def forbidden(G, j: int) -> bool:
        return not G[j] & 1 and all(G[i] & 1 for i in pre[j])

    def alpha(G, j: int) -> int:
        length = max((G[i] >> 1) + 1 for i in pre[j]) if pre[j] else base[j]
        length = max(length, base[j])
        if bounds is not None:
            length = max(length, bounds[j])
        return 2 * length + 1

    return PredicateSpec(
        index_count=instance.n,
        bottom=lambda j: 2 * base[j],
        forbidden=forbidden,
        alpha=alpha,
        priority=lambda j: j,
        deps=lambda j: pre[j],
        coords=list(range(1, instance.n + 1)),
        decode=lambda v: v >> 1,
        name="lis-fixed",
    )


def reconstruct_lis(instance: LisInstance, G: Sequence[int]) -> list[int]:
    """1-based indices of one longest subsequence, walking back along ``pre``.

    Starts at the first position holding max(G) and repeatedly steps to the
    smallest predecessor whose value is one less.  When a lower bound is
    active the walk may stop early, since such values need not come from a
    path in the graph.
    """
    if len(G) != instance.n:
        raise ValueError("G does not match the instance length")
    best = max(G)
    if best == 0:
        return []
    pre = build_pre(instance)
    j = G.index(best) + 1
    path = [j]
    while True:
        step = next((i for i in pre[j - 1] if G[i - 1] == G[j - 1] - 1), None)
        if step is None:
            break
        path.append(step)
        j = step
    return path[::-1]
