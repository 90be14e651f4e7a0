"""Optimal binary search trees and matrix-chain ordering over index ranges.

Both problems fill a table G[i, j] for 1 <= i <= j <= n and are scheduled by
range length (priority ``j - i``), which finalises every entry in one advance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence, Union

from .engine import INT64_MAX, PredicateSpec

BALANCE_SCOPES = ("recursive", "root")


@dataclass(frozen=True)
class ObstInstance:
    """Key frequencies and optional constraints.

    ``forbidden_root``: that key may never have a child.
    ``balanced``: subtree sizes at a node differ by at most one; with
    ``balance_scope="root"`` only the root split of the full range is
    restricted.
    ``strict``: restrict roots to ``i <= k < j`` for ranges longer than one,
    reproducing the literal recurrence rather than the classical one.
    """

    p: tuple[int, ...]
    forbidden_root: Optional[int] = None
    balanced: bool = False
    balance_scope: str = "recursive"
    strict: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        if not self.p:
            raise ValueError("p must contain at least one frequency")
        if any(x < 0 for x in self.p):
            raise ValueError("frequencies must be non-negative")
        if self.forbidden_root is not None and not 1 <= self.forbidden_root <= len(self.p):
            raise ValueError(f"forbidden_root must be a key in 1..{len(self.p)}")
        if self.balance_scope not in BALANCE_SCOPES:
            raise ValueError(f"balance_scope must be one of {BALANCE_SCOPES}")

    @property
    def n(self) -> int:
        return len(self.p)

    def roots(self, i: int, j: int) -> list[int]:
        """Admissible roots for keys i..j under the active constraints."""
        last = j - 1 if self.strict and i < j else j
        ks = range(i, last + 1)
        if self.forbidden_root is not None and i < j:
            ks = [k for k in ks if k != self.forbidden_root]
        if self.balanced and (self.balance_scope == "recursive" or (i, j) == (1, self.n)):
            ks = [k for k in ks if abs((k - i) - (j - k)) <= 1]
        return list(ks)


class WeightSums:
    """Prefix sums so that ``s(i, j)`` is O(1); empty ranges sum to 0."""

    def __init__(self, p: Sequence[int]) -> None:
        self.prefix = [0]
        for x in p:
            self.prefix.append(self.prefix[-1] + x)

    def __call__(self, i: int, j: int) -> int:
        if i > j:
            return 0
        return self.prefix[j] - self.prefix[i - 1]


@dataclass(frozen=True)
class ChainInstance:
    """Matrix M_i has shape dims[i-1] x dims[i]."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        if len(self.dims) < 2:
            raise ValueError("dims needs at least two entries (one matrix)")
        if any(x < 1 for x in self.dims):
            raise ValueError("dimensions must be positive")

    @property
    def n(self) -> int:
        return len(self.dims) - 1


def range_coords(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def obst_spec(instance: ObstInstance) -> PredicateSpec:
    """G[i,j] >= min over admissible roots k of G[i,k-1] + s(i,j) + G[k+1,j].

    Empty subranges contribute 0.  A range with no admissible root gets an
    alpha above its top bound, which the engine reports as infeasible.
    """
    n = instance.n
    s = WeightSums(instance.p)
    coords = range_coords(n)
    flat = {c: f for f, c in enumerate(coords)}
    splits: list[list[tuple[Optional[int], Optional[int]]]] = []
    weight: list[int] = []
    tops: list[int] = []
    for i, j in coords:
        splits.append([(flat.get((i, k - 1)), flat.get((k + 1, j))) for k in instance.roots(i, j)])
        weight.append(s(i, j))
        tops.append(s(i, j) * (j - i + 1))
    diagonal = [i == j for i, j in coords]
    frozen = [diagonal[f] and instance.strict for f in range(len(coords))]

    def target(G, f: int) -> int:
        options = splits[f]
        if not options:
            return tops[f] + 1
        best = min(
            (G[left] if left is not None else 0) + (G[right] if right is not None else 0)
            for left, right in options
        )
        return best + weight[f]

    def deps(f: int) -> list[int]:
        return sorted({d for pair in splits[f] for d in pair if d is not None})

    return PredicateSpec(
        index_count=len(coords),
        bottom=lambda f: weight[f] if diagonal[f] else 0,
        forbidden=lambda G, f: not frozen[f] and G[f] < target(G, f),
        alpha=target,
        top=lambda f: tops[f],
        priority=lambda f: coords[f][1] - coords[f][0],
        deps=deps,
        coords=coords,
        name="obst",
    )


def matrix_chain_spec(instance: ChainInstance) -> PredicateSpec:
    """G[i,j] >= min over i <= k < j of G[i,k] + m[i-1] m[k] m[j] + G[k+1,j]."""
    m = instance.dims
    coords = range_coords(instance.n)
    flat = {c: f for f, c in enumerate(coords)}
    splits: list[list[tuple[int, int, int]]] = []
    for i, j in coords:
        row = []
        for k in range(i, j):
            product = m[i - 1] * m[k] * m[j]
            if product > INT64_MAX:
                raise OverflowError(f"m[{i - 1}]*m[{k}]*m[{j}] exceeds the 64-bit range")
            row.append((flat[(i, k)], product, flat[(k + 1, j)]))
        splits.append(row)

    def target(G, f: int) -> int:
        return min(G[a] + cost + G[b] for a, cost, b in splits[f])

    return PredicateSpec(
        index_count=len(coords),
        bottom=lambda f: 0,
        forbidden=lambda G, f: bool(splits[f]) and G[f] < target(G, f),
        alpha=target,
        priority=lambda f: coords[f][1] - coords[f][0],
        deps=lambda f: sorted({d for a, _, b in splits[f] for d in (a, b)}),
        coords=coords,
        name="chain",
    )


@dataclass(frozen=True)
class Node:
    key: int
    left: Optional[Node] = None
    right: Optional[Node] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "left": self.left.to_dict() if self.left else None,
            "right": self.right.to_dict() if self.right else None,
        }

    def keys(self) -> list[int]:
        out = self.left.keys() if self.left else []
        out.append(self.key)
        if self.right:
            out.extend(self.right.keys())
        return out

    def size(self) -> int:
        return len(self.keys())


RangeTable = Mapping[tuple[int, int], int]


def _lookup(G: Union[RangeTable, Any], i: int, j: int) -> int:
    return G[(i, j)] if i <= j else 0


def reconstruct_tree(instance: ObstInstance, G: RangeTable) -> Node:
    """Rebuild a tree achieving G[1, n], preferring the smallest root at each range."""
    s = WeightSums(instance.p)

    def build(i: int, j: int) -> Optional[Node]:
        if i > j:
            return None
        goal = G[(i, j)]
        for k in instance.roots(i, j):
            if _lookup(G, i, k - 1) + s(i, j) + _lookup(G, k + 1, j) == goal:
                return Node(k, build(i, k - 1), build(k + 1, j))
        raise ValueError(f"no admissible root reproduces G[{i},{j}]={goal}")

    root = build(1, instance.n)
    assert root is not None
    return root


def tree_cost(tree: Optional[Node], p: Sequence[int], depth: int = 1) -> int:
    """Sum of p[key] * depth with the root at depth 1."""
    if tree is None:
        return 0
    return (
        p[tree.key - 1] * depth
        + tree_cost(tree.left, p, depth + 1)
        + tree_cost(tree.right, p, depth + 1)
    )


def reconstruct_chain(instance: ChainInstance, G: RangeTable) -> str:
    """An optimal parenthesisation such as ``((M1 M2) M3)``."""
    m = instance.dims

    def build(i: int, j: int) -> str:
        if i == j:
            return f"M{i}"
        for k in range(i, j):
            if G[(i, k)] + m[i - 1] * m[k] * m[j] + G[(k + 1, j)] == G[(i, j)]:
                return f"({build(i, k)} {build(k + 1, j)})"
        raise ValueError(f"no split reproduces G[{i},{j}]={G[(i, j)]}")

    return build(1, instance.n)


def chain_cost(expr: str, dims: Sequence[int]) -> int:
    """Scalar multiplications needed to evaluate a parenthesisation string."""
    tokens = expr.replace("(", " ( ").replace(")", " ) ").split()
    stack: list[Any] = []
    total = 0
    for tok in tokens:
        if tok == ")":
            right = stack.pop()
            left = stack.pop()
            stack.pop()  # "("
            total += left[0] * left[1] * right[1]
            stack.append((left[0], right[1]))
        elif tok == "(":
            stack.append(tok)
        else:
            k = int(tok[1:])
            stack.append((dims[k - 1], dims[k]))
    return total
