"""Brute-force checks of lattice-linearity on small finite lattices.

A lattice here is the box of integer vectors with ``0 <= G[k] <= dims[k]``
under the componentwise order.  Predicates are opaque boolean functions of a
vector (a tuple).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Callable, Iterator, Optional, Sequence

from .engine import PredicateSpec

DEFAULT_CEILING = 10**6

Vector = tuple[int, ...]
Predicate = Callable[[Vector], bool]
AlphaFn = Callable[[Vector, int], Optional[int]]


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FiniteLattice:
    dims: tuple[int, ...]
    ceiling: int = DEFAULT_CEILING

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if any(d < 0 for d in self.dims):
            raise ValueError("per-coordinate maxima must be non-negative")
        if self.size > self.ceiling:
            raise EnumerationTooLarge(
                f"lattice has {self.size} elements, above the ceiling {self.ceiling}"
            )

    @property
    def size(self) -> int:
        return prod(d + 1 for d in self.dims)

    def __iter__(self) -> Iterator[Vector]:
        return product(*(range(d + 1) for d in self.dims))

    def __contains__(self, G: Sequence[int]) -> bool:
        return len(G) == len(self.dims) and all(0 <= g <= d for g, d in zip(G, self.dims))

    def above(self, G: Sequence[int], fixed: Optional[int] = None) -> Iterator[Vector]:
        """Every H >= G, optionally with H[fixed] pinned to G[fixed]."""
        ranges = [
            range(g, g + 1) if k == fixed else range(g, d + 1)
            for k, (g, d) in enumerate(zip(G, self.dims))
        ]
        return product(*ranges)


@dataclass(frozen=True)
class Counterexample:
    state: Vector
    reason: str  # "no-forbidden-index" | "alpha-not-minimal"
    index: Optional[int] = None


def forbidden_bruteforce(lattice: FiniteLattice, predicate: Predicate, G: Sequence[int], j: int) -> bool:
    """True iff no H >= G with H[j] == G[j] satisfies the predicate."""
    if tuple(G) not in lattice:
        raise ValueError(f"{tuple(G)} is not in the lattice")
    return not any(predicate(H) for H in lattice.above(G, fixed=j))


def alpha_forbidden_bruteforce(
    lattice: FiniteLattice, predicate: Predicate, G: Sequence[int], j: int, alpha: int
) -> bool:
    """True iff no H >= G with H[j] < alpha satisfies the predicate."""
    return not any(predicate(H) for H in lattice.above(G) if H[j] < alpha)


def check_lattice_linear(
    lattice: FiniteLattice, predicate: Predicate, alpha: Optional[AlphaFn] = None
) -> Optional[Counterexample]:
    """``None`` if every state violating the predicate has a forbidden index.

    Otherwise the lexicographically first offending state is returned.  When
    ``alpha`` is supplied, each value it proposes for a forbidden index must
    exceed the current one without skipping past any satisfying state.
    """
    for G in lattice:
        if predicate(G):
            continue
        forbidden = [j for j in range(len(G)) if forbidden_bruteforce(lattice, predicate, G, j)]
        if not forbidden:
            return Counterexample(G, "no-forbidden-index")
        if alpha is None:
            continue
        for j in forbidden:
            a = alpha(G, j)
            if a is None:
                continue
            if a <= G[j] or not alpha_forbidden_bruteforce(lattice, predicate, G, j, a):
                return Counterexample(G, "alpha-not-minimal", j)
    return None


def spec_predicate(spec: PredicateSpec) -> Predicate:
    """The predicate a spec encodes: at or above bottom and nothing forbidden."""
    n = spec.index_count
    bottom = [spec.bottom(j) for j in range(n)]

    def predicate(G: Vector) -> bool:
        return all(G[j] >= bottom[j] for j in range(n)) and not any(
            spec.forbidden(G, j) for j in range(n)
        )

    return predicate


def spec_forbidden(spec: PredicateSpec) -> Callable[[Vector, int], bool]:
    """The PredicateSpec's own forbidden test, with the bottom bound folded in."""
    bottom = [spec.bottom(j) for j in range(spec.index_count)]
    return lambda G, j: G[j] < bottom[j] or spec.forbidden(G, j)


def spec_alpha(spec: PredicateSpec) -> AlphaFn:
    bottom = [spec.bottom(j) for j in range(spec.index_count)]

    def alpha(G: Vector, j: int) -> Optional[int]:
        if G[j] < bottom[j]:
            return bottom[j] if not spec.forbidden(G, j) else max(bottom[j], spec.alpha(G, j))
        if spec.forbidden(G, j):
            return spec.alpha(G, j)
        return None

    return alpha


def sum_at_least_one(G: Vector) -> bool:
    return sum(G) >= 1


BUILTINS = ("sum-ge-1", "jobs", "lis", "obst", "knapsack")


def builtin_spec(name: str, dims: Sequence[int], params: Optional[dict] = None) -> Optional[PredicateSpec]:
    """Downscaled spec for a registered predicate name (``None`` for sum-ge-1).

    ``params`` may override the default instance: ``t``/``pre`` for jobs,
    ``A`` for lis, ``p`` for obst, ``w``/``v``/``W`` for knapsack.
    """
    from .jobs import jobs_spec
    from .knapsack import KnapsackInstance, knapsack_spec
    from .lis import LisInstance, lis_spec
    from .obst import ObstInstance, obst_spec

    params = params or {}
    n = len(dims)
    if name == "sum-ge-1":
        return None
    if name == "jobs":
        t = params.get("t", [(1, 2, 1)[k % 3] for k in range(n)])
        pre = params.get("pre", [[] if j == 1 else [j - 1] for j in range(1, n + 1)])
        spec = jobs_spec(t, pre)
    elif name == "lis":
        spec = lis_spec(LisInstance(tuple(params.get("A", range(1, n + 1)))))
    elif name == "obst":
        keys = params.get("p")
        if keys is None:
            k = 1
            while k * (k + 1) // 2 < n:
                k += 1
            keys = list(range(1, k + 1))
        spec = obst_spec(ObstInstance(tuple(keys)))
    elif name == "knapsack":
        w = params.get("w", [1])
        W = params.get("W", n // len(w) - 1)
        spec = knapsack_spec(KnapsackInstance(tuple(w), tuple(params.get("v", [1] * len(w))), W))
    else:
        raise KeyError(f"unknown predicate {name!r}; expected one of {BUILTINS}")
    if spec.index_count != n:
        raise ValueError(f"{name}: instance has {spec.index_count} coordinates but dims has {n}")
    return spec


def check_builtin(
    name: str, dims: Sequence[int], params: Optional[dict] = None, ceiling: int = DEFAULT_CEILING
) -> Optional[Counterexample]:
    lattice = FiniteLattice(tuple(dims), ceiling)
    spec = builtin_spec(name, dims, params)
    if spec is None:
        return check_lattice_linear(lattice, sum_at_least_one)
    return check_lattice_linear(lattice, spec_predicate(spec), spec_alpha(spec))
