"""0/1 knapsack as a least-fixpoint problem.

G[i][j] is the best value using items 1..i with capacity j.  Row 0 is the
constant zero row and is not part of the solved vector.

Implications ``a => b`` (with ``b < a``: item ``a`` may only be taken together
with item ``b``) come in two flavours:

* ``"exact"`` (default) -- the table is refined by the inclusion pattern of
  those ``b`` items that later items still depend on.  Each cell is still
  ``>= max`` of monotone terms, so the predicate stays lattice-linear, and the
  projection onto (i, j) equals the best constraint-respecting subset.
* ``"recorded"`` -- the include branch of ``a`` is admissible only if ``b``
  is in the witness set recorded for cell (a-1, j-w[a]).  Cheaper, but the
  recorded witness may omit ``b`` even when another choice with ``b`` is
  better, so the value can fall short of the true optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from .engine import PredicateSpec, ScheduleConfig, SolveReport, solve

IMPLICATION_MODES = ("exact", "recorded")


@dataclass(frozen=True)
class KnapsackInstance:
    w: tuple[int, ...]
    v: tuple[int, ...]
    W: int
    implications: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", tuple(int(x) for x in self.w))
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        object.__setattr__(self, "implications", tuple((int(a), int(b)) for a, b in self.implications))
        if len(self.w) != len(self.v):
            raise ValueError("w and v must have the same length")
        if any(x < 1 for x in self.w):
            raise ValueError("weights must be strictly positive")
        if any(x < 0 for x in self.v):
            raise ValueError("values must be non-negative")
        if self.W < 0:
            raise ValueError("capacity W must be non-negative")
        for a, b in self.implications:
            if not (1 <= b < a <= self.n):
                raise ValueError(f"implication ({a} => {b}) needs 1 <= b < a <= {self.n}")

    @property
    def n(self) -> int:
        return len(self.w)

    def requires(self, i: int) -> list[int]:
        """Items that must accompany item ``i``."""
        return [b for a, b in self.implications if a == i]


def incr_spec(C: Sequence[int], w: int, v: int) -> PredicateSpec:
    """One-item update of a profit row: G[j] >= C[j - w] + v for j >= w."""
    C = tuple(int(x) for x in C)
    if w < 1:
        raise ValueError("item weight must be at least 1")

    def target(G, j: int) -> int:
        return C[j - w] + v if j >= w else C[j]

    return PredicateSpec(
        index_count=len(C),
        bottom=lambda j: C[j],
        forbidden=lambda G, j: G[j] < target(G, j),
        alpha=target,
        priority=lambda j: 0,
        deps=lambda j: (),
        coords=list(range(len(C))),
        name="incr-knapsack",
    )


def incr_knapsack(
    C: Sequence[int], w: int, v: int, config: Optional[ScheduleConfig] = None
) -> list[int]:
    """max(C[j], C[j - w] + v) for every capacity j, computed by the engine.

    Each entry reads only the immutable input row, so every schedule finishes
    in a single round.
    """
    report = solve(incr_spec(C, w, v), config)
    return report.values


def knapsack_iterative(
    instance: KnapsackInstance, config: Optional[ScheduleConfig] = None
) -> list[int]:
    """Fold :func:`incr_knapsack` over the items, starting from the zero row."""
    if instance.implications:
        raise ValueError("the incremental driver does not support implications")
    row = [0] * (instance.W + 1)
    for w, v in zip(instance.w, instance.v):
        row = incr_knapsack(row, w, v, config)
    return row


def _cell_coords(instance: KnapsackInstance) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, instance.n + 1) for j in range(instance.W + 1)]


def knapsack_spec(instance: KnapsackInstance, implication_mode: str = "exact") -> PredicateSpec:
    """Spec for the profit table; see the module docstring for implications."""
    if implication_mode not in IMPLICATION_MODES:
        raise ValueError(f"implication_mode must be one of {IMPLICATION_MODES}")
    if instance.implications and implication_mode == "exact":
        return _exact_implication_spec(instance)

    n, W = instance.n, instance.W
    w, v = instance.w, instance.v
    width = W + 1
    coords = _cell_coords(instance)
    required = [instance.requires(i) for i in range(n + 1)]

    def flat(i: int, j: int) -> Optional[int]:
        return None if i == 0 else (i - 1) * width + j

    def cell(G, i: int, j: int) -> int:
        return 0 if i == 0 else G[(i - 1) * width + j]

    def witness_of(G, i: int, j: int) -> int:
        if i == 0:
            return 0
        s = G.witness((i - 1) * width + j)
        return 0 if s is None else s

    def include_ok(G, i: int, j: int) -> bool:
        if j < w[i - 1]:
            return False
        if not required[i]:
            return True
        s = witness_of(G, i - 1, j - w[i - 1])
        return all(s >> (b - 1) & 1 for b in required[i])

    def branches(G, f: int) -> tuple[int, Optional[int]]:
        i, j = divmod(f, width)
        i += 1
        skip = cell(G, i - 1, j)
        take = cell(G, i - 1, j - w[i - 1]) + v[i - 1] if include_ok(G, i, j) else None
        return skip, take

    def target(G, f: int) -> int:
        skip, take = branches(G, f)
        return skip if take is None or take <= skip else take

    def witness(G, f: int) -> int:
        skip, take = branches(G, f)
        i, j = divmod(f, width)
        i += 1
        if take is None or take <= skip:
            return witness_of(G, i - 1, j)
        return witness_of(G, i - 1, j - w[i - 1]) | 1 << (i - 1)

    def deps(f: int) -> list[int]:
        i, j = divmod(f, width)
        i += 1
        out = [flat(i - 1, j)]
        if j >= w[i - 1]:
            out.append(flat(i - 1, j - w[i - 1]))
        return [d for d in out if d is not None]

    return PredicateSpec(
        index_count=len(coords),
        bottom=lambda f: 0,
        forbidden=lambda G, f: G[f] < target(G, f),
        alpha=target,
        priority=lambda f: f // width + 1,
        deps=deps,
        witness=witness if instance.implications else None,
        coords=coords,
        name="knapsack",
    )


class _OpenTargets:
    """Implication targets still referenced by a later item, per prefix length."""

    def __init__(self, instance: KnapsackInstance) -> None:
        self.targets = sorted({b for _, b in instance.implications})
        self.bit = {b: 1 << k for k, b in enumerate(self.targets)}
        last_use = {b: max(a for a, bb in instance.implications if bb == b) for b in self.targets}
        # open_mask[i]: targets b <= i with a dependent item a > i
        self.open_mask = [
            sum(self.bit[b] for b in self.targets if b <= i < last_use[b])
            for i in range(instance.n + 1)
        ]

    def masks(self, i: int) -> list[int]:
        bits = [self.bit[b] for b in self.targets if self.open_mask[i] & self.bit[b]]
        return [sum(c) for c in product(*[(0, b) for b in bits])]


def _exact_implication_spec(instance: KnapsackInstance) -> PredicateSpec:
    """Cells (i, j, m): best value + 1 over subsets of 1..i of weight <= j that
    respect every implication within 1..i and include exactly the open targets
    in ``m``; 0 means no such subset."""
    n, W = instance.n, instance.W
    w, v = instance.w, instance.v
    opened = _OpenTargets(instance)
    coords = [(i, j, m) for i in range(1, n + 1) for j in range(W + 1) for m in opened.masks(i)]
    flat = {c: f for f, c in enumerate(coords)}

    # sources[f]: (pred flat index or None for the all-empty row 0 state, value added)
    sources: list[list[tuple[Optional[int], int]]] = []
    for i, j, m in coords:
        row = []
        keep = opened.open_mask[i]
        own_bit = opened.bit.get(i, 0) & keep
        need = sum(opened.bit[b] for b in instance.requires(i))
        for prev in opened.masks(i - 1):
            if (prev & keep) == m:
                row.append((flat[(i - 1, j, prev)] if i > 1 else None, 0))
            if j >= w[i - 1] and prev & need == need and ((prev & keep) | own_bit) == m:
                row.append((flat[(i - 1, j - w[i - 1], prev)] if i > 1 else None, v[i - 1]))
        sources.append(row)

    def target(G, f: int) -> int:
        best = 0
        for src, add in sources[f]:
            base = 1 if src is None else G[src]
            if base and base + add > best:
                best = base + add
        return best

    return PredicateSpec(
        index_count=len(coords),
        bottom=lambda f: 0,
        forbidden=lambda G, f: G[f] < target(G, f),
        alpha=target,
        priority=lambda f: coords[f][0],
        deps=lambda f: sorted({s for s, _ in sources[f] if s is not None}),
        coords=coords,
        name="knapsack-implications",
    )


class ProfitTable:
    """Solved table G[i][j] for 0 <= i <= n, 0 <= j <= W (row 0 is zero)."""

    def __init__(self, instance: KnapsackInstance, report: SolveReport) -> None:
        self.instance = instance
        self.report = report
        n, W = instance.n, instance.W
        self.G = [[0] * (W + 1) for _ in range(n + 1)]
        self.S: Optional[list[list[int]]] = None
        coords = report.state.index_map.coords
        values = report.values
        if coords and len(coords[0]) == 3:
            for (i, j, _), val in zip(coords, values):
                if val:
                    self.G[i][j] = max(self.G[i][j], val - 1)
        else:
            for (i, j), val in zip(coords, values):
                self.G[i][j] = val
            if instance.implications:
                self.S = [[0] * (W + 1) for _ in range(n + 1)]
                for f, (i, j) in enumerate(coords):
                    self.S[i][j] = report.state.witnesses[f] or 0

    @property
    def optimum(self) -> int:
        return self.G[self.instance.n][self.instance.W]


def solve_knapsack(
    instance: KnapsackInstance,
    config: Optional[ScheduleConfig] = None,
    implication_mode: str = "exact",
) -> ProfitTable:
    report = solve(knapsack_spec(instance, implication_mode), config)
    return ProfitTable(instance, report)


def _bits(mask: int) -> set[int]:
    return {k + 1 for k in range(mask.bit_length()) if mask >> k & 1}


def reconstruct_items(instance: KnapsackInstance, table: ProfitTable) -> set[int]:
    """1-based items of an optimal subset for capacity W.

    Without implications: item i is taken iff G[i][j] != G[i-1][j], walking
    back from (n, W).  With recorded witnesses the stored set is returned;
    with the exact formulation the refined table is walked back, preferring
    to skip an item on ties.
    """
    n, W = instance.n, instance.W
    if not instance.implications:
        items = set()
        j = W
        for i in range(n, 0, -1):
            if table.G[i][j] != table.G[i - 1][j]:
                items.add(i)
                j -= instance.w[i - 1]
        return items
    if table.S is not None:
        return _bits(table.S[n][W])
    return _walk_exact(instance, table.report)


def _walk_exact(instance: KnapsackInstance, report: SolveReport) -> set[int]:
    opened = _OpenTargets(instance)
    n, W = instance.n, instance.W
    if n == 0:
        return set()
    value = report.table()
    j = W
    m = max(opened.masks(n), key=lambda mm: (value[(n, W, mm)], -mm))
    items: set[int] = set()
    for i in range(n, 0, -1):
        cur = value[(i, j, m)]
        keep = opened.open_mask[i]
        own_bit = opened.bit.get(i, 0) & keep
        need = sum(opened.bit[b] for b in instance.requires(i))

        def before(jj: int, mm: int) -> int:
            if i == 1:
                return 1 if mm == 0 else 0
            return value[(i - 1, jj, mm)]

        step = None
        for prev in opened.masks(i - 1):
            if (prev & keep) == m and before(j, prev) == cur:
                step = (j, prev, False)
                break
        if step is None:
            wi = instance.w[i - 1]
            for prev in opened.masks(i - 1):
                if (
                    j >= wi
                    and prev & need == need
                    and ((prev & keep) | own_bit) == m
                    and before(j - wi, prev) and before(j - wi, prev) + instance.v[i - 1] == cur
                ):
                    step = (j - wi, prev, True)
                    break
        if step is None:
            raise ValueError(f"refined table is inconsistent at item {i}")
        j, m, took = step
        if took:
            items.add(i)
    return items
