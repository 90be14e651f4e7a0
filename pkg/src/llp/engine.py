"""Least-fixpoint solver for lattice-linear predicates.

The state is a vector of non-negative integers that only ever moves up.  A
problem is described by a :class:`PredicateSpec`: a bottom vector, a
``forbidden`` test and an ``alpha`` advance target.  The solver repeatedly
advances forbidden indices until none is left, which yields the least vector
satisfying the predicate (or reports that some index would have to exceed its
``top`` bound).

Four schedules are provided and, for monotone specs, all of them return the
same vector:

* ``sequential``  -- ascending scans until a scan makes no advance;
* ``rounds``      -- synchronous rounds over a frozen snapshot;
* ``priority``    -- rounds restricted to one priority level at a time;
* ``async-stale`` -- seeded simulation of asynchronous workers that may read
  bounded-stale versions of indices owned by other workers.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import groupby
from typing import Any, Callable, Hashable, NamedTuple, Optional, Sequence

INT64_MAX = 2**63 - 1
DEFAULT_TOP_FOR_CEILING = 2**40

MODES = ("sequential", "rounds", "priority", "async-stale")
MODE_ALIASES = {"seq": "sequential", "async": "async-stale", "async_stale": "async-stale"}


class SpecError(ValueError):
    """A spec broke its contract (e.g. alpha did not move the value up)."""


class NonTerminationError(RuntimeError):
    """Raised when the advance ceiling is hit; the predicate is likely not monotone."""


@dataclass
class PredicateSpec:
    """A lattice-linear predicate in forbidden/advance form.

    ``forbidden`` and ``alpha`` receive a *view* and a flat index.  A view
    supports ``view[j]`` for values and ``view.witness(j)`` for the optional
    payload published together with a value (``None`` until the first
    advance).  ``witness``, when set, computes that payload at advance time
    from the same view that produced ``alpha``.
    """

    index_count: int
    bottom: Callable[[int], int]
    forbidden: Callable[[Any, int], bool]
    alpha: Callable[[Any, int], int]
    top: Optional[Callable[[int], Optional[int]]] = None
    priority: Optional[Callable[[int], int]] = None
    deps: Optional[Callable[[int], Sequence[int]]] = None
    witness: Optional[Callable[[Any, int], Any]] = None
    coords: Optional[Sequence[Hashable]] = None
    decode: Optional[Callable[[int], int]] = None
    name: str = "spec"

    def __post_init__(self) -> None:
        if self.index_count < 0:
            raise ValueError("index_count must be non-negative")
        if self.coords is not None and len(self.coords) != self.index_count:
            raise ValueError("coords must have one entry per index")

    def index_map(self) -> IndexMap:
        return IndexMap(self.coords if self.coords is not None else range(self.index_count))


class IndexMap:
    """Bijection between problem coordinates and flat indices."""

    def __init__(self, coords: Sequence[Hashable]) -> None:
        self.coords = list(coords)
        self._flat = {c: j for j, c in enumerate(self.coords)}
        if len(self._flat) != len(self.coords):
            raise ValueError("duplicate coordinates in index map")

    def flat(self, coord: Hashable) -> int:
        return self._flat[coord]

    def coord(self, j: int) -> Hashable:
        return self.coords[j]

    def __contains__(self, coord: Hashable) -> bool:
        return coord in self._flat

    def __len__(self) -> int:
        return len(self.coords)


class StateVector:
    """The global state G with per-index publication history.

    Every index has a single writer.  A publication appends ``(value,
    witness)`` to the index history in one store, so a reader that picks any
    history entry sees a value together with the payload that belongs to it.
    """

    def __init__(self, values: Sequence[int], index_map: Optional[IndexMap] = None) -> None:
        self.values = [int(v) for v in values]
        for v in self.values:
            if v < 0:
                raise SpecError("lattice values must be non-negative")
        self.witnesses: list[Any] = [None] * len(self.values)
        self.advance_count = [0] * len(self.values)
        self.history: list[list[tuple[int, Any]]] = [[(v, None)] for v in self.values]
        self.index_map = index_map if index_map is not None else IndexMap(range(len(self.values)))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> int:
        return self.values[j]

    def witness(self, j: int) -> Any:
        return self.witnesses[j]

    def publish(self, j: int, value: int, witness: Any = None) -> int:
        old = self.values[j]
        if value <= old:
            raise SpecError(f"advance of index {j} from {old} to {value} does not increase it")
        if value > INT64_MAX:
            raise OverflowError(f"value {value} at index {j} exceeds the 64-bit range")
        self.history[j].append((value, witness))
        self.witnesses[j] = witness
        self.values[j] = value
        self.advance_count[j] += 1
        return old

    def freeze(self) -> FrozenView:
        return FrozenView(tuple(self.values), tuple(self.witnesses))


class FrozenView:
    """Immutable snapshot used by synchronous rounds."""

    __slots__ = ("_values", "_witnesses")

    def __init__(self, values: Sequence[int], witnesses: Optional[Sequence[Any]] = None) -> None:
        self._values = values
        self._witnesses = witnesses if witnesses is not None else (None,) * len(values)

    def __len__(self) -> int:
        return len(self._values)

    def __getitem__(self, j: int) -> int:
        return self._values[j]

    def witness(self, j: int) -> Any:
        return self._witnesses[j]


class WorkerView:
    """What one asynchronous worker sees.

    Own indices are read fresh.  A foreign index is read as one of its last
    ``staleness_bound + 1`` published versions, picked by the worker's RNG.
    The choice is memoised between :meth:`begin` calls so ``forbidden`` and
    ``alpha`` evaluate against the same snapshot.
    """

    def __init__(
        self,
        state: StateVector,
        worker: int,
        workers: int,
        staleness_bound: int,
        rng: random.Random,
    ) -> None:
        self.state = state
        self.worker = worker
        self.workers = workers
        self.staleness_bound = staleness_bound
        self.rng = rng
        self._cache: dict[int, tuple[int, Any]] = {}

    def owns(self, j: int) -> bool:
        return j % self.workers == self.worker

    def begin(self) -> None:
        self._cache = {}

    def version(self, j: int) -> tuple[int, Any]:
        got = self._cache.get(j)
        if got is None:
            history = self.state.history[j]
            if self.staleness_bound == 0 or self.owns(j) or len(history) == 1:
                got = history[-1]
            else:
                back = self.rng.randint(0, min(self.staleness_bound, len(history) - 1))
                got = history[-1 - back]
            self._cache[j] = got
        return got

    def __len__(self) -> int:
        return len(self.state)

    def __getitem__(self, j: int) -> int:
        return self.version(j)[0]

    def witness(self, j: int) -> Any:
        return self.version(j)[1]


def snapshot_read(state: StateVector, j: int, context: Optional[WorkerView] = None) -> int:
    """Read index ``j`` as seen by ``context`` (fresh when no context is given)."""
    if context is None:
        return state.values[j]
    return context[j]


@dataclass
class ScheduleConfig:
    mode: str = "sequential"
    workers: int = 1
    seed: int = 0
    staleness_bound: int = 0
    trace: bool = False
    max_advances: Optional[int] = None

    def __post_init__(self) -> None:
        self.mode = MODE_ALIASES.get(self.mode, self.mode)
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.staleness_bound < 0:
            raise ValueError("staleness_bound must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


class TraceEvent(NamedTuple):
    round: int
    index: int
    old: int
    new: int


class Violation(NamedTuple):
    """The advance that would have exceeded ``top``."""

    index: int
    alpha: int
    top: int


@dataclass
class SolveReport:
    state: StateVector
    feasible: bool
    rounds: int
    total_advances: int
    per_index_advances: list[int]
    mode: str
    trace: Optional[list[TraceEvent]] = None
    violation: Optional[Violation] = None
    decode: Optional[Callable[[int], int]] = field(default=None, repr=False)

    @property
    def values(self) -> list[int]:
        """Decoded values; on an infeasible run these are the partial state."""
        if self.decode is None:
            return list(self.state.values)
        return [self.decode(v) for v in self.state.values]

    @property
    def result(self) -> Optional[list[int]]:
        return self.values if self.feasible else None

    def __getitem__(self, coord: Hashable) -> int:
        v = self.state.values[self.state.index_map.flat(coord)]
        return self.decode(v) if self.decode is not None else v

    def table(self) -> dict[Hashable, int]:
        return dict(zip(self.state.index_map.coords, self.values))


class _Abort(Exception):
    def __init__(self, violation: Violation) -> None:
        super().__init__(violation)
        self.violation = violation


class _Run:
    """Bookkeeping shared by all schedules."""

    def __init__(self, spec: PredicateSpec, config: ScheduleConfig) -> None:
        self.spec = spec
        self.config = config
        n = spec.index_count
        self.state = StateVector([spec.bottom(j) for j in range(n)], spec.index_map())
        self.tops = [spec.top(j) if spec.top is not None else None for j in range(n)]
        self.total = 0
        self.rounds = 0
        self.round_no = 1
        self.trace: Optional[list[TraceEvent]] = [] if config.trace else None
        if config.max_advances is not None:
            self.ceiling = config.max_advances
        else:
            bound = max((t for t in self.tops if t is not None), default=0)
            if any(t is None for t in self.tops) or not self.tops:
                bound = max(bound, DEFAULT_TOP_FOR_CEILING)
            self.ceiling = max(n, 1) * bound
        self.dependents: Optional[list[list[int]]] = None
        if spec.deps is not None:
            dependents: list[list[int]] = [[] for _ in range(n)]
            for j in range(n):
                for d in spec.deps(j):
                    dependents[d].append(j)
            self.dependents = dependents

    def evaluate(self, view: Any, j: int) -> Optional[tuple[int, Any]]:
        if not self.spec.forbidden(view, j):
            return None
        a = self.spec.alpha(view, j)
        current = view[j]
        if a <= current:
            raise SpecError(
                f"{self.spec.name}: index {j} is forbidden but alpha={a} does not exceed {current}"
            )
        top = self.tops[j]
        if top is not None and a > top:
            raise _Abort(Violation(j, a, top))
        w = self.spec.witness(view, j) if self.spec.witness is not None else None
        return a, w

    def apply(self, j: int, value: int, witness: Any) -> None:
        old = self.state.publish(j, value, witness)
        self.total += 1
        if self.trace is not None:
            self.trace.append(TraceEvent(self.round_no, j, old, value))
        if self.total > self.ceiling:
            raise NonTerminationError(
                f"{self.spec.name}: more than {self.ceiling} advances; "
                "the predicate is probably not monotone or not lattice-linear"
            )

    def step(self, view: Any, j: int) -> bool:
        got = self.evaluate(view, j)
        if got is None:
            return False
        self.apply(j, *got)
        return True

    def report(self, violation: Optional[Violation] = None) -> SolveReport:
        return SolveReport(
            state=self.state,
            feasible=violation is None,
            rounds=self.rounds,
            total_advances=self.total,
            per_index_advances=list(self.state.advance_count),
            mode=self.config.mode,
            trace=self.trace,
            violation=violation,
            decode=self.spec.decode,
        )


def _guarded(body: Callable[[_Run], None], spec: PredicateSpec, config: ScheduleConfig) -> SolveReport:
    run = _Run(spec, config)
    try:
        body(run)
    except _Abort as abort:
        return run.report(abort.violation)
    return run.report()


def solve_sequential(spec: PredicateSpec, config: Optional[ScheduleConfig] = None) -> SolveReport:
    """Scan indices in ascending order until a full scan advances nothing."""
    config = config or ScheduleConfig()

    def body(run: _Run) -> None:
        while True:
            run.round_no = run.rounds + 1
            changed = False
            for j in range(spec.index_count):
                if run.step(run.state, j):
                    changed = True
            if not changed:
                return
            run.rounds += 1

    return _guarded(body, spec, config)


def _evaluate_all(
    run: _Run, view: FrozenView, active: list[int], pool: Optional[ThreadPoolExecutor], workers: int
) -> list[tuple[int, int, Any]]:
    def chunk(part: list[int]) -> list[tuple[int, int, Any]]:
        out = []
        for j in part:
            try:
                got = run.evaluate(view, j)
            except _Abort as abort:
                # defer so the lowest violating index wins deterministically
                out.append((j, abort.violation.alpha, abort))
                continue
            if got is not None:
                out.append((j, got[0], got[1]))
        return out

    if pool is None or len(active) < 2 * workers:
        found = chunk(active)
    else:
        parts = [[j for j in active if j % workers == w] for w in range(workers)]
        found = [item for part in pool.map(chunk, parts) for item in part]
        found.sort(key=lambda item: item[0])
    for item in found:
        if isinstance(item[2], _Abort):
            raise item[2]
    return found


def _run_rounds(
    run: _Run, indices: list[int], pool: Optional[ThreadPoolExecutor], workers: int
) -> bool:
    """Synchronous rounds over ``indices`` until a round advances nothing."""
    members = set(indices)
    active = sorted(indices)
    advanced = False
    while active:
        run.round_no = run.rounds + 1
        found = _evaluate_all(run, run.state.freeze(), active, pool, workers)
        if not found:
            break
        for j, value, witness in found:
            run.apply(j, value, witness)
        run.rounds += 1
        advanced = True
        if run.dependents is None:
            active = sorted(indices)
        else:
            touched = {j for j, _, _ in found}
            for j, _, _ in found:
                touched.update(run.dependents[j])
            active = sorted(touched & members)
    return advanced


def _with_pool(config: ScheduleConfig, fn: Callable[[Optional[ThreadPoolExecutor]], None]) -> None:
    if config.workers == 1:
        fn(None)
        return
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        fn(pool)


def solve_rounds(spec: PredicateSpec, config: Optional[ScheduleConfig] = None) -> SolveReport:
    """Advance every forbidden index of a frozen snapshot per round.

    ``rounds`` counts the rounds that advanced at least one index.  When the
    spec declares ``deps`` only indices whose inputs changed are re-evaluated,
    which does not change the outcome of any round.
    """
    config = config or ScheduleConfig(mode="rounds")

    def body(run: _Run) -> None:
        _with_pool(config, lambda pool: _run_rounds(run, list(range(spec.index_count)), pool, config.workers))

    return _guarded(body, spec, config)


def solve_priority(spec: PredicateSpec, config: Optional[ScheduleConfig] = None) -> SolveReport:
    """Process priority levels in ascending order, each as synchronous rounds.

    Passes over all levels repeat until one makes no advance, so the result
    is correct even when a level reads indices of a later level.
    """
    if spec.priority is None:
        raise ValueError(f"{spec.name}: priority scheduling needs spec.priority")
    config = config or ScheduleConfig(mode="priority")
    order = sorted(range(spec.index_count), key=lambda j: (spec.priority(j), j))
    levels = [list(g) for _, g in groupby(order, key=spec.priority)]

    def body(run: _Run) -> None:
        def passes(pool: Optional[ThreadPoolExecutor]) -> None:
            while True:
                changed = False
                for level in levels:
                    if _run_rounds(run, level, pool, config.workers):
                        changed = True
                if not changed:
                    return

        _with_pool(config, passes)

    return _guarded(body, spec, config)


def solve_async(spec: PredicateSpec, config: Optional[ScheduleConfig] = None) -> SolveReport:
    """Seeded simulation of asynchronous workers with bounded-stale reads.

    Index ``j`` belongs to worker ``j % workers``.  Each epoch performs
    ``n`` steps; a step lets a randomly chosen worker evaluate the next of its
    own indices against a :class:`WorkerView`.  Every epoch ends with a sweep
    in which each worker re-checks its indices on fresh values.  The run stops
    after two consecutive sweeps that find nothing forbidden.  ``rounds``
    counts epochs that advanced something.
    """
    config = config or ScheduleConfig(mode="async-stale")
    n = spec.index_count

    def body(run: _Run) -> None:
        if n == 0:
            return
        scheduler = random.Random(config.seed)
        owned = [list(range(w, n, config.workers)) for w in range(config.workers)]
        busy = [w for w in range(config.workers) if owned[w]]
        views = [
            WorkerView(run.state, w, config.workers, config.staleness_bound,
                       random.Random(scheduler.getrandbits(64)))
            for w in range(config.workers)
        ]
        cursors = [0] * config.workers
        clean = 0
        while clean < 2:
            run.round_no = run.rounds + 1
            advanced = False
            for _ in range(n):
                w = busy[0] if len(busy) == 1 else scheduler.choice(busy)
                mine = owned[w]
                j = mine[cursors[w]]
                cursors[w] = (cursors[w] + 1) % len(mine)
                view = views[w]
                view.begin()
                if run.step(view, j):
                    advanced = True
            swept = False
            for w in busy:
                for j in owned[w]:
                    if run.step(run.state, j):
                        swept = True
            clean = 0 if swept else clean + 1
            if advanced or swept:
                run.rounds += 1

    return _guarded(body, spec, config)


_SOLVERS = {
    "sequential": solve_sequential,
    "rounds": solve_rounds,
    "priority": solve_priority,
    "async-stale": solve_async,
}


def solve(spec: PredicateSpec, config: Optional[ScheduleConfig] = None) -> SolveReport:
    config = config or ScheduleConfig()
    return _SOLVERS[config.mode](spec, config)
