"""Label propagation: update rule, timing models, tie handling, stopping.

Each vertex repeatedly adopts a most frequent label among its neighbors;
connected groups that reach label consensus become communities.  Three
timing models control when updates become visible:

* synchronous: every vertex updates from the previous step's labels;
* asynchronous: vertices update one at a time in a per-step random
  permutation, reading current labels;
* semi-synchronous: a proper coloring partitions the vertices into
  stages; each stage updates simultaneously, stages run in ascending
  color order within a step.

Ties (several labels sharing the maximum neighbor count) are resolved by
one of four strategies: uniform random, keep-current-if-maximal (Prec),
highest label value (Max), or Prec then Max.

Randomized decisions draw from per-decision streams derived from
``(seed, step, stage, vertex)``, so results never depend on the order in
which independent updates are executed; sequential and parallel
execution of the same configuration are bit-identical.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from .coloring import Coloring
from .graphs import Graph
from .rng import Stream, mix64

_TAG_TIE = 0x1
_TAG_PERM = 0x2

_PARALLEL_MIN_BATCH = 64  # below this, thread dispatch costs more than it saves


class TieStrategy(Enum):
    RANDOM = "random"
    PREC = "prec"
    MAX = "max"
    PREC_MAX = "prec-max"


class TimingModel(Enum):
    SYNCHRONOUS = "sync"
    ASYNCHRONOUS = "async"
    SEMI_SYNCHRONOUS = "semi-sync"


class StopCriterion(Enum):
    """When to stop iterating.

    NO_CHANGE stops once a step changes nothing.  C1 stops once every
    vertex already holds a maximal-frequency neighbor label, i.e. any
    changes in the step came only from ties.  C2 stops when the labeling
    equals the one from one or two steps earlier; it is sound only for
    synchronous Max-family runs (which never cycle with period above
    two) and may stop inside a longer cycle elsewhere.
    """

    NO_CHANGE = "no-change"
    C1 = "c1"
    C2 = "c2"


class RunStatus(Enum):
    RUNNING = "running"
    CONVERGED = "converged"
    CAP_EXCEEDED = "cap_exceeded"


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a propagation run on a given graph."""

    timing: TimingModel
    tie: TieStrategy
    stop: StopCriterion = StopCriterion.C1
    seed: int = 0
    step_cap: int = 1000
    initial_labels: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.step_cap < 1:
            raise ValueError("step_cap must be at least 1")


@dataclass(frozen=True)
class LabelState:
    """Labeling after `step` completed steps, plus its change history.

    ``f_trace[i-1]`` is the monochromatic-edge count after step ``i``;
    ``f_start`` is the count for the initial labeling.  ``last_changed``
    and ``last_tie_changed`` describe the most recent step: which
    vertices changed label, and which of those changed only because of a
    tie (the update's maximal-label set had two or more members).
    """

    labels: tuple[int, ...]
    step: int
    f_start: int
    f_trace: tuple[int, ...]
    status: RunStatus = RunStatus.RUNNING
    stop_reason: str | None = None
    last_changed: frozenset[int] = frozenset()
    last_tie_changed: frozenset[int] = frozenset()


@dataclass(frozen=True)
class RunMetrics:
    steps: int
    stages: int
    num_colors: int | None
    f_start: int
    f_trace: tuple[int, ...]
    status: RunStatus
    stop_reason: str | None


class DecisionRng:
    """Derives the independent per-decision streams for one run."""

    __slots__ = ("seed",)

    def __init__(self, seed: int) -> None:
        self.seed = seed

    def tie_stream(self, step: int, stage: int, vertex: int) -> Stream:
        return Stream(mix64(self.seed, _TAG_TIE, step, stage, vertex))

    def step_permutation(self, step: int, n: int) -> list[int]:
        return Stream(mix64(self.seed, _TAG_PERM, step)).permutation(n)


def monochromatic_edge_count(graph: Graph, labels: Sequence[int]) -> int:
    """Number of edges whose endpoints share a label."""
    count = 0
    for v, neigh in enumerate(graph.adjacency):
        lv = labels[v]
        for u in neigh:
            if u > v and labels[u] == lv:
                count += 1
    return count


def neighbor_frequencies(graph: Graph, v: int, labels: Sequence[int]) -> dict[int, int]:
    """Count each label among N(v); empty for isolated vertices."""
    counts: dict[int, int] = {}
    for u in graph.adjacency[v]:
        label = labels[u]
        counts[label] = counts.get(label, 0) + 1
    return counts


def _argmax_labels(freqs: dict[int, int]) -> list[int]:
    best = max(freqs.values())
    cands = [label for label, count in freqs.items() if count == best]
    cands.sort()
    return cands


def _pick(cands: list[int], current: int, tie: TieStrategy, stream: "Stream | None") -> int:
    if len(cands) == 1:
        return cands[0]
    if tie is TieStrategy.MAX:
        return cands[-1]
    if tie is TieStrategy.PREC_MAX:
        return current if current in cands else cands[-1]
    if tie is TieStrategy.PREC and current in cands:
        return current
    if stream is None:
        raise ValueError("randomized tie resolution needs a stream")
    return cands[stream.below(len(cands))]


def resolve(freqs: dict[int, int], current: int, tie: TieStrategy, stream: "Stream | None" = None) -> int:
    """Pick the new label from a non-empty frequency table.

    Always returns a member of the maximal-count label set.  RANDOM draws
    uniformly from it; PREC keeps `current` when it is maximal and draws
    uniformly otherwise; MAX takes the largest maximal label; PREC_MAX
    keeps `current` when maximal, otherwise takes the largest.
    """
    if not freqs:
        raise ValueError("empty frequency table (isolated vertex?)")
    return _pick(_argmax_labels(freqs), current, tie, stream)


def _assert_in_argmax(neigh: tuple[int, ...], labels: Sequence[int], chosen: int) -> bool:
    # independent recount backing the update-rule conformance assert
    counts: dict[int, int] = {}
    for u in neigh:
        label = labels[u]
        counts[label] = counts.get(label, 0) + 1
    return counts.get(chosen, 0) == max(counts.values())


def _decide_batch(
    graph: Graph,
    vertices: Iterable[int],
    labels: Sequence[int],
    tie: TieStrategy,
    rng: DecisionRng,
    step: int,
    stage_of: "Sequence[int] | None",
    stage: int,
) -> list[tuple[int, int, bool]]:
    """Compute (vertex, new_label, tie_flag) for each non-isolated vertex.

    Reads only `labels`; never writes.  `stage_of` supplies per-vertex
    stage indices when one batch spans several stages (async); otherwise
    the constant `stage` applies.
    """
    adjacency = graph.adjacency
    out: list[tuple[int, int, bool]] = []
    for v in vertices:
        neigh = adjacency[v]
        if not neigh:
            continue  # isolated: keeps its label forever
        counts: dict[int, int] = {}
        best = 0
        for u in neigh:
            label = labels[u]
            c = counts.get(label, 0) + 1
            counts[label] = c
            if c > best:
                best = c
        cands = [label for label, count in counts.items() if count == best]
        tie_flag = len(cands) > 1
        current = labels[v]
        if tie_flag:
            cands.sort()
            stream = None
            if tie is TieStrategy.RANDOM or (tie is TieStrategy.PREC and current not in cands):
                s = stage_of[v] if stage_of is not None else stage
                stream = rng.tie_stream(step, s, v)
            new = _pick(cands, current, tie, stream)
        else:
            new = cands[0]
        if __debug__:
            assert _assert_in_argmax(neigh, labels, new)
        out.append((v, new, tie_flag))
    return out


def _decide(
    graph: Graph,
    vertices: Sequence[int],
    labels: Sequence[int],
    tie: TieStrategy,
    rng: DecisionRng,
    step: int,
    stage: int,
    pool: "ThreadPoolExecutor | None",
    workers: int,
) -> list[tuple[int, int, bool]]:
    """Batch decisions, chunked over the pool when one is provided.

    Decisions are independent (per-decision streams), so the chunked
    results equal the sequential ones; they are re-assembled in vertex
    order either way.
    """
    if pool is None or workers <= 1 or len(vertices) < _PARALLEL_MIN_BATCH:
        return _decide_batch(graph, vertices, labels, tie, rng, step, None, stage)
    chunk = (len(vertices) + workers - 1) // workers
    futures = [
        pool.submit(
            _decide_batch, graph, vertices[i : i + chunk], labels, tie, rng, step, None, stage
        )
        for i in range(0, len(vertices), chunk)
    ]
    out: list[tuple[int, int, bool]] = []
    for future in futures:
        out.extend(future.result())
    return out


def _advance(
    state: LabelState,
    graph: Graph,
    new_labels: Sequence[int],
    changed: set[int],
    tie_changed: set[int],
) -> LabelState:
    labels = tuple(new_labels)
    return replace(
        state,
        labels=labels,
        step=state.step + 1,
        f_trace=state.f_trace + (monochromatic_edge_count(graph, labels),),
        last_changed=frozenset(changed),
        last_tie_changed=frozenset(tie_changed),
    )


def sync_step(
    graph: Graph,
    state: LabelState,
    tie: TieStrategy,
    rng: DecisionRng,
    pool: "ThreadPoolExecutor | None" = None,
    workers: int = 1,
) -> LabelState:
    """One synchronous step: every vertex updates from the previous labels."""
    step = state.step + 1
    old = state.labels
    new = list(old)
    changed: set[int] = set()
    tie_changed: set[int] = set()
    for v, label, tie_flag in _decide(
        graph, range(graph.n), old, tie, rng, step, 0, pool, workers
    ):
        if label != old[v]:
            new[v] = label
            changed.add(v)
            if tie_flag:
                tie_changed.add(v)
    return _advance(state, graph, new, changed, tie_changed)


def async_step(
    graph: Graph,
    state: LabelState,
    tie: TieStrategy,
    rng: DecisionRng,
    order: "Sequence[int] | None" = None,
) -> LabelState:
    """One asynchronous step: a fresh random permutation, updated in place.

    Each vertex reads current labels, so earlier positions in the
    permutation contribute this step's labels and later ones the previous
    step's.  Inherently sequential within the step.  Pass `order` to pin
    the permutation instead of drawing it from `rng`.
    """
    step = state.step + 1
    if order is None:
        order = rng.step_permutation(step, graph.n)
    elif sorted(order) != list(range(graph.n)):
        raise ValueError("order must be a permutation of the vertices")
    labels = list(state.labels)
    changed: set[int] = set()
    tie_changed: set[int] = set()
    for position, v in enumerate(order):
        for _, label, tie_flag in _decide_batch(
            graph, (v,), labels, tie, rng, step, None, position
        ):
            if label != labels[v]:
                labels[v] = label
                changed.add(v)
                if tie_flag:
                    tie_changed.add(v)
    return _advance(state, graph, labels, changed, tie_changed)


def semi_sync_step(
    graph: Graph,
    state: LabelState,
    coloring: Coloring,
    tie: TieStrategy,
    rng: DecisionRng,
    pool: "ThreadPoolExecutor | None" = None,
    workers: int = 1,
) -> LabelState:
    """One staged step: color classes update in ascending class order.

    Within a stage every vertex of the class updates from the labels as
    of the stage start; properness guarantees no two stage-mates are
    adjacent, so their updates are independent and their processing
    order (or parallel execution) cannot matter.
    """
    coloring.check_proper(graph)
    step = state.step + 1
    labels = list(state.labels)
    changed: set[int] = set()
    tie_changed: set[int] = set()
    for stage, cls in enumerate(coloring.classes):
        for v, label, tie_flag in _decide(
            graph, cls, labels, tie, rng, step, stage, pool, workers
        ):
            if label != labels[v]:
                labels[v] = label
                changed.add(v)
                if tie_flag:
                    tie_changed.add(v)
    return _advance(state, graph, labels, changed, tie_changed)


def check_c1(
    graph: Graph,
    prev_labels: Sequence[int],
    new_labels: Sequence[int],
    tie_changes: "frozenset[int] | set[int]",
) -> bool:
    """True iff every vertex kept its label or changed it only via a tie."""
    return all(
        new_labels[v] == prev_labels[v] or v in tie_changes
        for v in range(graph.n)
    )


def labels_locally_maximal(graph: Graph, labels: Sequence[int]) -> bool:
    """True iff every non-isolated vertex holds a maximal-frequency neighbor label.

    This re-evaluates maximality on the labeling as given, unlike
    check_c1 which trusts the tie flags recorded while the step ran.  A
    staged step can satisfy check_c1 yet leave some vertex non-maximal
    with respect to the final labeling, because flags reflect each
    vertex's stage-time view.  Once this predicate holds, a further step
    under PREC or PREC_MAX changes nothing.
    """
    for v in range(graph.n):
        neigh = graph.adjacency[v]
        if not neigh:
            continue
        counts: dict[int, int] = {}
        for u in neigh:
            label = labels[u]
            counts[label] = counts.get(label, 0) + 1
        if counts.get(labels[v], 0) != max(counts.values()):
            return False
    return True


def check_c2(history: Sequence[Sequence[int]]) -> bool:
    """True iff the newest labeling equals the one 1 or 2 steps before it."""
    if len(history) < 2:
        raise ValueError("need at least two labelings")
    current = history[-1]
    if tuple(current) == tuple(history[-2]):
        return True
    return len(history) >= 3 and tuple(current) == tuple(history[-3])


def initial_state(graph: Graph, labels: "Sequence[int] | None" = None) -> LabelState:
    if labels is None:
        labels = range(graph.n)
    labels = tuple(labels)
    if len(labels) != graph.n:
        raise ValueError(f"need {graph.n} labels, got {len(labels)}")
    if any(label < 0 for label in labels):
        raise ValueError("labels must be non-negative integers")
    return LabelState(
        labels=labels,
        step=0,
        f_start=monochromatic_edge_count(graph, labels),
        f_trace=(),
    )


def stage_count(timing: TimingModel, steps: int, n: int, num_colors: "int | None" = None) -> int:
    """Stages executed by a completed run: one stage is one atomic batch
    of simultaneous updates (a color class, a single vertex, or all of V)."""
    if timing is TimingModel.SEMI_SYNCHRONOUS:
        if num_colors is None:
            raise ValueError("semi-synchronous stage accounting needs the color count")
        return steps * num_colors
    if timing is TimingModel.ASYNCHRONOUS:
        return steps * n
    return steps


class MonotoneViolation(RuntimeError):
    """The staged model's monochromatic-edge potential failed to grow."""


def _check_monotone(state: LabelState) -> None:
    non_tie = state.last_changed - state.last_tie_changed
    if not non_tie:
        return
    f_now = state.f_trace[-1]
    f_prev = state.f_trace[-2] if len(state.f_trace) >= 2 else state.f_start
    if f_now <= f_prev:
        raise MonotoneViolation(
            f"step {state.step}: monochromatic edges went {f_prev} -> {f_now} "
            f"despite non-tie changes at {sorted(non_tie)}"
        )


def run(
    graph: Graph,
    config: RunConfig,
    coloring: "Coloring | None" = None,
    workers: int = 1,
) -> tuple[LabelState, RunMetrics]:
    """Iterate the configured step until the stop criterion fires or the
    step cap is reached.

    A coloring is required for (and only for) semi-synchronous timing and
    is validated up front.  Hitting the cap is not an error: the state
    comes back with CAP_EXCEEDED status (synchronous random-tie runs may
    legitimately never settle).  Every semi-synchronous step is checked
    against the staged model's convergence guarantee: a step containing a
    non-tie change must strictly increase the monochromatic-edge count,
    otherwise MonotoneViolation aborts the run.
    """
    if config.timing is TimingModel.SEMI_SYNCHRONOUS:
        if coloring is None:
            raise ValueError("semi-synchronous timing requires a coloring")
        coloring.check_proper(graph)
    elif coloring is not None:
        raise ValueError(f"{config.timing.value} timing does not take a coloring")

    state = initial_state(graph, config.initial_labels)
    rng = DecisionRng(config.seed)
    history: deque[tuple[int, ...]] = deque([state.labels], maxlen=3)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while state.step < config.step_cap:
            if config.timing is TimingModel.SYNCHRONOUS:
                state = sync_step(graph, state, config.tie, rng, pool, workers)
            elif config.timing is TimingModel.ASYNCHRONOUS:
                state = async_step(graph, state, config.tie, rng)
            else:
                state = semi_sync_step(graph, state, coloring, config.tie, rng, pool, workers)
                _check_monotone(state)
            history.append(state.labels)

            reason = None
            if config.stop is StopCriterion.NO_CHANGE:
                if not state.last_changed:
                    reason = "no-change"
            elif config.stop is StopCriterion.C1:
                if state.last_changed <= state.last_tie_changed:
                    reason = "c1"
            else:
                if len(history) >= 2 and state.labels == history[-2]:
                    reason = "c2-period-1"
                elif len(history) >= 3 and state.labels == history[-3]:
                    reason = "c2-period-2"
            if reason is not None:
                state = replace(state, status=RunStatus.CONVERGED, stop_reason=reason)
                break
        else:
            state = replace(state, status=RunStatus.CAP_EXCEEDED, stop_reason="step-cap")
    finally:
        if pool is not None:
            pool.shutdown()

    num_colors = coloring.num_colors if coloring is not None else None
    metrics = RunMetrics(
        steps=state.step,
        stages=stage_count(config.timing, state.step, graph.n, num_colors),
        num_colors=num_colors,
        f_start=state.f_start,
        f_trace=state.f_trace,
        status=state.status,
        stop_reason=state.stop_reason,
    )
    return state, metrics
