"""Exact and query-limited minimal-evasion-cost search.

``mec_exact`` runs budgeted uniform-cost search over the monotone edit
lattice: states are feature vectors, edges are single upward edits priced
by the cost schedule, and the goal is any state the classifier labels +1
(probability >= 0.5). The search is complete up to the budget, so the
returned cost is the exact minimum and "infinite" is a certificate that
no evasion exists within budget.

Ties between equal-cost frontier entries are broken deterministically by
(path length, edit sequence under a fixed total order on single edits),
which pins one canonical optimal trace per instance. Supplying a shuffled
``edit_order`` changes only which optimal trace is reported, never the
cost; that is exercised by the tie-break stability diagnostic.

``mec_greedy`` models a label-only attacker with a bounded number of
classifier queries: at each step it scans single-edit successors (each
probe consumes one query), applies the cheapest label-flipping edit if
the scan found one, and otherwise the edit with the best probability
gain per unit cost. Its cost is an upper bound on the exact one.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .cost_model import CostSchedule
from .costs import Cost, INFINITE, is_finite
from .errors import MecbenchError
from .schema import FeatureSchema, FeatureVector

State = tuple[int, ...]


@dataclass(frozen=True)
class TraceEdit:
    j: int
    source: int
    target: int
    cost: Cost


@dataclass(frozen=True)
class EvasionTrace:
    edits: tuple[TraceEdit, ...]
    total: Cost

    def __post_init__(self):
        summed = sum((e.cost for e in self.edits), Fraction(0))
        if summed != self.total:
            raise MecbenchError(f"trace total {self.total} != edit sum {summed}")
        last: dict[int, int] = {}
        count: dict[int, int] = {}
        for e in self.edits:
            if e.target <= e.source:
                raise MecbenchError(f"non-monotone trace edit {e}")
            if e.j in last and e.source != last[e.j]:
                raise MecbenchError(f"coordinate {e.j} edited out of order")
            count[e.j] = count.get(e.j, 0) + 1
            if count[e.j] > 2:
                raise MecbenchError(f"coordinate {e.j} edited more than twice")
            last[e.j] = e.target


@dataclass(frozen=True)
class EvasionResult:
    mec: Cost
    trace: Optional[EvasionTrace]
    expanded_nodes: int

    def __post_init__(self):
        if is_finite(self.mec) != (self.trace is not None):
            raise MecbenchError("finite mec must carry a trace; infinite mec must not")
        if self.trace is not None and self.trace.total != self.mec:
            raise MecbenchError("trace total differs from mec")


@dataclass(frozen=True)
class AttackerConfig:
    mode: str = "exact"  # "exact" | "greedy"
    query_budget: Optional[int] = None
    b_max: Cost = Fraction(18)

    def __post_init__(self):
        if self.mode not in ("exact", "greedy"):
            raise MecbenchError(f"unknown attacker mode {self.mode!r}")
        if self.mode == "greedy" and (self.query_budget is None or self.query_budget <= 0):
            raise MecbenchError("greedy attacker needs a positive query budget")
        if not is_finite(self.b_max):
            raise MecbenchError("the cost budget must be finite")


ProbaFn = Callable[[State], float]


def _memoized_proba(model, cache: Optional[dict]) -> ProbaFn:
    cache = cache if cache is not None else {}

    def proba(state: State) -> float:
        p = cache.get(state)
        if p is None:
            p = float(model.predict_proba(np.array(state, dtype=np.int8)))
            cache[state] = p
        return p

    return proba


def _finite_transitions(
    schedule: CostSchedule, schema: FeatureSchema
) -> list[dict[int, list[tuple[int, Cost]]]]:
    """Per coordinate: current value -> [(target, cost)] for finite upward moves."""
    table: list[dict[int, list[tuple[int, Cost]]]] = []
    for feature in schema.features:
        by_value: dict[int, list[tuple[int, Cost]]] = {}
        for source in feature.admissible:
            moves = []
            for target in feature.admissible:
                if target > source:
                    c = schedule.entry(feature.group, source, target)
                    if is_finite(c):
                        moves.append((target, c))
            by_value[source] = moves
        table.append(by_value)
    return table


def canonical_edit_order(schema: FeatureSchema) -> list[tuple[int, int]]:
    """All (coordinate, target) edit slots in ascending (j, target) order."""
    slots = []
    for j, feature in enumerate(schema.features):
        for target in feature.admissible:
            if target > min(feature.admissible):
                slots.append((j, target))
    return slots


def mec_exact(
    model,
    schedule: CostSchedule,
    schema: FeatureSchema,
    x: FeatureVector,
    b_max: Cost,
    edit_order: Optional[Sequence[tuple[int, int]]] = None,
    proba_cache: Optional[dict] = None,
) -> EvasionResult:
    """Exact minimal evasion cost within ``b_max`` via uniform-cost search.

    Internally costs are rescaled by the least common denominator of the
    schedule, so frontier ordering runs on plain integers; results are
    mapped back to exact rationals. Successor generation only extends a
    path with coordinates >= the last edited one: edits commute, every
    reachable state keeps exactly its sorted edit sequences, and the
    lexicographically least optimal sequence (the canonical trace) is
    sorted, so pruning the unsorted duplicates changes nothing observable.
    """
    if not is_finite(b_max):
        raise MecbenchError("b_max must be finite")
    proba = _memoized_proba(model, proba_cache)
    start: State = tuple(x.values)
    if proba(start) >= 0.5:
        return EvasionResult(Fraction(0), EvasionTrace((), Fraction(0)), 0)

    rank = {slot: i for i, slot in enumerate(edit_order or canonical_edit_order(schema))}
    trans = _finite_transitions(schedule, schema)
    scale = math.lcm(
        b_max.denominator,
        *(c.denominator for by_value in trans for moves in by_value.values() for _, c in moves),
    )
    scaled: list[dict[int, list[tuple[int, int]]]] = [
        {v: [(t, int(c * scale)) for t, c in moves] for v, moves in by_value.items()}
        for by_value in trans
    ]
    budget = int(b_max * scale)
    d = schema.d
    # Heap entries: (scaled cost, path length, tie-break ranks, state, edits, min next j).
    heap: list = [(0, 0, (), start, (), 0)]
    visited: set[State] = set()
    expanded = 0

    while heap:
        cost, pathlen, rankseq, state, edits, next_j = heapq.heappop(heap)
        if state in visited:
            continue
        visited.add(state)
        expanded += 1
        if proba(state) >= 0.5:
            total = Fraction(cost, scale)
            trace = EvasionTrace(
                tuple(TraceEdit(j, s, t, Fraction(c, scale)) for (j, s, t, c) in edits), total
            )
            return EvasionResult(total, trace, expanded)
        for j in range(next_j, d):
            value = state[j]
            for target, c in scaled[j][value]:
                new_cost = cost + c
                if new_cost <= budget:
                    new_state = state[:j] + (target,) + state[j + 1 :]
                    if new_state not in visited:
                        heapq.heappush(
                            heap,
                            (
                                new_cost,
                                pathlen + 1,
                                rankseq + (rank[(j, target)],),
                                new_state,
                                edits + ((j, value, target, c),),
                                j,
                            ),
                        )
    return EvasionResult(INFINITE, None, expanded)


def mec_greedy(
    model,
    schedule: CostSchedule,
    schema: FeatureSchema,
    x: FeatureVector,
    b_max: Cost,
    query_budget: int,
) -> EvasionResult:
    """Query-limited greedy attacker; every probability probe costs one query."""
    if query_budget <= 0:
        raise MecbenchError("query budget must be positive")
    trans = _finite_transitions(schedule, schema)
    queries_left = query_budget

    def query(state: State) -> float:
        nonlocal queries_left
        queries_left -= 1
        return float(model.predict_proba(np.array(state, dtype=np.int8)))

    state: State = tuple(x.values)
    current_p = query(state)
    if current_p >= 0.5:
        return EvasionResult(Fraction(0), EvasionTrace((), Fraction(0)), 0)

    total: Cost = Fraction(0)
    applied: list[TraceEdit] = []
    steps = 0
    while True:
        candidates = []
        for j, value in enumerate(state):
            for target, c in trans[j][value]:
                if total + c <= b_max:
                    candidates.append((j, value, target, c))
        if not candidates:
            return EvasionResult(INFINITE, None, steps)

        scanned: list[tuple[tuple[int, int, int, Cost], float]] = []
        for cand in candidates:
            if queries_left == 0:
                break
            j, value, target, c = cand
            scanned.append((cand, query(state[:j] + (target,) + state[j + 1 :])))
        steps += 1

        flips = [(cand, p) for cand, p in scanned if p >= 0.5]
        if flips:
            (j, value, target, c), p = min(flips, key=lambda item: item[0][3])
            applied.append(TraceEdit(j, value, target, c))
            total = total + c
            return EvasionResult(total, EvasionTrace(tuple(applied), total), steps)
        if queries_left == 0:
            return EvasionResult(INFINITE, None, steps)

        best = None
        best_ratio = None
        for cand, p in scanned:
            ratio = (p - current_p) / float(cand[3])
            if best_ratio is None or ratio > best_ratio:
                best, best_ratio = (cand, p), ratio
        (j, value, target, c), p = best
        applied.append(TraceEdit(j, value, target, c))
        total = total + c
        state = state[:j] + (target,) + state[j + 1 :]
        current_p = p


def batch_evaluate(
    model,
    schedule: CostSchedule,
    schema: FeatureSchema,
    instances: Sequence[FeatureVector],
    attacker: AttackerConfig,
    edit_order: Optional[Sequence[tuple[int, int]]] = None,
) -> list[EvasionResult]:
    """Per-instance results in input order; independent of evaluation order.

    Exact-mode searches share a probability memo across instances (their
    upward cones overlap heavily); predictions are pure so the memo cannot
    change results, only speed.
    """
    if attacker.mode == "exact":
        cache: dict = {}
        return [
            mec_exact(model, schedule, schema, x, attacker.b_max, edit_order, cache)
            for x in instances
        ]
    return [
        mec_greedy(model, schedule, schema, x, attacker.b_max, attacker.query_budget)
        for x in instances
    ]
