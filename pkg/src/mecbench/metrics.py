"""Robustness diagnostics over batches of evasion results.

All statistics are computed in exact rational arithmetic (costs are
Fractions, probabilities of discrete events are Fractions), so equal
costs compare equal and deterministic reruns reproduce every digit.

Conventions pinned here:

* survival S(B) uses a strict inequality, infinite costs exceed every B;
* the robustness index is the left Riemann sum (1/b_max) * sum_{B=0}^{b_max-1} S(B),
  with infeasible instances contributing 1 to every term;
* median/quartiles of the cost distribution cover finite values only and
  interpolate linearly between order statistics (type-7);
* top-k feature ranking breaks count ties toward the lower feature index.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .costs import Cost, INFINITE, is_finite
from .errors import (
    AllInfeasible,
    EmptyDistribution,
    MecbenchError,
    NoSuccessfulTraces,
)
from .evasion import EvasionResult, EvasionTrace, batch_evaluate, canonical_edit_order, AttackerConfig
from .rng import SplitMix64, derive_seed
from .schema import FeatureSchema


@dataclass(frozen=True)
class MECDistribution:
    finite: tuple[Fraction, ...]  # sorted ascending
    infinite_count: int
    n: int

    def __post_init__(self):
        if len(self.finite) + self.infinite_count != self.n:
            raise MecbenchError("distribution counts do not add up")

    @classmethod
    def from_results(cls, results: Sequence[EvasionResult]) -> "MECDistribution":
        finite = sorted(r.mec for r in results if is_finite(r.mec))
        return cls(tuple(finite), sum(1 for r in results if not is_finite(r.mec)), len(results))

    @property
    def noev_fraction(self) -> Fraction:
        if self.n == 0:
            raise EmptyDistribution("no results")
        return Fraction(self.infinite_count, self.n)


def survival(dist: MECDistribution, budget: Cost) -> Fraction:
    """Fraction of results whose cost strictly exceeds the budget."""
    if dist.n == 0:
        raise EmptyDistribution("no results")
    above = sum(1 for v in dist.finite if v > budget) + dist.infinite_count
    return Fraction(above, dist.n)


@dataclass(frozen=True)
class SurvivalCurve:
    b_max: int
    points: tuple[Fraction, ...]  # S(B) for B = 0 .. b_max inclusive
    noev: Fraction

    def __post_init__(self):
        if len(self.points) != self.b_max + 1:
            raise MecbenchError("curve length must be b_max + 1")
        if self.points and self.points[0] > 1:
            raise MecbenchError("S(0) must be <= 1")
        for prev, cur in zip(self.points, self.points[1:]):
            if cur > prev:
                raise MecbenchError("survival must be nonincreasing")
        if any(p < self.noev for p in self.points):
            raise MecbenchError("survival cannot fall below the infeasible mass")


def survival_curve(dist: MECDistribution, b_max: int) -> SurvivalCurve:
    points = tuple(survival(dist, Fraction(b)) for b in range(b_max + 1))
    return SurvivalCurve(b_max, points, dist.noev_fraction)


def fri(dist: MECDistribution, b_max: int) -> Fraction:
    """Normalized area under the survival curve over integer budgets [0, b_max)."""
    if dist.n == 0:
        raise EmptyDistribution("no results")
    return sum(survival(dist, Fraction(b)) for b in range(b_max)) / b_max


def fri_from_truncated_costs(dist: MECDistribution, b_max: int) -> Fraction:
    """Independent route to the same quantity, via per-instance truncated costs.

    An instance with cost c resists exactly min(ceil(c), b_max) of the integer
    budgets 0..b_max-1; infeasible instances resist all of them.
    """
    if dist.n == 0:
        raise EmptyDistribution("no results")
    resisted = sum(min(math.ceil(v), b_max) for v in dist.finite)
    resisted += dist.infinite_count * b_max
    return Fraction(resisted, dist.n * b_max)


def _interpolated(sorted_values: Sequence, q: Fraction):
    """Type-7 quantile: linear interpolation between order statistics."""
    m = len(sorted_values)
    if m == 1:
        return sorted_values[0]
    h = (m - 1) * q
    lo = int(h)  # floor; q >= 0
    frac = h - lo
    if frac == 0:
        return sorted_values[lo]
    a, b = sorted_values[lo], sorted_values[lo + 1]
    if not (is_finite(a) and is_finite(b)):
        return INFINITE
    return a + frac * (b - a)


def quantiles_finite(dist: MECDistribution) -> tuple[Fraction, Fraction, Fraction]:
    """(median, q1, q3) of the finite costs."""
    if dist.n == 0:
        raise EmptyDistribution("no results")
    if not dist.finite:
        raise AllInfeasible("every result is infinite")
    return (
        _interpolated(dist.finite, Fraction(1, 2)),
        _interpolated(dist.finite, Fraction(1, 4)),
        _interpolated(dist.finite, Fraction(3, 4)),
    )


def median_mec(dist: MECDistribution) -> Cost:
    """Median over finite costs; INFINITE if nothing is evadable."""
    if not dist.finite:
        if dist.n == 0:
            raise EmptyDistribution("no results")
        return INFINITE
    return _interpolated(dist.finite, Fraction(1, 2))


def distributional_quantile(dist: MECDistribution, alpha: Fraction) -> Cost:
    """ceil(alpha*n)-th smallest cost with infinities ordered last."""
    if dist.n == 0:
        raise EmptyDistribution("no results")
    k = math.ceil(alpha * dist.n)
    k = min(max(k, 1), dist.n)
    if k <= len(dist.finite):
        return dist.finite[k - 1]
    return INFINITE


def alpha_at_cost_floor(dist: MECDistribution, c_min: Cost) -> Fraction:
    """Fraction of all results with finite cost at or below the cost floor."""
    if dist.n == 0:
        raise EmptyDistribution("no results")
    return Fraction(sum(1 for v in dist.finite if v <= c_min), dist.n)


# ---------------------------------------------------------------------------
# Concentration


@dataclass(frozen=True)
class ConcentrationStats:
    edit_counts: tuple[int, ...]  # per feature index
    rci: dict[int, Fraction]  # k -> RCI_k
    first_top1: Fraction
    top_first_feature: int  # modal first-edit feature index
    top_feature_name: str

    def top_features(self, k: int) -> list[int]:
        order = sorted(range(len(self.edit_counts)), key=lambda j: (-self.edit_counts[j], j))
        return order[:k]


def concentration(traces: Sequence[EvasionTrace], schema: FeatureSchema) -> ConcentrationStats:
    """Edit-mass concentration and first-step bottleneck over successful traces."""
    if not traces:
        raise NoSuccessfulTraces("no successful traces")
    d = schema.d
    counts = [0] * d
    first_counts = [0] * d
    for trace in traces:
        for e in trace.edits:
            counts[e.j] += 1
        if trace.edits:
            first_counts[trace.edits[0].j] += 1
    total = sum(counts)
    if total == 0:
        raise NoSuccessfulTraces("traces contain no edits")
    by_mass = sorted(range(d), key=lambda j: (-counts[j], j))
    rci: dict[int, Fraction] = {}
    running = 0
    for k, j in enumerate(by_mass, start=1):
        running += counts[j]
        rci[k] = Fraction(running, total)
    j_star = max(range(d), key=lambda j: (first_counts[j], -j))
    return ConcentrationStats(
        edit_counts=tuple(counts),
        rci=rci,
        first_top1=Fraction(first_counts[j_star], len(traces)),
        top_first_feature=j_star,
        top_feature_name=schema.names[j_star],
    )


def successful_traces(results: Sequence[EvasionResult]) -> list[EvasionTrace]:
    return [r.trace for r in results if r.trace is not None]


# ---------------------------------------------------------------------------
# Bootstrap


@dataclass(frozen=True)
class BootstrapCI:
    statistic: str
    point: Cost
    lower: Cost
    upper: Cost
    resamples: int
    seed: int

    def __post_init__(self):
        if not self.lower <= self.point <= self.upper:
            raise MecbenchError(
                f"bootstrap CI [{self.lower}, {self.upper}] misses point {self.point}"
            )


def _statistic_fn(name: str, schema: FeatureSchema, b_max: int, k: int, budget: Cost):
    if name == "median_mec":
        return lambda rs: median_mec(MECDistribution.from_results(rs))
    if name == "fri":
        return lambda rs: fri(MECDistribution.from_results(rs), b_max)
    if name == "rci_k":
        return lambda rs: concentration(successful_traces(rs), schema).rci.get(k, Fraction(1))
    if name == "survival_at":
        return lambda rs: survival(MECDistribution.from_results(rs), budget)
    raise MecbenchError(f"unknown bootstrap statistic {name!r}")


def bootstrap_ci(
    results: Sequence[EvasionResult],
    statistic: str,
    schema: FeatureSchema,
    seed: int,
    resamples: int = 200,
    b_max: int = 18,
    k: int = 3,
    budget: Cost = Fraction(2),
) -> BootstrapCI:
    """Percentile bootstrap (2.5/97.5) resampling instances with replacement."""
    if not results:
        raise EmptyDistribution("no results")
    fn = _statistic_fn(statistic, schema, b_max, k, budget)
    point = fn(list(results))
    rng = SplitMix64(seed)
    n = len(results)
    values = []
    for _ in range(resamples):
        draw = [results[rng.below(n)] for _ in range(n)]
        values.append(fn(draw))
    values.sort()
    lower = _interpolated(values, Fraction(1, 40))
    upper = _interpolated(values, Fraction(39, 40))
    return BootstrapCI(statistic, point, lower, upper, resamples, seed)


# ---------------------------------------------------------------------------
# Tie-break stability


@dataclass(frozen=True)
class TiebreakStability:
    rci3_values: tuple[Fraction, ...]
    std: float
    canonical_rci3: Fraction


def tiebreak_stability(
    model,
    schedule,
    schema: FeatureSchema,
    instances,
    n_orders: int = 10,
    seed: int = 0,
    b_max: Cost = Fraction(18),
) -> TiebreakStability:
    """RCI_3 spread across randomized tie-break orders.

    Costs must be order-invariant; a mismatch against the canonical run is a
    hard error, since it would mean the search is not exact.
    """
    attacker = AttackerConfig(mode="exact", b_max=b_max)
    canonical = batch_evaluate(model, schedule, schema, instances, attacker)
    canonical_rci3 = concentration(successful_traces(canonical), schema).rci.get(3, Fraction(1))
    base_order = canonical_edit_order(schema)
    values = []
    for i in range(n_orders):
        order = list(base_order)
        SplitMix64(derive_seed(seed, "tiebreak-order", i)).shuffle(order)
        results = batch_evaluate(model, schedule, schema, instances, attacker, edit_order=order)
        for r_perm, r_canon in zip(results, canonical):
            if r_perm.mec != r_canon.mec:
                raise MecbenchError(
                    "minimal cost changed under a tie-break permutation: "
                    f"{r_perm.mec} != {r_canon.mec}"
                )
        values.append(concentration(successful_traces(results), schema).rci.get(3, Fraction(1)))
    std = statistics.pstdev([float(v) for v in values]) if values else 0.0
    return TiebreakStability(tuple(values), std, canonical_rci3)
