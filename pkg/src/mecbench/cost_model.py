"""Transition-cost schedules over feature groups, and their perturbations.

A schedule assigns a cost to every monotone transition (-1 -> 0, -1 -> 1,
0 -> 1) of every feature group; "inf" marks forbidden transitions. The
built-in ``base`` and ``strict`` schedules ship as package data:

    base:   surface (1, 2, 1)   semi_domain (3, 6, 3)   infrastructure (4, 8, 4)
    strict: same, except infrastructure -1 -> 1 and 0 -> 1 are inf

Schedules loaded from files must satisfy the per-group triangle property
c(v -> v'') <= c(v -> v') + c(v' -> v''), which makes one direct transition
per coordinate optimal and the direct-sum ``cumulative_cost`` formula exact;
violating files are rejected. Derived schedules (multiplicative noise) may
break the triangle: search results stay exact because the search also walks
two-step per-coordinate paths, only the direct-sum shortcut loses tightness.
The cross-group ordering surface < semi_domain < infrastructure is asserted
softly (a warning), since deliberate down-scalings are allowed to break it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Mapping, Union

import yaml

from .costs import Cost, INFINITE, as_cost, cost_to_json, is_finite, is_infinite
from .errors import ScheduleError, SchemaMismatch, UnknownFeature
from .rng import SplitMix64
from .schema import FeatureGroup, FeatureSchema, FeatureVector

# Monotone transitions in canonical order.
TRANSITIONS: tuple[tuple[int, int], ...] = ((-1, 0), (-1, 1), (0, 1))

_GROUP_ORDER = (FeatureGroup.SURFACE, FeatureGroup.SEMI_DOMAIN, FeatureGroup.INFRASTRUCTURE)


@dataclass(frozen=True)
class CostSchedule:
    name: str
    table: Mapping[tuple[FeatureGroup, int, int], Cost]

    def __post_init__(self):
        for group in _GROUP_ORDER:
            for source, target in TRANSITIONS:
                if (group, source, target) not in self.table:
                    raise ScheduleError(
                        f"schedule {self.name!r} misses entry "
                        f"({group.value}, {source} -> {target})"
                    )

    def entry(self, group: FeatureGroup, source: int, target: int) -> Cost:
        return self.table[(group, source, target)]

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "costs": {}}
        for group in _GROUP_ORDER:
            out["costs"][group.value] = {
                f"{s}->{t}": cost_to_json(self.entry(group, s, t)) for s, t in TRANSITIONS
            }
        return out


def triangle_holds(schedule: CostSchedule) -> bool:
    for group in _GROUP_ORDER:
        direct = schedule.entry(group, -1, 1)
        via = schedule.entry(group, -1, 0) + schedule.entry(group, 0, 1)
        if direct > via:
            return False
    return True


def group_ordering_holds(schedule: CostSchedule) -> bool:
    """True when same-transition costs rise strictly surface < semi < infra."""
    for source, target in TRANSITIONS:
        costs = [schedule.entry(g, source, target) for g in _GROUP_ORDER]
        for cheap, dear in zip(costs, costs[1:]):
            if is_finite(cheap) and is_finite(dear) and not cheap < dear:
                return False
            if is_infinite(cheap) and is_finite(dear):
                return False
    return True


def validate_schedule(schedule: CostSchedule) -> CostSchedule:
    """Gate applied to every loaded schedule: triangle is fatal, ordering warns."""
    if not triangle_holds(schedule):
        raise ScheduleError(
            f"schedule {schedule.name!r}: a direct -1->1 cost exceeds its two-step "
            f"path, which breaks the direct-transition optimality this toolkit "
            f"assumes for loaded schedules"
        )
    if not group_ordering_holds(schedule):
        warnings.warn(
            f"schedule {schedule.name!r} breaks the surface < semi_domain < "
            f"infrastructure cost ordering",
            stacklevel=2,
        )
    return schedule


def schedule_from_dict(data: dict) -> CostSchedule:
    name = str(data.get("name", "derived"))
    costs = data.get("costs")
    if not isinstance(costs, dict):
        raise ScheduleError(f"schedule {name!r}: missing 'costs' section")
    table: dict[tuple[FeatureGroup, int, int], Cost] = {}
    for group_name, row in costs.items():
        group = FeatureGroup.parse(group_name)
        for key, value in row.items():
            source_s, _, target_s = key.replace(" ", "").partition("->")
            table[(group, int(source_s), int(target_s))] = as_cost(value)
    return validate_schedule(CostSchedule(name, table))


def load_schedule(path: str) -> CostSchedule:
    with open(path, "r", encoding="utf-8") as fh:
        return schedule_from_dict(yaml.safe_load(fh))


def save_schedule(schedule: CostSchedule, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(schedule.to_dict(), fh, sort_keys=False)


def builtin_schedule(name: str) -> CostSchedule:
    """Load one of the shipped schedules ("base" or "strict")."""
    if name not in ("base", "strict"):
        raise ScheduleError(f"no built-in schedule named {name!r}")
    text = resources.files("mecbench.data").joinpath(f"schedule_{name}.yaml").read_text()
    return schedule_from_dict(yaml.safe_load(text))


def transition_cost(
    schedule: CostSchedule, schema: FeatureSchema, j: int, source: int, target: int
) -> Cost:
    """Cost of editing coordinate j from source to target; reverse and identity are infinite."""
    if target <= source:
        return INFINITE
    return schedule.entry(schema.group_of(j), source, target)


def cumulative_cost(
    schedule: CostSchedule, schema: FeatureSchema, x: FeatureVector, y: FeatureVector
) -> Cost:
    """Sum of direct per-coordinate transition costs from x to y.

    Infinite when y is not coordinate-wise >= x (monotone reachability fails)
    or any needed transition is forbidden.
    """
    if x.schema is not y.schema and x.schema != y.schema:
        raise SchemaMismatch("cumulative_cost: vectors bound to different schemas")
    total: Cost = Fraction(0)
    for j, (a, b) in enumerate(zip(x.values, y.values)):
        if b < a:
            return INFINITE
        if b > a:
            total = total + schedule.entry(schema.group_of(j), a, b)
            if is_infinite(total):
                return INFINITE
    return total


def min_transition_cost(schedule: CostSchedule, schema: FeatureSchema) -> Cost:
    """Cheapest finite single-coordinate transition admissible under the schema."""
    best: Cost = INFINITE
    for feature in schema.features:
        for source in feature.admissible:
            for target in feature.admissible:
                if target > source:
                    c = schedule.entry(feature.group, source, target)
                    if c < best:
                        best = c
    return best


# ---------------------------------------------------------------------------
# Perturbations


@dataclass(frozen=True)
class ScaleGroup:
    group: FeatureGroup
    factor: Fraction

    def __post_init__(self):
        if self.factor <= 0:
            raise ScheduleError(f"scale factor must be positive, got {self.factor}")


@dataclass(frozen=True)
class ReclassifyFeature:
    feature: str
    new_group: FeatureGroup


@dataclass(frozen=True)
class RankPreservingNoise:
    """Per-cell multiplicative factors on the 1/100 grid within [lower, upper].

    Factors attach to (group, transition) cells, not to individual features,
    so the group structure survives. A full 9-cell draw is repeated until the
    cross-group cost ordering holds, keeping the perturbation rank-preserving
    by construction; the redraw loop is deterministic under the seed.
    """

    seed: int
    lower: Fraction = Fraction(4, 5)
    upper: Fraction = Fraction(6, 5)

    def __post_init__(self):
        if not 0 < self.lower <= self.upper:
            raise ScheduleError("noise factors must satisfy 0 < lower <= upper")


CostPerturbation = Union[ScaleGroup, ReclassifyFeature, RankPreservingNoise]


def apply_perturbation(
    schedule: CostSchedule, schema: FeatureSchema, perturbation: CostPerturbation
) -> tuple[CostSchedule, FeatureSchema]:
    """Perturbed (schedule, schema); inputs are never mutated."""
    if isinstance(perturbation, ScaleGroup):
        table = dict(schedule.table)
        for source, target in TRANSITIONS:
            key = (perturbation.group, source, target)
            if is_finite(table[key]):
                table[key] = table[key] * perturbation.factor
        name = f"{schedule.name}*scale({perturbation.group.value},{perturbation.factor})"
        scaled = CostSchedule(name, table)
        if not group_ordering_holds(scaled):
            warnings.warn(
                f"scaling {perturbation.group.value} by {perturbation.factor} breaks "
                f"the cross-group cost ordering",
                stacklevel=2,
            )
        return scaled, schema

    if isinstance(perturbation, ReclassifyFeature):
        if perturbation.feature not in schema.names:
            raise UnknownFeature(perturbation.feature)
        return schedule, schema.with_group(perturbation.feature, perturbation.new_group)

    if isinstance(perturbation, RankPreservingNoise):
        rng = SplitMix64(perturbation.seed)
        while True:
            table = dict(schedule.table)
            for group in _GROUP_ORDER:
                for source, target in TRANSITIONS:
                    key = (group, source, target)
                    if is_finite(table[key]):
                        factor = rng.fraction_on_grid(perturbation.lower, perturbation.upper)
                        table[key] = table[key] * factor
            noisy = CostSchedule(f"{schedule.name}*noise({perturbation.seed})", table)
            if group_ordering_holds(noisy):
                return noisy, schema

    raise ScheduleError(f"unknown perturbation {perturbation!r}")
