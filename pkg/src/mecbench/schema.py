"""Ternary feature space: schemas, vectors, groups, and monotone edits.

Feature values live in {-1, 0, +1} (phishing-indicative / neutral /
legitimate). An edit moves a single coordinate strictly upward under
-1 < 0 < +1 and must land inside that coordinate's admissible set;
reverse and identity moves are never admissible. Schemas are immutable
and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import hashlib
import json

import numpy as np

from .errors import InadmissibleValue, LengthMismatch, MecbenchError, UnknownFeature

VALUE_DOMAIN = (-1, 0, 1)


class FeatureGroup(Enum):
    SURFACE = "surface"
    SEMI_DOMAIN = "semi_domain"
    INFRASTRUCTURE = "infrastructure"

    @classmethod
    def parse(cls, text: str) -> "FeatureGroup":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise MecbenchError(f"unknown feature group {text!r}") from None


@dataclass(frozen=True)
class Feature:
    name: str
    group: FeatureGroup
    admissible: tuple[int, ...]  # sorted nonempty subset of (-1, 0, 1)

    def __post_init__(self):
        values = tuple(sorted(set(self.admissible)))
        if not values or any(v not in VALUE_DOMAIN for v in values):
            raise MecbenchError(
                f"feature {self.name!r}: admissible set {self.admissible} "
                f"must be a nonempty subset of {VALUE_DOMAIN}"
            )
        object.__setattr__(self, "admissible", values)


class Edit(NamedTuple):
    """Single upward move of coordinate ``j`` from ``source`` to ``target``."""

    j: int
    source: int
    target: int


@dataclass(frozen=True)
class FeatureSchema:
    features: tuple[Feature, ...]

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise MecbenchError(f"duplicate feature names: {dupes}")
        object.__setattr__(self, "_index", {f.name: i for i, f in enumerate(self.features)})

    @property
    def d(self) -> int:
        return len(self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownFeature(name) from None

    def group_of(self, j: int) -> FeatureGroup:
        return self.features[j].group

    def with_group(self, name: str, group: FeatureGroup) -> "FeatureSchema":
        """Copy of the schema with one feature reassigned to another group."""
        j = self.index_of(name)
        feats = list(self.features)
        feats[j] = Feature(name, group, feats[j].admissible)
        return FeatureSchema(tuple(feats))

    def content_hash(self) -> str:
        payload = json.dumps(
            [[f.name, f.group.value, list(f.admissible)] for f in self.features],
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class FeatureVector:
    """Length-d point of the lattice, bound to its schema."""

    values: tuple[int, ...]
    schema: FeatureSchema


BUILTIN_SET_ARITY = {
    "Full": 30,
    "AAS-12a": 12,
    "AAS-11b": 11,
    "RA-8": 8,
    "VA-8a": 8,
    "VA-7b": 7,
}

SSL_FEATURE = "SSLfinal_State"


@dataclass(frozen=True)
class FeatureSetConfig:
    """Named, ordered feature subset. Built-in names carry fixed arities."""

    name: str
    members: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise MecbenchError(f"feature set {self.name!r} has duplicate members")
        arity = BUILTIN_SET_ARITY.get(self.name)
        if arity is not None and len(self.members) != arity:
            raise MecbenchError(
                f"built-in set {self.name!r} must have {arity} members, got {len(self.members)}"
            )
        if self.name == "RA-8" and SSL_FEATURE not in self.members:
            raise MecbenchError(f"built-in set RA-8 must contain {SSL_FEATURE}")


def validate_vector(schema: FeatureSchema, raw: Sequence[int]) -> FeatureVector:
    """Check length and per-coordinate admissibility; bind to the schema."""
    raw = tuple(int(v) for v in raw)
    if len(raw) != schema.d:
        raise LengthMismatch(schema.d, len(raw))
    for j, v in enumerate(raw):
        if v not in schema.features[j].admissible:
            raise InadmissibleValue(j, v, schema.features[j].admissible)
    return FeatureVector(raw, schema)


def admissible_edits(x: FeatureVector) -> list[Edit]:
    """All single-coordinate upward edits, ordered by (j, target)."""
    return admissible_edits_raw(x.schema, x.values)


def admissible_edits_raw(schema: FeatureSchema, values: Sequence[int]) -> list[Edit]:
    edits = []
    for j, v in enumerate(values):
        for target in schema.features[j].admissible:
            if target > v:
                edits.append(Edit(j, v, target))
    return edits


def restrict(schema: FeatureSchema, cfg: FeatureSetConfig) -> FeatureSchema:
    """Schema containing exactly cfg.members, in cfg order, metadata preserved."""
    return FeatureSchema(tuple(schema.features[schema.index_of(m)] for m in cfg.members))


def project_columns(schema: FeatureSchema, cfg: FeatureSetConfig) -> list[int]:
    """Column indices of cfg.members in the base schema (projection map)."""
    return [schema.index_of(m) for m in cfg.members]


def project_vector(x: FeatureVector, cfg: FeatureSetConfig) -> FeatureVector:
    sub = restrict(x.schema, cfg)
    cols = project_columns(x.schema, cfg)
    return FeatureVector(tuple(x.values[c] for c in cols), sub)


def build_schema(
    names: Sequence[str],
    admissible: Sequence[Iterable[int]],
    group_map: dict[str, FeatureGroup],
) -> FeatureSchema:
    """Assemble a schema from column names, observed value sets, and a group map."""
    feats = []
    for name, adm in zip(names, admissible):
        if name not in group_map:
            raise UnknownFeature(name)
        feats.append(Feature(name, group_map[name], tuple(adm)))
    return FeatureSchema(tuple(feats))


def vectors_as_array(vectors: Sequence[FeatureVector]) -> np.ndarray:
    return np.array([v.values for v in vectors], dtype=np.int8)
