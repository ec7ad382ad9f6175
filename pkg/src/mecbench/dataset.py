"""Dataset loading, stratified splitting, and conditioning-set construction.

Input is a UTF-8 CSV with a header row; one column (default "Result")
carries labels in {-1, +1} (-1 phishing, +1 legitimate) and every other
column is a feature with values in {-1, 0, +1}. Admissible value sets are
recorded per column at load time, so downstream search never fabricates
states the extractor cannot produce.

The split shuffles each class with the package's pinned generator
(rng.SplitMix64) and apportions per-class test counts by largest
remainder against a round-half-up total, which reproduces the reference
counts (2,764 test / 1,225 phishing on the canonical 11,055-instance
file) for any compatible fraction.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateData,
    InsufficientIntersection,
    LabelDomainError,
    MecbenchError,
    ParseError,
)
from .rng import SplitMix64, derive_seed
from .schema import (
    FeatureGroup,
    FeatureSchema,
    FeatureSetConfig,
    FeatureVector,
    build_schema,
    project_columns,
    restrict,
)

PHISHING = -1
LEGITIMATE = 1


@dataclass(frozen=True)
class LabeledDataset:
    X: np.ndarray  # (n, d) int8
    y: np.ndarray  # (n,) int8 in {-1, +1}
    schema: FeatureSchema

    def __post_init__(self):
        if len(self.X) != len(self.y):
            raise MecbenchError("instance/label count mismatch")
        if self.X.shape[1] != self.schema.d:
            raise MecbenchError("column count differs from schema dimension")

    @property
    def n(self) -> int:
        return len(self.y)

    def class_counts(self) -> tuple[int, int]:
        """(phishing, legitimate) counts."""
        return int(np.sum(self.y == PHISHING)), int(np.sum(self.y == LEGITIMATE))

    def vector(self, i: int) -> FeatureVector:
        return FeatureVector(tuple(int(v) for v in self.X[i]), self.schema)

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.X[idx], self.y[idx], self.schema)

    def project(self, cfg: FeatureSetConfig) -> "LabeledDataset":
        cols = project_columns(self.schema, cfg)
        return LabeledDataset(
            np.ascontiguousarray(self.X[:, cols]), self.y, restrict(self.schema, cfg)
        )


def load_dataset(
    path: str,
    group_map: dict[str, FeatureGroup],
    label_column: str = "Result",
    strict: bool = True,
) -> LabeledDataset:
    """Parse a feature CSV; in strict mode out-of-domain values are fatal.

    With ``strict=False`` rows holding feature values outside {-1, 0, +1}
    are dropped (with a warning) instead; labels outside {-1, +1} are fatal
    either way, since no salvage rule exists for them.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ParseError(f"label column {label_column!r} not in header")
        label_idx = header.index(label_column)
        names = [h for i, h in enumerate(header) if i != label_idx]
        rows: list[list[int]] = []
        labels: list[int] = []
        dropped = 0
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, got {len(row)}", row=rownum
                )
            try:
                parsed = [int(cell) for cell in row]
            except ValueError:
                bad = next(i for i, cell in enumerate(row) if not _is_int(cell))
                raise ParseError(
                    f"non-integer value {row[bad]!r}", row=rownum, column=header[bad]
                ) from None
            label = parsed[label_idx]
            if label not in (PHISHING, LEGITIMATE):
                raise LabelDomainError(f"label {label} at row {rownum} not in {{-1, +1}}")
            feats = [v for i, v in enumerate(parsed) if i != label_idx]
            bad_j = next((j for j, v in enumerate(feats) if v not in (-1, 0, 1)), None)
            if bad_j is not None:
                if strict:
                    raise ParseError(
                        f"feature value {feats[bad_j]} outside {{-1, 0, +1}}",
                        row=rownum,
                        column=names[bad_j],
                    )
                dropped += 1
                continue
            rows.append(feats)
            labels.append(label)
    if dropped:
        warnings.warn(f"dropped {dropped} rows with out-of-domain feature values")
    if not rows:
        raise ParseError("no usable data rows")
    X = np.array(rows, dtype=np.int8)
    y = np.array(labels, dtype=np.int8)
    admissible = [tuple(sorted(int(v) for v in np.unique(X[:, j]))) for j in range(X.shape[1])]
    schema = build_schema(names, admissible, group_map)
    return LabeledDataset(X, y, schema)


def _is_int(cell: str) -> bool:
    try:
        int(cell)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# Splitting


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: Fraction = Fraction(1, 4)
    seed: int = 1337
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise MecbenchError("test_fraction must lie strictly between 0 and 1")


def _round_half_up(x: Fraction) -> int:
    return int(x + Fraction(1, 2)) if x >= 0 else -int(-x + Fraction(1, 2))


def _apportion_test_counts(class_sizes: dict[int, int], fraction: Fraction) -> dict[int, int]:
    """Largest-remainder apportionment of the (rounded) total test size."""
    total_target = _round_half_up(sum(class_sizes.values()) * fraction)
    base = {c: int(size * fraction) for c, size in class_sizes.items()}
    leftover = total_target - sum(base.values())
    order = sorted(
        class_sizes,
        key=lambda c: (class_sizes[c] * fraction - base[c], class_sizes[c], -c),
        reverse=True,
    )
    counts = dict(base)
    for c in order[:leftover]:
        counts[c] += 1
    return counts


def split_indices(ds: LabeledDataset, spec: SplitSpec) -> tuple[list[int], list[int]]:
    """Deterministic (train, test) index partition, ascending within each side."""
    labels = sorted(set(int(v) for v in ds.y))
    if spec.stratified:
        groups = {c: [int(i) for i in np.flatnonzero(ds.y == c)] for c in labels}
    else:
        groups = {0: list(range(ds.n))}
    counts = _apportion_test_counts({c: len(ix) for c, ix in groups.items()}, spec.test_fraction)
    test: list[int] = []
    for c, indices in groups.items():
        pool = list(indices)
        SplitMix64(derive_seed(spec.seed, "split", c)).shuffle(pool)
        test.extend(pool[: counts[c]])
    test_set = set(test)
    train = [i for i in range(ds.n) if i not in test_set]
    return train, sorted(test)


def stratified_split(ds: LabeledDataset, spec: SplitSpec) -> tuple[LabeledDataset, LabeledDataset]:
    if ds.n == 0 or (spec.stratified and len(set(int(v) for v in ds.y)) < 2):
        raise DegenerateData("stratified split needs both classes")
    train_idx, test_idx = split_indices(ds, spec)
    return ds.subset(train_idx), ds.subset(test_idx)


def save_split_manifest(path: str, spec: SplitSpec, train_idx: list[int], test_idx: list[int]) -> None:
    payload = {
        "seed": spec.seed,
        "test_fraction": str(spec.test_fraction),
        "stratified": spec.stratified,
        "train_indices": train_idx,
        "test_indices": test_idx,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, separators=(",", ":"))
        fh.write("\n")


# ---------------------------------------------------------------------------
# Conditioning


@dataclass(frozen=True)
class ConditioningSet:
    """Phishing test instances the model correctly flags; robustness population."""

    indices: tuple[int, ...]  # positions within the test set
    model_key: str

    def validate(self, model, test: LabeledDataset) -> None:
        for i in self.indices:
            if int(test.y[i]) != PHISHING:
                raise MecbenchError(f"conditioning member {i} is not phishing-labeled")
            if int(model.predict(test.X[i])) != PHISHING:
                raise MecbenchError(f"conditioning member {i} is not classified phishing")


def conditioning_set(model, test: LabeledDataset, model_key: str = "") -> ConditioningSet:
    preds = model.predict(test.X)
    members = np.flatnonzero((test.y == PHISHING) & (preds == PHISHING))
    return ConditioningSet(tuple(int(i) for i in members), model_key or model.family)


def intersection_sample(
    sets: Sequence[ConditioningSet], n: int, seed: int
) -> list[int]:
    """Uniform without-replacement sample from the intersection of all sets."""
    if not sets:
        raise InsufficientIntersection(0, n)
    common = set(sets[0].indices)
    for s in sets[1:]:
        common &= set(s.indices)
    if len(common) < n:
        raise InsufficientIntersection(len(common), n)
    rng = SplitMix64(derive_seed(seed, "intersection-sample"))
    return sorted(rng.sample_without_replacement(sorted(common), n))
