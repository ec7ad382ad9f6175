"""Model specifications, the shared prediction contract, and i.i.d. evaluation.

Every trained model exposes ``predict_proba`` (probability of the
legitimate class, +1) and ``predict`` with the fixed decision rule

    label = +1  iff  predict_proba >= 0.5,

the tie landing on +1 by convention. Models are immutable once fitted and
safe for concurrent prediction. ``train`` is deterministic given (spec,
data): the only randomness is the forest's bootstrap/feature sampling,
driven by the pinned generator seeded from the spec.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..dataset import LEGITIMATE, PHISHING, LabeledDataset
from ..errors import DegenerateData, MecbenchError, SchemaMismatch
from ..schema import FeatureSchema

FAMILIES = (
    "logistic",
    "random_forest",
    "gradient_boosting",
    "gradient_boosting_variant",
)

# CLI / report shorthand.
FAMILY_ALIASES = {
    "logit": "logistic",
    "rf": "random_forest",
    "gbdt": "gradient_boosting",
    "gbdt-variant": "gradient_boosting_variant",
    "variant": "gradient_boosting_variant",
}


def canonical_family(name: str) -> str:
    family = FAMILY_ALIASES.get(name.strip().lower(), name.strip().lower())
    if family not in FAMILIES:
        raise MecbenchError(f"unknown model family {name!r}")
    return family


@dataclass(frozen=True)
class ModelSpec:
    family: str
    seed: int = 0
    l2_c: float = 1.0  # logistic inverse regularization strength
    n_trees: int = 100
    max_depth: int = 0  # 0 -> family default (forest 10, boosting 6)
    learning_rate: float = 0.1
    leaf_l2: float = 1.0  # variant leaf regularization

    def __post_init__(self):
        object.__setattr__(self, "family", canonical_family(self.family))
        if self.max_depth == 0:
            depth = 10 if self.family == "random_forest" else 6
            object.__setattr__(self, "max_depth", depth)
        if self.l2_c <= 0 or self.n_trees <= 0 or self.learning_rate <= 0:
            raise MecbenchError("hyperparameters must be positive")
        if self.max_depth < 1:
            raise MecbenchError("max_depth must be >= 1")
        if self.leaf_l2 < 0:
            raise MecbenchError("leaf_l2 must be nonnegative")


def default_spec(family: str, seed: int = 0) -> ModelSpec:
    return ModelSpec(family=family, seed=seed)


class TrainedModel:
    """Base prediction contract; subclasses fill in ``_proba``."""

    family: str
    spec: ModelSpec
    schema_hash: str

    def __init__(self, spec: ModelSpec, schema: FeatureSchema):
        self.spec = spec
        self.family = spec.family
        self.schema_hash = schema.content_hash()

    def _proba(self, X: np.ndarray) -> np.ndarray:  # (n, d) -> (n,)
        raise NotImplementedError

    def predict_proba(self, X):
        arr = np.asarray(X)
        if arr.ndim == 1:
            return float(self._proba(arr.reshape(1, -1))[0])
        return self._proba(arr)

    def predict(self, X):
        p = self.predict_proba(X)
        if np.isscalar(p):
            return LEGITIMATE if p >= 0.5 else PHISHING
        return np.where(p >= 0.5, LEGITIMATE, PHISHING).astype(np.int8)

    def check_schema(self, schema: FeatureSchema) -> None:
        if schema.content_hash() != self.schema_hash:
            raise SchemaMismatch(
                f"model fitted on schema {self.schema_hash}, got {schema.content_hash()}"
            )

    def payload(self) -> dict:
        raise NotImplementedError


def require_both_classes(ds: LabeledDataset) -> np.ndarray:
    """0/1 target (legitimate=1); rejects single-class data."""
    y01 = (ds.y == LEGITIMATE).astype(np.int64)
    if y01.min() == y01.max():
        raise DegenerateData("training data holds a single class")
    return y01


def train(spec: ModelSpec, ds: LabeledDataset) -> TrainedModel:
    from .boosting import train_boosting
    from .forest import train_forest
    from .logistic import train_logistic

    if ds.n == 0:
        raise DegenerateData("empty training data")
    if spec.family == "logistic":
        return train_logistic(spec, ds)
    if spec.family == "random_forest":
        return train_forest(spec, ds)
    return train_boosting(spec, ds)


# ---------------------------------------------------------------------------
# Held-out evaluation


@dataclass(frozen=True)
class IIDMetrics:
    accuracy: Fraction
    auc: Fraction
    phishing_tpr: Fraction

    def __post_init__(self):
        for v in (self.accuracy, self.auc, self.phishing_tpr):
            if not 0 <= v <= 1:
                raise MecbenchError("metrics must lie in [0, 1]")


def evaluate_iid(model: TrainedModel, test: LabeledDataset) -> IIDMetrics:
    model.check_schema(test.schema)
    n_phish, n_legit = test.class_counts()
    if n_phish == 0 or n_legit == 0:
        raise DegenerateData("evaluation needs both classes")
    preds = model.predict(test.X)
    scores = model.predict_proba(test.X)
    accuracy = Fraction(int(np.sum(preds == test.y)), test.n)
    phish = test.y == PHISHING
    tpr = Fraction(int(np.sum(preds[phish] == PHISHING)), n_phish)
    return IIDMetrics(accuracy, _auc_rank(scores, test.y), tpr)


def _auc_rank(scores: np.ndarray, y: np.ndarray) -> Fraction:
    """Rank-statistic AUC with ties counted one half, in exact arithmetic."""
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = (y[order] == LEGITIMATE)
    n = len(scores)
    n_pos = int(sorted_pos.sum())
    n_neg = n - n_pos
    rank_sum = Fraction(0)
    i = 0
    while i < n:
        k = i
        while k + 1 < n and sorted_scores[k + 1] == sorted_scores[i]:
            k += 1
        avg_rank = Fraction(i + 1 + k + 1, 2)  # 1-based average rank of the tie run
        rank_sum += avg_rank * int(sorted_pos[i : k + 1].sum())
        i = k + 1
    u = rank_sum - Fraction(n_pos * (n_pos + 1), 2)
    return u / (n_pos * n_neg)


# ---------------------------------------------------------------------------
# Persistence

_FORMAT_VERSION = 1


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format_version": _FORMAT_VERSION,
        "family": model.family,
        "schema_hash": model.schema_hash,
        "spec": {
            "family": model.spec.family,
            "seed": model.spec.seed,
            "l2_c": model.spec.l2_c,
            "n_trees": model.spec.n_trees,
            "max_depth": model.spec.max_depth,
            "learning_rate": model.spec.learning_rate,
            "leaf_l2": model.spec.leaf_l2,
        },
        "model": model.payload(),
    }


def model_from_dict(data: dict, schema: FeatureSchema) -> TrainedModel:
    from .boosting import BoostedModel
    from .forest import ForestModel
    from .logistic import LogisticModel

    if data.get("format_version") != _FORMAT_VERSION:
        raise MecbenchError(f"unsupported model format {data.get('format_version')!r}")
    if data["schema_hash"] != schema.content_hash():
        raise SchemaMismatch(
            f"stored model was fitted on schema {data['schema_hash']}, "
            f"current schema is {schema.content_hash()}"
        )
    spec = ModelSpec(**data["spec"])
    loaders = {
        "logistic": LogisticModel.from_payload,
        "random_forest": ForestModel.from_payload,
        "gradient_boosting": BoostedModel.from_payload,
        "gradient_boosting_variant": BoostedModel.from_payload,
    }
    return loaders[spec.family](spec, schema, data["model"])


def save_model(model: TrainedModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, separators=(",", ":"))
        fh.write("\n")


def load_model(path: str, schema: FeatureSchema) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh), schema)
