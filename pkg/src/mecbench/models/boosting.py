"""Two gradient-boosting configurations sharing the same tree controls.

``gradient_boosting`` is the classic stagewise fit for binary log-loss:
trees are grown by least squares on the residual y - p, each leaf then
takes one Newton step (sum residual / sum p(1-p)), and contributions are
shrunk by the learning rate.

``gradient_boosting_variant`` keeps the controls (100 trees, depth 6,
shrinkage 0.1) but grows trees on second-order statistics: split gains
and leaf weights come from (gradient, curvature) sums with L2 leaf
regularization, and no column subsampling.

Both are seedless: splits are greedy with ties broken toward the lowest
feature index, so the fit is fully determined by the data.
"""

from __future__ import annotations

import math

import numpy as np

from ..dataset import LabeledDataset
from ..schema import FeatureSchema
from .common import ModelSpec, TrainedModel, require_both_classes
from .logistic import _sigmoid
from .trees import PackedEnsemble, Tree, grow_newton_tree, grow_regression_tree


class BoostedModel(TrainedModel):
    def __init__(self, spec: ModelSpec, schema: FeatureSchema, trees: list[Tree], f0: float):
        super().__init__(spec, schema)
        self.trees = trees
        self.f0 = float(f0)
        self._packed = PackedEnsemble(trees)  # leaf values already shrunk

    def _proba(self, X: np.ndarray) -> np.ndarray:
        score = self.f0 + self._packed.leaf_values_batch(X).sum(axis=1)
        return _sigmoid(score)

    def predict_proba(self, X):
        arr = np.asarray(X)
        if arr.ndim == 1:
            score = self.f0 + float(self._packed.leaf_values_single(arr).sum())
            return float(_sigmoid(np.array([score]))[0])
        return self._proba(arr)

    def payload(self) -> dict:
        return {"f0": self.f0, "trees": [t.to_lists() for t in self.trees]}

    @classmethod
    def from_payload(cls, spec: ModelSpec, schema: FeatureSchema, payload: dict) -> "BoostedModel":
        return cls(spec, schema, [Tree.from_lists(t) for t in payload["trees"]], payload["f0"])


def train_boosting(spec: ModelSpec, ds: LabeledDataset) -> BoostedModel:
    y01 = require_both_classes(ds).astype(np.float64)
    newton = spec.family == "gradient_boosting_variant"
    n = ds.n
    rows = np.arange(n, dtype=np.int64)
    prior = float(y01.mean())
    f0 = math.log(prior / (1.0 - prior))
    score = np.full(n, f0, dtype=np.float64)
    trees: list[Tree] = []
    for _ in range(spec.n_trees):
        p = _sigmoid(score)
        if newton:
            tree = grow_newton_tree(ds.X, p - y01, p * (1.0 - p), rows, spec.max_depth, spec.leaf_l2)
        else:
            tree = grow_regression_tree(ds.X, y01 - p, p * (1.0 - p), rows, spec.max_depth)
        tree.value *= spec.learning_rate
        trees.append(tree)
        score += PackedEnsemble([tree]).leaf_values_batch(ds.X)[:, 0]
    return BoostedModel(spec, ds.schema, trees, f0)
