"""Random forest: bootstrap-sampled Gini trees with sqrt-feature subsampling.

Each tree draws its bootstrap rows and per-node feature subsets from an
independent pinned stream derived from (spec.seed, tree index), consumed
in depth-first node order, so refits reproduce the ensemble exactly.
The forest probability is the plain average of leaf class fractions.
"""

from __future__ import annotations

import math

import numpy as np

from ..dataset import LabeledDataset
from ..rng import SplitMix64, derive_seed
from ..schema import FeatureSchema
from .common import ModelSpec, TrainedModel, require_both_classes
from .trees import PackedEnsemble, Tree, grow_classification_tree


class ForestModel(TrainedModel):
    def __init__(self, spec: ModelSpec, schema: FeatureSchema, trees: list[Tree]):
        super().__init__(spec, schema)
        self.trees = trees
        self._packed = PackedEnsemble(trees)

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return self._packed.leaf_values_batch(X).mean(axis=1)

    def predict_proba(self, X):
        arr = np.asarray(X)
        if arr.ndim == 1:
            return float(self._packed.leaf_values_single(arr).mean())
        return self._proba(arr)

    def payload(self) -> dict:
        return {"trees": [t.to_lists() for t in self.trees]}

    @classmethod
    def from_payload(cls, spec: ModelSpec, schema: FeatureSchema, payload: dict) -> "ForestModel":
        return cls(spec, schema, [Tree.from_lists(t) for t in payload["trees"]])


def train_forest(spec: ModelSpec, ds: LabeledDataset) -> ForestModel:
    y01 = require_both_classes(ds)
    d = ds.schema.d
    n = ds.n
    n_sub = max(1, int(math.sqrt(d)))
    trees = []
    for t in range(spec.n_trees):
        rng = SplitMix64(derive_seed(spec.seed, "forest-tree", t))
        rows = np.array(rng.indices_with_replacement(n, n), dtype=np.int64)

        # Feature subsets are drawn lazily, one per node, in DFS order.
        def sampler():
            return rng.sample_without_replacement(range(d), n_sub)

        trees.append(
            grow_classification_tree(ds.X, y01, rows, spec.max_depth, sampler)
        )
    return ForestModel(spec, ds.schema, trees)
