"""Axis-aligned decision trees over ternary features, packed for fast inference.

Features take at most three values, so a node has at most two useful
thresholds (-0.5 and 0.5) and split search reduces to three-bin counting.
Fitted trees are packed into rectangular arrays; inference walks all
trees of an ensemble in lockstep with vectorized level-by-level descent,
which keeps single-instance prediction cheap inside the search loop.

Tie-breaking is pinned everywhere: candidate features are scanned in
ascending index order, thresholds in ascending order, and only a strict
improvement replaces the incumbent, so equal-gain ties resolve toward
the lowest feature index and threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

# A split candidate partitions the three bins (-1 | 0, 1) or (-1, 0 | 1).
_THRESHOLDS = (-0.5, 0.5)

_MIN_GAIN = 1e-12  # float dust guard; keeps pure nodes from splitting


class _TreeBuilder:
    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add_leaf(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(float(value))
        return len(self.feature) - 1

    def add_internal(self, feature: int, threshold: float) -> int:
        self.feature.append(int(feature))
        self.threshold.append(float(threshold))
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @classmethod
    def from_builder(cls, b: _TreeBuilder) -> "Tree":
        return cls(
            np.array(b.feature, dtype=np.int32),
            np.array(b.threshold, dtype=np.float64),
            np.array(b.left, dtype=np.int32),
            np.array(b.right, dtype=np.int32),
            np.array(b.value, dtype=np.float64),
        )

    def to_lists(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_lists(cls, data: dict) -> "Tree":
        return cls(
            np.array(data["feature"], dtype=np.int32),
            np.array(data["threshold"], dtype=np.float64),
            np.array(data["left"], dtype=np.int32),
            np.array(data["right"], dtype=np.int32),
            np.array(data["value"], dtype=np.float64),
        )


class PackedEnsemble:
    """Rectangular copy of an ensemble for lockstep traversal."""

    def __init__(self, trees: Sequence[Tree]):
        self.n_trees = len(trees)
        width = max(len(t.feature) for t in trees)
        shape = (self.n_trees, width)
        self.feature = np.full(shape, -1, dtype=np.int32)
        self.threshold = np.zeros(shape, dtype=np.float64)
        self.left = np.zeros(shape, dtype=np.int32)
        self.right = np.zeros(shape, dtype=np.int32)
        self.value = np.zeros(shape, dtype=np.float64)
        for i, t in enumerate(trees):
            k = len(t.feature)
            self.feature[i, :k] = t.feature
            self.threshold[i, :k] = t.threshold
            self.left[i, :k] = t.left
            self.right[i, :k] = t.right
            self.value[i, :k] = t.value
        self._tree_ids = np.arange(self.n_trees)

    def leaf_values_single(self, x: np.ndarray) -> np.ndarray:
        """Leaf payload of every tree for one instance; shape (n_trees,)."""
        t = self._tree_ids
        cur = np.zeros(self.n_trees, dtype=np.int32)
        while True:
            f = self.feature[t, cur]
            internal = f >= 0
            if not internal.any():
                return self.value[t, cur]
            xv = x[np.where(internal, f, 0)]
            go_left = xv <= self.threshold[t, cur]
            nxt = np.where(go_left, self.left[t, cur], self.right[t, cur])
            cur = np.where(internal, nxt, cur)

    def leaf_values_batch(self, X: np.ndarray) -> np.ndarray:
        """Leaf payloads for a matrix of instances; shape (n, n_trees)."""
        n = X.shape[0]
        rows = np.arange(n)
        out = np.empty((n, self.n_trees), dtype=np.float64)
        for ti in range(self.n_trees):
            cur = np.zeros(n, dtype=np.int32)
            while True:
                f = self.feature[ti, cur]
                internal = f >= 0
                if not internal.any():
                    break
                xv = X[rows, np.where(internal, f, 0)]
                go_left = xv <= self.threshold[ti, cur]
                nxt = np.where(go_left, self.left[ti, cur], self.right[ti, cur])
                cur = np.where(internal, nxt, cur)
            out[:, ti] = self.value[ti, cur]
        return out


# ---------------------------------------------------------------------------
# Growing


def _bin_index(column: np.ndarray) -> np.ndarray:
    return column.astype(np.int64) + 1  # -1,0,1 -> 0,1,2


def grow_classification_tree(
    X: np.ndarray,
    y01: np.ndarray,
    rows: np.ndarray,
    max_depth: int,
    feature_sampler: Optional[Callable[[], Sequence[int]]] = None,
) -> Tree:
    """CART with Gini impurity; leaves store the class-1 fraction."""
    d = X.shape[1]
    builder = _TreeBuilder()

    def leaf(idx: np.ndarray) -> int:
        return builder.add_leaf(float(y01[idx].mean()))

    def grow(idx: np.ndarray, depth: int) -> int:
        n = len(idx)
        ones = int(y01[idx].sum())
        if depth >= max_depth or n < 2 or ones == 0 or ones == n:
            return leaf(idx)
        feats = sorted(feature_sampler()) if feature_sampler is not None else range(d)
        parent = _gini(n - ones, ones)
        best_gain, best_f, best_thr = _MIN_GAIN, -1, 0.0
        for f in feats:
            counts = np.bincount(
                _bin_index(X[idx, f]) * 2 + y01[idx], minlength=6
            ).reshape(3, 2)
            for cut, thr in enumerate(_THRESHOLDS):
                l0 = int(counts[: cut + 1, 0].sum())
                l1 = int(counts[: cut + 1, 1].sum())
                r0, r1 = (n - ones) - l0, ones - l1
                nl, nr = l0 + l1, r0 + r1
                if nl == 0 or nr == 0:
                    continue
                gain = parent - (nl / n) * _gini(l0, l1) - (nr / n) * _gini(r0, r1)
                if gain > best_gain:
                    best_gain, best_f, best_thr = gain, f, thr
        if best_f < 0:
            return leaf(idx)
        node = builder.add_internal(best_f, best_thr)
        mask = X[idx, best_f] <= best_thr
        builder.left[node] = grow(idx[mask], depth + 1)
        builder.right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(rows, 0)
    return Tree.from_builder(builder)


def _gini(c0: int, c1: int) -> float:
    n = c0 + c1
    if n == 0:
        return 0.0
    p0 = c0 / n
    p1 = c1 / n
    return 1.0 - p0 * p0 - p1 * p1


def grow_regression_tree(
    X: np.ndarray,
    residual: np.ndarray,
    hessian: np.ndarray,
    rows: np.ndarray,
    max_depth: int,
) -> Tree:
    """Least-squares structure on the residual; leaves take one Newton step
    (residual sum over curvature sum)."""
    d = X.shape[1]
    builder = _TreeBuilder()

    def leaf(idx: np.ndarray) -> int:
        denom = float(hessian[idx].sum())
        return builder.add_leaf(float(residual[idx].sum()) / max(denom, 1e-12))

    def grow(idx: np.ndarray, depth: int) -> int:
        n = len(idx)
        if depth >= max_depth or n < 2:
            return leaf(idx)
        total = float(residual[idx].sum())
        parent_score = total * total / n
        best_gain, best_f, best_thr = _MIN_GAIN, -1, 0.0
        for f in range(d):
            bins = _bin_index(X[idx, f])
            s = np.bincount(bins, weights=residual[idx], minlength=3)
            c = np.bincount(bins, minlength=3)
            for cut, thr in enumerate(_THRESHOLDS):
                nl = int(c[: cut + 1].sum())
                nr = n - nl
                if nl == 0 or nr == 0:
                    continue
                sl = float(s[: cut + 1].sum())
                sr = total - sl
                gain = sl * sl / nl + sr * sr / nr - parent_score
                if gain > best_gain:
                    best_gain, best_f, best_thr = gain, f, thr
        if best_f < 0:
            return leaf(idx)
        node = builder.add_internal(best_f, best_thr)
        mask = X[idx, best_f] <= best_thr
        builder.left[node] = grow(idx[mask], depth + 1)
        builder.right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(rows, 0)
    return Tree.from_builder(builder)


def grow_newton_tree(
    X: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    rows: np.ndarray,
    max_depth: int,
    leaf_l2: float,
) -> Tree:
    """Second-order tree: split gain and leaf weights from (gradient, curvature)
    sums with L2 leaf regularization."""
    d = X.shape[1]
    builder = _TreeBuilder()

    def score(g: float, h: float) -> float:
        return g * g / (h + leaf_l2)

    def leaf(idx: np.ndarray) -> int:
        g = float(grad[idx].sum())
        h = float(hess[idx].sum())
        return builder.add_leaf(-g / (h + leaf_l2))

    def grow(idx: np.ndarray, depth: int) -> int:
        n = len(idx)
        if depth >= max_depth or n < 2:
            return leaf(idx)
        g_total = float(grad[idx].sum())
        h_total = float(hess[idx].sum())
        parent_score = score(g_total, h_total)
        best_gain, best_f, best_thr = _MIN_GAIN, -1, 0.0
        for f in range(d):
            bins = _bin_index(X[idx, f])
            gs = np.bincount(bins, weights=grad[idx], minlength=3)
            hs = np.bincount(bins, weights=hess[idx], minlength=3)
            cs = np.bincount(bins, minlength=3)
            for cut, thr in enumerate(_THRESHOLDS):
                nl = int(cs[: cut + 1].sum())
                if nl == 0 or nl == n:
                    continue
                gl = float(gs[: cut + 1].sum())
                hl = float(hs[: cut + 1].sum())
                gain = 0.5 * (score(gl, hl) + score(g_total - gl, h_total - hl) - parent_score)
                if gain > best_gain:
                    best_gain, best_f, best_thr = gain, f, thr
        if best_f < 0:
            return leaf(idx)
        node = builder.add_internal(best_f, best_thr)
        mask = X[idx, best_f] <= best_thr
        builder.left[node] = grow(idx[mask], depth + 1)
        builder.right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(rows, 0)
    return Tree.from_builder(builder)
