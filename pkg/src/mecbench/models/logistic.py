"""L2-regularized logistic regression via full-batch Newton iterations.

Minimizes sum of log-losses plus ||w||^2 / (2C) with an unpenalized
intercept, iterating

    w <- w - (X' W X + R)^{-1} (X'(p - y) + R w),      W = diag(p (1 - p)),

until the step's max-norm falls below 1e-10 (or 100 iterations). The
data is discrete and bounded, so no feature scaling is involved and the
fit is a pure function of (spec, data).
"""

from __future__ import annotations

import numpy as np

from ..dataset import LabeledDataset
from ..schema import FeatureSchema
from .common import ModelSpec, TrainedModel, require_both_classes

_TOL = 1e-10
_MAX_ITER = 100


class LogisticModel(TrainedModel):
    def __init__(self, spec: ModelSpec, schema: FeatureSchema, weights: np.ndarray, intercept: float):
        super().__init__(spec, schema)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.intercept = float(intercept)

    def _proba(self, X: np.ndarray) -> np.ndarray:
        z = X.astype(np.float64) @ self.weights + self.intercept
        return _sigmoid(z)

    def payload(self) -> dict:
        return {"weights": self.weights.tolist(), "intercept": self.intercept}

    @classmethod
    def from_payload(cls, spec: ModelSpec, schema: FeatureSchema, payload: dict) -> "LogisticModel":
        return cls(spec, schema, np.array(payload["weights"]), payload["intercept"])


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_logistic(spec: ModelSpec, ds: LabeledDataset) -> LogisticModel:
    y = require_both_classes(ds).astype(np.float64)
    X = np.hstack([ds.X.astype(np.float64), np.ones((ds.n, 1))])
    d = ds.schema.d
    reg = np.zeros(d + 1)
    reg[:d] = 1.0 / spec.l2_c
    beta = np.zeros(d + 1)
    for _ in range(_MAX_ITER):
        p = _sigmoid(X @ beta)
        w = np.maximum(p * (1.0 - p), 1e-12)
        hessian = (X.T * w) @ X + np.diag(reg)
        grad = X.T @ (p - y) + reg * beta
        step = np.linalg.solve(hessian, grad)
        beta = beta - step
        if np.max(np.abs(step)) < _TOL:
            break
    return LogisticModel(spec, ds.schema, beta[:d], beta[d])
