"""One-vs-rest multiclass SVM with min/max feature scaling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ClassSetMismatch, DegenerateLabels, NoEvidence, ShapeError
from .svm import Kernel, SvmBinaryModel, smo_solve


@dataclass(frozen=True)
class ScoreVector:
    class_ids: tuple
    scores: np.ndarray
    calibrated: bool = False

    def argmax(self) -> str:
        return best_class(self.class_ids, self.scores)


def best_class(class_ids, scores) -> str:
    """Class with the largest score; ties go to the lowest class id."""
    top = np.max(scores)
    return min(c for c, s in zip(class_ids, scores) if s == top)


def softmax(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    e = np.exp(v - v.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class MinMaxScaler:
    low: np.ndarray
    high: np.ndarray

    @classmethod
    def fit(cls, X) -> "MinMaxScaler":
        X = np.asarray(X, dtype=np.float64)
        return cls(X.min(axis=0), X.max(axis=0))

    def transform(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.low.shape[0]:
            raise ShapeError(f"expected {self.low.shape[0]} features, got {X.shape[1]}")
        span = self.high - self.low
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (X - self.low) / safe, 0.0)


@dataclass
class MulticlassModel:
    class_ids: tuple
    models: list  # SvmBinaryModel per class, same order as class_ids
    scaler: MinMaxScaler

    @property
    def dim(self) -> int:
        return self.scaler.low.shape[0]

    def decision_values(self, X) -> np.ndarray:
        """Raw one-vs-rest decision values, shape (n_instances, n_classes)."""
        Z = self.scaler.transform(X)
        return np.stack([m.decision_function(Z) for m in self.models], axis=1)

    def predict_scores(self, x) -> ScoreVector:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise ShapeError("predict_scores takes a single instance vector")
        return ScoreVector(self.class_ids, softmax(self.decision_values(x[None, :])[0]), True)

    def predict_many(self, X) -> list[ScoreVector]:
        probs = softmax(self.decision_values(X))
        return [ScoreVector(self.class_ids, p, True) for p in probs]

    def predict(self, X) -> list[str]:
        return [best_class(self.class_ids, row) for row in self.decision_values(X)]


def train_multiclass(X, labels, C: float = 1.0, kernel: Kernel | None = None,
                     tol: float = 1e-3, scaled_gram: np.ndarray | None = None
                     ) -> MulticlassModel:
    """Fit the scaler and one binary SVM per class (class vs everything else).

    All binary problems share one kernel matrix over the scaled data.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray([str(v) for v in labels])
    if X.ndim != 2 or X.shape[0] != labels.shape[0]:
        raise ShapeError("instances and labels disagree in length")
    class_ids = tuple(sorted(set(labels.tolist())))
    if len(class_ids) < 2:
        raise DegenerateLabels("need at least two classes")
    kernel = kernel or Kernel()
    scaler = MinMaxScaler.fit(X)
    Z = scaler.transform(X)
    gram = kernel(Z, Z) if scaled_gram is None else scaled_gram
    models = []
    for cid in class_ids:
        y = np.where(labels == cid, 1.0, -1.0)
        res = smo_solve(gram, y, C, tol)
        sv = res.alpha > 0
        models.append(SvmBinaryModel(Z[sv].copy(), res.alpha[sv].copy(), y[sv].copy(),
                                     res.bias, kernel, cid, C))
    return MulticlassModel(class_ids, models, scaler)


def sum_rule_fuse(scores) -> tuple[ScoreVector, str]:
    """Add per-class scores over all inputs and pick the best class.

    Sums use math.fsum, which is correctly rounded, so the fused vector does
    not depend on input order.
    """
    scores = list(scores)
    if not scores:
        raise NoEvidence("nothing to fuse")
    ids = scores[0].class_ids
    for s in scores[1:]:
        if tuple(s.class_ids) != tuple(ids):
            raise ClassSetMismatch("score vectors disagree on class ids or their order")
    stacked = np.stack([np.asarray(s.scores, dtype=np.float64) for s in scores])
    fused = np.array([math.fsum(stacked[:, k]) for k in range(stacked.shape[1])])
    out = ScoreVector(tuple(ids), fused, calibrated=False)
    return out, out.argmax()
