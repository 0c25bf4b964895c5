"""Binary kernel SVM trained with SMO.

The solver follows the second-order working-set selection of Fan, Chen and
Lin (the LIBSVM scheme): pick the maximal violating index i, then the j that
gives the largest guaranteed decrease of the dual objective.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ConfigError, DegenerateLabels, ShapeError

log = logging.getLogger(__name__)

TAU = 1e-12


@dataclass(frozen=True)
class Kernel:
    kind: str = "rbf"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rbf", "linear"):
            raise ConfigError(f"unknown kernel {self.kind!r}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ConfigError("RBF gamma must be positive")

    def __call__(self, a, b) -> np.ndarray:
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        b = np.atleast_2d(np.asarray(b, dtype=np.float64))
        dot = a @ b.T
        if self.kind == "linear":
            return dot
        sq = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * dot
        return np.exp(-self.gamma * np.maximum(sq, 0.0))


@dataclass
class SvmBinaryModel:
    support_vectors: np.ndarray
    alphas: np.ndarray
    labels: np.ndarray  # +1/-1 label of each support vector
    bias: float
    kernel: Kernel
    positive_class: str = ""
    C: float = 1.0

    def decision_function(self, x, gram: np.ndarray | None = None) -> np.ndarray:
        """Decision values; ``gram`` may hold precomputed K(x, support_vectors)."""
        if gram is None:
            x = np.atleast_2d(np.asarray(x, dtype=np.float64))
            if self.support_vectors.size and x.shape[1] != self.support_vectors.shape[1]:
                raise ShapeError(f"expected {self.support_vectors.shape[1]} features, "
                                 f"got {x.shape[1]}")
            if len(self.alphas) == 0:
                return np.full(x.shape[0], self.bias)
            gram = self.kernel(x, self.support_vectors)
        return gram @ (self.alphas * self.labels) + self.bias


def dual_objective(alpha, y, gram) -> float:
    """sum(alpha) - 1/2 alpha^T Q alpha with Q_ij = y_i y_j K_ij."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ gram @ ay)


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool


@njit(cache=True)
def _smo_loop(Q, y, C, tol, max_iter, alpha, G):
    """Working-set iterations on (alpha, G) in place; returns (iterations, converged)."""
    n = y.shape[0]
    it = 0
    while it < max_iter:
        # i: maximal violator in I_up
        i = -1
        g_max = -np.inf
        g_min = np.inf
        for t in range(n):
            s = -y[t] * G[t]
            if (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0):
                if s > g_max:
                    g_max = s
                    i = t
            if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C):
                if s < g_min:
                    g_min = s
        if i < 0 or g_max - g_min < tol:
            return it, True
        # j: second-order choice among I_low members below g_max
        j = -1
        best = np.inf
        for t in range(n):
            if not ((y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C)):
                continue
            b = g_max + y[t] * G[t]
            if b <= 0:
                continue
            a = Q[i, i] + Q[t, t] - 2.0 * y[i] * y[t] * Q[i, t]
            if a <= 0:
                a = TAU
            obj = -(b * b) / a
            if obj < best:
                best = obj
                j = t
        if j < 0:
            return it, True

        ai_old = alpha[i]
        aj_old = alpha[j]
        if y[i] != y[j]:
            quad = Q[i, i] + Q[j, j] + 2.0 * Q[i, j]
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai_old - aj_old
            ai = ai_old + delta
            aj = aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            elif ai < 0:
                ai = 0.0
                aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            elif aj > C:
                aj = C
                ai = C + diff
        else:
            quad = Q[i, i] + Q[j, j] - 2.0 * Q[i, j]
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            total = ai_old + aj_old
            ai = ai_old - delta
            aj = aj_old + delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
            elif aj < 0:
                aj = 0.0
                ai = total
            if total > C:
                if aj > C:
                    aj = C
                    ai = total - C
            elif ai < 0:
                ai = 0.0
                aj = total
        alpha[i] = ai
        alpha[j] = aj
        di = ai - ai_old
        dj = aj - aj_old
        for t in range(n):
            G[t] += Q[i, t] * di + Q[j, t] * dj
        it += 1
    return it, False


def smo_solve(gram, y, C: float, tol: float = 1e-3, max_iter: int = 1_000_000) -> SmoResult:
    """Solve the SVM dual for a precomputed kernel matrix."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    Q = np.ascontiguousarray(gram * np.outer(y, y), dtype=np.float64)
    alpha = np.zeros(len(y))
    G = -np.ones(len(y))
    it, converged = _smo_loop(Q, y, float(C), float(tol), int(max_iter), alpha, G)
    if not converged:
        log.warning("SMO stopped after %d iterations without reaching tol=%g", it, tol)
    return SmoResult(alpha, _bias(alpha, y, G, C), int(it), bool(converged))


def _bias(alpha, y, G, C) -> float:
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        upper = alpha >= C
        ub_mask = np.where(upper, y < 0, y > 0)
        lb_mask = ~ub_mask
        ub = yG[ub_mask].min() if ub_mask.any() else np.inf
        lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
        if not np.isfinite(ub):
            ub = lb
        if not np.isfinite(lb):
            lb = ub
        rho = float((ub + lb) / 2)
    return -rho


def check_training_data(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("instances must form a 2-D array")
    if X.shape[0] != y.shape[0]:
        raise ShapeError(f"{X.shape[0]} instances but {y.shape[0]} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DegenerateLabels("labels must be +1 or -1")
    if np.unique(y).size < 2:
        raise DegenerateLabels("both classes must be present")
    return X, y


def train_binary(X, y, C: float = 1.0, kernel: Kernel | None = None, tol: float = 1e-3,
                 max_iter: int = 1_000_000, gram: np.ndarray | None = None,
                 positive_class: str = "") -> SvmBinaryModel:
    """Train a soft-margin SVM on +/-1 labels; keeps only alpha > 0."""
    if isinstance(X, (list, tuple)) and X and np.ndim(X[0]) == 1:
        if len({len(v) for v in X}) > 1:
            raise ShapeError("instances have different dimensions")
    X, y = check_training_data(X, y)
    if not C > 0:
        raise ConfigError("C must be positive")
    kernel = kernel or Kernel()
    if gram is None:
        gram = kernel(X, X)
    res = smo_solve(gram, y, C, tol, max_iter)
    sv = res.alpha > 0
    return SvmBinaryModel(X[sv].copy(), res.alpha[sv].copy(), y[sv].copy(), res.bias,
                          kernel, positive_class, C)
