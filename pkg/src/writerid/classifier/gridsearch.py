"""Hyper-parameter search over (C, gamma) with stratified k-fold CV."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import StratificationError
from .multiclass import MinMaxScaler, train_multiclass
from .svm import Kernel

DEFAULT_C_GRID = tuple(2.0 ** k for k in (-1, 1, 3, 5, 7))
DEFAULT_GAMMA_GRID = tuple(2.0 ** k for k in (-9, -7, -5, -3, -1))


def stratified_folds(labels, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Test-index arrays, one per fold; each class is dealt round-robin after a seeded shuffle."""
    labels = np.asarray([str(v) for v in labels])
    if folds < 2:
        raise StratificationError("need at least two folds")
    rng = np.random.default_rng(seed)
    buckets = [[] for _ in range(folds)]
    for cid in sorted(set(labels.tolist())):
        members = np.flatnonzero(labels == cid)
        if members.size < folds:
            raise StratificationError(
                f"class {cid!r} has {members.size} members, fewer than {folds} folds")
        members = members[rng.permutation(members.size)]
        for k, idx in enumerate(members):
            buckets[k % folds].append(int(idx))
    return [np.array(sorted(b), dtype=np.int64) for b in buckets]


@dataclass
class GridResult:
    C: float
    gamma: float
    accuracy: float
    table: dict = field(default_factory=dict)  # (C, gamma) -> mean CV accuracy


def cv_accuracy(X, labels, C, gamma, folds, seed=0, kernel="rbf") -> float:
    """Mean stratified-CV instance accuracy of one grid cell."""
    labels = np.asarray([str(v) for v in labels])
    X = np.asarray(X, dtype=np.float64)
    splits = stratified_folds(labels, folds, seed)
    accs = []
    for test in splits:
        train = np.setdiff1d(np.arange(len(labels)), test)
        model = train_multiclass(X[train], labels[train], C, Kernel(kernel, gamma))
        pred = np.array(model.predict(X[test]))
        accs.append(float(np.mean(pred == labels[test])))
    return float(np.mean(accs))


def grid_search(X, labels, c_grid=DEFAULT_C_GRID, gamma_grid=DEFAULT_GAMMA_GRID,
                folds: int = 3, seed: int = 0, kernel: str = "rbf") -> GridResult:
    """Pick the cell with the best mean CV accuracy; ties go to smaller C, then smaller gamma.

    For each CV split and gamma the kernel matrix is computed once and shared
    by every C and every one-vs-rest problem.
    """
    labels = np.asarray([str(v) for v in labels])
    X = np.asarray(X, dtype=np.float64)
    c_grid = sorted(c_grid)
    gamma_grid = sorted(gamma_grid) if kernel == "rbf" else [1.0]
    splits = stratified_folds(labels, folds, seed)
    correct = {(c, g): [] for c in c_grid for g in gamma_grid}
    for test in splits:
        train = np.setdiff1d(np.arange(len(labels)), test)
        Z = MinMaxScaler.fit(X[train]).transform(X[train])
        for g in gamma_grid:
            kern = Kernel(kernel, g)
            gram = kern(Z, Z)
            for c in c_grid:
                model = train_multiclass(X[train], labels[train], c, kern, scaled_gram=gram)
                pred = np.array(model.predict(X[test]))
                correct[(c, g)].append(float(np.mean(pred == labels[test])))
    table = {cell: float(np.mean(v)) for cell, v in correct.items()}
    best = None
    for c in c_grid:
        for g in gamma_grid:
            if best is None or table[(c, g)] > table[best]:
                best = (c, g)
    return GridResult(best[0], best[1], table[best], table)
