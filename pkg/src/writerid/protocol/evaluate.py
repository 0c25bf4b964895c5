"""Run a split plan through training, block scoring and document fusion."""
from __future__ import annotations

import hashlib
import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..classifier import (DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, Kernel, grid_search,
                          sum_rule_fuse, train_multiclass)
from ..errors import NoEvidence
from .report import ExperimentReport

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassifierConfig:
    c_grid: tuple = DEFAULT_C_GRID
    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    cv_folds: int = 3
    kernel: str = "rbf"
    seed: int = 0

    def fingerprint(self) -> str:
        return repr((tuple(map(float, self.c_grid)), tuple(map(float, self.gamma_grid)),
                     self.cv_folds, self.kernel, self.seed))


def default_trainer(X, labels, config: ClassifierConfig):
    """Grid-search (C, gamma) on the training data, then refit on all of it."""
    best = grid_search(X, labels, config.c_grid, config.gamma_grid, config.cv_folds,
                       config.seed, config.kernel)
    log.info("grid search chose C=%g gamma=%g (cv accuracy %.4f)", best.C, best.gamma,
             best.accuracy)
    return train_multiclass(X, labels, best.C, Kernel(config.kernel, best.gamma))


def training_key(X, labels, config: ClassifierConfig) -> str:
    """Content hash identifying a trained model."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(X, dtype=np.float64).tobytes())
    h.update("\x1f".join(labels).encode())
    h.update(config.fingerprint().encode())
    return h.hexdigest()[:24]


def _stack(refs, features):
    rows, labels, owners = [], [], []
    for ref in refs:
        arr = features.instances(ref)
        rows.append(arr)
        labels.extend([ref[0]] * arr.shape[0])
        owners.extend([ref] * arr.shape[0])
    dim = features.dim
    X = np.vstack(rows) if rows else np.zeros((0, dim))
    return X.reshape(len(labels), dim), labels, owners


def training_data(fold, features):
    """Stacked training instances and writer labels of one fold."""
    refs = [ref for w in sorted(fold) for ref in fold[w].train]
    X, labels, _ = _stack(refs, features)
    return X, labels


def evaluate(plan, features, config: ClassifierConfig | None = None, trainer=None,
             database: str = "", descriptor: str = "", model_store=None) -> ExperimentReport:
    """Identification rate per fold, counted per test document after fusion.

    ``trainer(X, labels, config)`` must return an object with
    ``predict_many(X) -> list[ScoreVector]``. ``model_store`` is an optional
    mapping used to reuse models across runs with identical training data.
    """
    config = config or ClassifierConfig()
    trainer = trainer or default_trainer
    accuracies = []
    for k, fold in enumerate(plan.folds, start=1):
        writers = sorted(fold)
        X, labels = training_data(fold, features)
        key = training_key(X, labels, config)
        model = model_store.get(key) if model_store is not None else None
        if model is None:
            model = trainer(X, labels, config)
            if model_store is not None:
                model_store[key] = model

        test_refs = [ref for w in writers for ref in fold[w].test]
        Xt, _, owners = _stack(test_refs, features)
        scores = model.predict_many(Xt) if len(owners) else []
        per_block = defaultdict(list)
        for ref, sv in zip(owners, scores):
            per_block[ref].append(sv)
        per_doc = defaultdict(list)
        for ref in test_refs:
            per_doc.setdefault((ref[0], ref[1]), [])
            if per_block.get(ref):
                per_doc[(ref[0], ref[1])].append(sum_rule_fuse(per_block[ref])[0])
        correct = 0
        for (writer, doc), block_scores in sorted(per_doc.items()):
            try:
                _, decision = sum_rule_fuse(block_scores)
            except NoEvidence:
                log.warning("fold %d: document %s/%s has no usable blocks", k, writer, doc)
                continue
            correct += decision == writer
        accuracies.append(100.0 * correct / len(per_doc))
    return ExperimentReport(database, descriptor, len(plan.writers), plan.df_mode,
                            tuple(accuracies))
