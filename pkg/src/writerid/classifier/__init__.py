"""One-vs-rest SVMs trained by SMO, grid search and sum-rule fusion."""
from .gridsearch import DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, GridResult, grid_search, stratified_folds
from .multiclass import (MinMaxScaler, MulticlassModel, ScoreVector, softmax, sum_rule_fuse,
                         train_multiclass)
from .persist import load_model, save_model
from .svm import Kernel, SvmBinaryModel, dual_objective, smo_solve, train_binary

__all__ = [
    "DEFAULT_C_GRID", "DEFAULT_GAMMA_GRID", "GridResult", "grid_search", "stratified_folds",
    "MinMaxScaler", "MulticlassModel", "ScoreVector", "softmax", "sum_rule_fuse",
    "train_multiclass", "load_model", "save_model", "Kernel", "SvmBinaryModel",
    "dual_objective", "smo_solve", "train_binary",
]
