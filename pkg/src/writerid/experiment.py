"""Cached pipeline stages: texture -> features -> plans -> models -> reports.

Cache layout under ``cfg.cache_dir``::

    textures/<key>/              texture and block PNGs (optional)
    features/<descriptor>-<key>.csv
    plans/<mode>-<key>.csv
    models/<key>.model

Feature keys hash the input images and the feature settings only, so a new
classifier grid reuses existing features. Model keys hash the training
matrix, labels and classifier settings.
"""
from __future__ import annotations

import hashlib
import logging
from pathlib import Path

from .classifier import load_model, save_model
from .config import RunConfig
from .descriptors.cache import read_features, write_features
from .pipeline import extract_features, feature_key
from .protocol.audit import audit_leakage
from .protocol.evaluate import default_trainer, evaluate, training_data, training_key
from .protocol.manifest import load_manifest, select_subset
from .protocol.report import format_table, pair_reports, reports_to_csv
from .protocol.splits import WITH_DF, WITHOUT_DF, load_plan, plan_splits, save_plan

log = logging.getLogger(__name__)


class StageError(Exception):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


class DiskModelStore:
    """Model cache keyed by training fingerprint; mirrors a dict's get/setitem."""

    def __init__(self, directory):
        self.directory = Path(directory)

    def _path(self, key):
        return self.directory / f"{key}.model"

    def get(self, key, default=None):
        path = self._path(key)
        return load_model(path) if path.is_file() else default

    def __setitem__(self, key, model):
        self.directory.mkdir(parents=True, exist_ok=True)
        tmp = self._path(key).with_suffix(".tmp")
        save_model(model, tmp)
        tmp.replace(self._path(key))

    def __contains__(self, key):
        return self._path(key).is_file()


def load_records(cfg: RunConfig):
    records = load_manifest(cfg.manifest, verify_paths=cfg.verify_paths)
    return select_subset(records, cfg.subset), Path(cfg.manifest).parent


def records_key(records) -> str:
    h = hashlib.sha256()
    for r in records:
        h.update(f"{r.writer_id}\x1f{r.document_id}\x1f{r.sequence}\n".encode())
    return h.hexdigest()[:16]


def stage_features(cfg: RunConfig, records, base_dir, descriptor: str, force_images=False):
    """Load the feature cache for ``descriptor`` or compute and write it.

    The returned store is always parsed back from the cache file, so fresh
    and resumed runs see identical values.
    """
    fcfg = cfg.feature_config(descriptor)
    key = feature_key(records, base_dir, fcfg)
    path = Path(cfg.cache_dir) / "features" / f"{descriptor}-{key}.csv"
    image_dir = None
    if cfg.save_images or force_images:
        image_dir = Path(cfg.cache_dir) / "textures" / key
    if not path.is_file() or (image_dir is not None and not image_dir.is_dir()):
        log.info("extracting %s features for %d documents", descriptor, len(records))
        store = extract_features(records, base_dir, fcfg, cfg.workers, image_dir)
        write_features(store, path)
    return read_features(path), path


def stage_plans(cfg: RunConfig, records):
    plans = {}
    rkey = records_key(records)
    for mode in cfg.modes:
        plan = plan_splits(records, mode, cfg.block_count, cfg.reverse_df)
        path = Path(cfg.cache_dir) / "plans" / f"{mode}-{rkey}.csv"
        save_plan(plan, path)
        plans[mode] = (load_plan(path), path)
    return plans


def stage_train(cfg: RunConfig, plans, features) -> int:
    """Train (or find cached) models for every descriptor and fold; returns models trained."""
    store = DiskModelStore(Path(cfg.cache_dir) / "models")
    ccfg = cfg.classifier_config()
    trained = 0
    for descriptor in cfg.descriptors:
        for plan, _ in plans.values():
            for fold in plan.folds:
                X, labels = training_data(fold, features[descriptor])
                key = training_key(X, labels, ccfg)
                if key not in store:
                    store[key] = default_trainer(X, labels, ccfg)
                    trained += 1
    return trained


def stage_evaluate(cfg: RunConfig, plans, features):
    """Reports for every (descriptor, mode); paired DIF when both modes ran."""
    store = DiskModelStore(Path(cfg.cache_dir) / "models")
    reports = []
    for descriptor in cfg.descriptors:
        by_mode = {}
        for mode in cfg.modes:
            plan, _ = plans[mode]
            by_mode[mode] = evaluate(plan, features[descriptor], cfg.classifier_config(), None,
                                     cfg.database, descriptor, store)
        if WITHOUT_DF in by_mode and WITH_DF in by_mode:
            by_mode[WITHOUT_DF], by_mode[WITH_DF] = pair_reports(by_mode[WITHOUT_DF],
                                                                 by_mode[WITH_DF])
        reports.extend(by_mode[m] for m in cfg.modes)
    return reports


def write_outputs(cfg: RunConfig, reports, plans) -> list[Path]:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    (out / "report.csv").write_text(reports_to_csv(reports), encoding="utf-8")
    (out / "report.txt").write_text(format_table(reports), encoding="utf-8")
    written += [out / "report.csv", out / "report.txt"]
    for mode, (plan, _) in plans.items():
        path = out / f"audit-{mode}.csv"
        path.write_text(audit_leakage(plan).to_csv(), encoding="utf-8")
        written.append(path)
    return written


def run_all(cfg: RunConfig):
    """Full pipeline; each failure is re-raised as StageError naming the stage."""
    stage = "ingest"
    try:
        records, base = load_records(cfg)
        stage = "features"
        features = {d: stage_features(cfg, records, base, d)[0] for d in cfg.descriptors}
        stage = "plan"
        plans = stage_plans(cfg, records)
        stage = "evaluate"
        reports = stage_evaluate(cfg, plans, features)
        stage = "report"
        paths = write_outputs(cfg, reports, plans)
    except Exception as exc:
        raise StageError(stage, exc) from exc
    return reports, paths
