"""Delimited-text feature cache: one line per block instance.

Columns: ``writer_id,document_id,block_index,descriptor,instance,v0,...``.
Histogram descriptors have one instance per block (instance 0); SURF blocks
have one line per keypoint, and a block without keypoints gets a single
line with instance -1 and no values so its absence is still recorded.
Values are written with 9 significant digits.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..errors import DataError, FeatureCacheMiss


class FeatureStore(dict):
    """Maps (writer_id, document_id, block_index) to an (instances, dim) array."""

    def __init__(self, kind: str = "", *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.kind = kind

    def instances(self, ref) -> np.ndarray:
        key = (ref[0], ref[1], int(ref[2]))
        try:
            return self[key]
        except KeyError:
            raise FeatureCacheMiss(f"no {self.kind or 'cached'} features for block {key}") from None

    @property
    def dim(self) -> int:
        for arr in self.values():
            if arr.shape[0]:
                return arr.shape[1]
        return 0


def write_features(store: FeatureStore, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for key in sorted(store):
            arr = np.atleast_2d(store[key])
            if arr.shape[0] == 0:
                w.writerow([*key, store.kind, -1])
            for k, row in enumerate(arr):
                w.writerow([*key, store.kind, k, *(format(float(v), ".9g") for v in row)])
    tmp.replace(path)


def read_features(path) -> FeatureStore:
    rows: dict = {}
    kind = ""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            for rec in csv.reader(fh):
                writer, doc, idx, kind, inst = rec[:5]
                key = (writer, doc, int(idx))
                bucket = rows.setdefault(key, [])
                if int(inst) >= 0:
                    bucket.append([float(v) for v in rec[5:]])
    except (OSError, ValueError) as exc:
        raise DataError(f"unreadable feature cache {path}: {exc}") from exc
    store = FeatureStore(kind)
    dim = max((len(v[0]) for v in rows.values() if v), default=0)
    for key, vecs in rows.items():
        store[key] = np.array(vecs, dtype=np.float64).reshape(len(vecs), dim)
    return store
