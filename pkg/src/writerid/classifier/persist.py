"""Text serialization for multiclass models.

Layout (CSV rows)::

    writerid-model,1
    kernel,<kind>,<gamma>
    scaler_low,<v>...
    scaler_high,<v>...
    classes,<k>
    class,<id>,<n_sv>,<bias>,<C>
    sv,<alpha>,<label>,<v>...     (n_sv rows)

Floats are written with repr(), which round-trips exactly.
"""
from __future__ import annotations

import csv
import io

import numpy as np

from ..errors import DataError
from .multiclass import MinMaxScaler, MulticlassModel
from .svm import Kernel, SvmBinaryModel

MAGIC = "writerid-model"
VERSION = 1


def _f(values):
    return [repr(float(v)) for v in values]


def dumps_model(model: MulticlassModel) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    kernel = model.models[0].kernel
    w.writerow([MAGIC, VERSION])
    w.writerow(["kernel", kernel.kind, repr(float(kernel.gamma))])
    w.writerow(["scaler_low", *_f(model.scaler.low)])
    w.writerow(["scaler_high", *_f(model.scaler.high)])
    w.writerow(["classes", len(model.class_ids)])
    for cid, m in zip(model.class_ids, model.models):
        w.writerow(["class", cid, len(m.alphas), repr(float(m.bias)), repr(float(m.C))])
        for sv, a, y in zip(m.support_vectors, m.alphas, m.labels):
            w.writerow(["sv", repr(float(a)), repr(float(y)), *_f(sv)])
    return buf.getvalue()


def loads_model(text: str) -> MulticlassModel:
    rows = list(csv.reader(io.StringIO(text)))
    try:
        if rows[0][0] != MAGIC:
            raise DataError("not a model file")
        if int(rows[0][1]) != VERSION:
            raise DataError(f"unsupported model version {rows[0][1]}")
        kernel = Kernel(rows[1][1], float(rows[1][2]))
        low = np.array([float(v) for v in rows[2][1:]])
        high = np.array([float(v) for v in rows[3][1:]])
        n_classes = int(rows[4][1])
        pos = 5
        ids, models = [], []
        for _ in range(n_classes):
            _, cid, n_sv, bias, C = rows[pos]
            pos += 1
            block = rows[pos:pos + int(n_sv)]
            pos += int(n_sv)
            alphas = np.array([float(r[1]) for r in block])
            labels = np.array([float(r[2]) for r in block])
            svs = np.array([[float(v) for v in r[3:]] for r in block]).reshape(len(block), len(low))
            ids.append(cid)
            models.append(SvmBinaryModel(svs, alphas, labels, float(bias), kernel, cid, float(C)))
    except (IndexError, ValueError) as exc:
        raise DataError(f"malformed model file: {exc}") from exc
    return MulticlassModel(tuple(ids), models, MinMaxScaler(low, high))


def save_model(model: MulticlassModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_model(model))


def load_model(path) -> MulticlassModel:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
