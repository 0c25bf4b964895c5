"""Train/test split plans with and without the document filter.

Without the filter, each writer's first document supplies both sides: the
training blocks of the three folds are the first six, the first and last
three, and the last six blocks. With the filter, training keeps those
indices on document 1 while the test side takes the complementary indices
from document 2. Writers with a single document cannot be filtered; they
fall back to the unfiltered scheme and are listed in ``fallback_writers``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..errors import ConfigError, DataError, PlanError
from .manifest import documents_by_writer

WITH_DF = "with-df"
WITHOUT_DF = "without-df"
DF_MODES = (WITHOUT_DF, WITH_DF)
TRAIN, TEST = "train", "test"


class BlockRef(NamedTuple):
    writer_id: str
    document_id: str
    block_index: int


@dataclass(frozen=True)
class WriterFold:
    train: tuple
    test: tuple

    @property
    def train_documents(self) -> set:
        return {b.document_id for b in self.train}

    @property
    def test_documents(self) -> set:
        return {b.document_id for b in self.test}


@dataclass
class SplitPlan:
    df_mode: str
    folds: list  # one dict writer_id -> WriterFold per fold
    fallback_writers: frozenset = field(default_factory=frozenset)
    blocks_per_doc: int = 9

    @property
    def writers(self) -> list[str]:
        return sorted(self.folds[0]) if self.folds else []

    def refs(self, side: str | None = None) -> set:
        out = set()
        for fold in self.folds:
            for wf in fold.values():
                if side in (None, TRAIN):
                    out.update(wf.train)
                if side in (None, TEST):
                    out.update(wf.test)
        return out


def fold_scheme(blocks_per_doc: int = 9) -> list[tuple[list[int], list[int]]]:
    """(train indices, test indices) per fold.

    For nine blocks: test {6,7,8}, then {3,4,5}, then {0,1,2}.
    """
    if blocks_per_doc < 2:
        raise ConfigError("need at least two blocks per document")
    k = min(3, blocks_per_doc)
    chunks = [c.tolist() for c in np.array_split(np.arange(blocks_per_doc), k)]
    out = []
    for test in reversed(chunks):
        train = [i for i in range(blocks_per_doc) if i not in test]
        out.append((train, test))
    return out


def plan_splits(records, df_mode: str, blocks_per_doc: int = 9,
                reverse: bool = False) -> SplitPlan:
    """Build the fold plan for ``records`` (already subset-selected).

    ``reverse`` swaps the document roles under the filter (train on the
    second document, test on the first).
    """
    if df_mode not in DF_MODES:
        raise ConfigError(f"unknown DF mode {df_mode!r}")
    by_writer = documents_by_writer(records)
    if not by_writer:
        raise PlanError("no writers to plan")
    scheme = fold_scheme(blocks_per_doc)
    folds = [dict() for _ in scheme]
    fallback = set()
    for writer, docs in by_writer.items():
        if not docs:
            raise PlanError(f"writer {writer!r} has no documents")
        if len(docs) == 1:
            fallback.add(writer)
        use_df = df_mode == WITH_DF and len(docs) >= 2
        first = docs[0].document_id
        if use_df:
            train_doc, test_doc = first, docs[1].document_id
            if reverse:
                train_doc, test_doc = test_doc, train_doc
        else:
            train_doc = test_doc = first
        for fold, (tr, te) in zip(folds, scheme):
            fold[writer] = WriterFold(
                tuple(BlockRef(writer, train_doc, i) for i in tr),
                tuple(BlockRef(writer, test_doc, i) for i in te))
    return SplitPlan(df_mode, folds, frozenset(fallback), blocks_per_doc)


def save_plan(plan: SplitPlan, path) -> None:
    """CSV ``fold,writer,document,block_index,side`` preceded by '#' metadata lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# df_mode={plan.df_mode}\n")
        fh.write(f"# blocks_per_doc={plan.blocks_per_doc}\n")
        w = csv.writer(fh, lineterminator="\n")
        for writer in sorted(plan.fallback_writers):
            fh.write("# fallback=")
            w.writerow([writer])
        w.writerow(["fold", "writer", "document", "block_index", "side"])
        for k, fold in enumerate(plan.folds, start=1):
            for writer in sorted(fold):
                wf = fold[writer]
                for side, refs in ((TRAIN, wf.train), (TEST, wf.test)):
                    for ref in refs:
                        w.writerow([k, ref.writer_id, ref.document_id, ref.block_index, side])


def load_plan(path) -> SplitPlan:
    """Read a plan file; third-party files without metadata are accepted.

    Without a fallback listing, writers that reference a single document
    across the whole plan are treated as single-sample writers.
    """
    meta, fallback, body = {}, set(), []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("# fallback="):
                fallback.add(next(csv.reader([line[len("# fallback="):]]))[0])
            elif line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            elif line.strip():
                body.append(line)
    rows = list(csv.DictReader(body))
    if not rows:
        raise DataError(f"{path}: empty plan")
    folds: dict[int, dict[str, tuple[list, list]]] = {}
    docs_seen: dict[str, set] = {}
    try:
        for row in rows:
            k = int(row["fold"])
            ref = BlockRef(row["writer"], row["document"], int(row["block_index"]))
            side = row["side"].strip()
            if side not in (TRAIN, TEST):
                raise DataError(f"{path}: bad side {side!r}")
            entry = folds.setdefault(k, {}).setdefault(ref.writer_id, ([], []))
            entry[0 if side == TRAIN else 1].append(ref)
            docs_seen.setdefault(ref.writer_id, set()).add(ref.document_id)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed plan row: {exc}") from exc
    if "df_mode" not in meta:
        fallback = {w for w, d in docs_seen.items() if len(d) == 1}
    plan_folds = []
    for k in sorted(folds):
        plan_folds.append({w: WriterFold(tuple(tr), tuple(te)) for w, (tr, te) in folds[k].items()})
    return SplitPlan(meta.get("df_mode", "external"), plan_folds, frozenset(fallback),
                     int(meta.get("blocks_per_doc", 0) or 0))
