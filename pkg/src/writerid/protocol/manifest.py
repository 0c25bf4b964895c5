"""Manifest files mapping document images to (writer, document) identities."""
from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError, EmptySubset, ManifestError

COLUMNS = ("writer_id", "document_id", "sequence", "image_path")

ALL_FIRST_DOC = "all-first-doc"
SINGLE_SAMPLE_ONLY = "single-sample-only"
FIRST_TWO_OF_MULTIDOC = "first-two-docs-of-multidoc"
FIRST_TWO_DOCS = "first-two-docs"
KEEP_ALL = "all"
SELECTORS = (ALL_FIRST_DOC, SINGLE_SAMPLE_ONLY, FIRST_TWO_OF_MULTIDOC, FIRST_TWO_DOCS, KEEP_ALL)


@dataclass(frozen=True)
class SampleRecord:
    writer_id: str
    document_id: str
    sequence: int
    image_path: str

    def resolved_path(self, base: Path | None = None) -> Path:
        p = Path(self.image_path)
        return p if p.is_absolute() or base is None else base / p


def _sort_key(r: SampleRecord):
    return (r.writer_id, r.sequence, r.document_id)


def validate_records(records) -> list[SampleRecord]:
    seen = set()
    for r in records:
        key = (r.writer_id, r.document_id)
        if key in seen:
            raise ManifestError(f"duplicate (writer, document) pair: {key[0]!r}, {key[1]!r}")
        seen.add(key)
    return sorted(records, key=_sort_key)


def load_manifest(path, verify_paths: bool = True) -> list[SampleRecord]:
    """Parse a manifest CSV; relative image paths resolve against its directory."""
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        missing = [c for c in COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ManifestError(f"{path}: missing column(s) {', '.join(missing)}")
        records = []
        for lineno, row in enumerate(reader, start=2):
            try:
                seq = int(row["sequence"])
            except (TypeError, ValueError):
                raise ManifestError(f"{path}:{lineno}: sequence must be an integer") from None
            writer, doc = (row["writer_id"] or "").strip(), (row["document_id"] or "").strip()
            if not writer or not doc:
                raise ManifestError(f"{path}:{lineno}: empty writer or document id")
            records.append(SampleRecord(writer, doc, seq, row["image_path"]))
    if not records:
        raise ManifestError(f"{path}: manifest has no records")
    records = validate_records(records)
    if verify_paths:
        for r in records:
            if not r.resolved_path(path.parent).is_file():
                raise ManifestError(f"{path}: image not found: {r.resolved_path(path.parent)}")
    return records


def write_manifest(records, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in records:
            w.writerow([r.writer_id, r.document_id, r.sequence, r.image_path])


def documents_by_writer(records) -> dict[str, list[SampleRecord]]:
    """Writer -> records in acquisition order."""
    out = defaultdict(list)
    for r in sorted(records, key=_sort_key):
        out[r.writer_id].append(r)
    return dict(out)


def select_subset(records, mode: str) -> list[SampleRecord]:
    """Keep the documents chosen by ``mode``.

    ``all-first-doc`` keeps each writer's first document, ``single-sample-only``
    keeps writers with exactly one document, ``first-two-docs-of-multidoc``
    keeps the first two documents of writers that have at least two.
    ``first-two-docs`` keeps up to two documents for every writer (single-sample
    writers included); ``all`` is a pass-through.
    """
    if mode not in SELECTORS:
        raise ConfigError(f"unknown subset selector {mode!r}")
    out = []
    for docs in documents_by_writer(records).values():
        if mode == ALL_FIRST_DOC:
            out.extend(docs[:1])
        elif mode == SINGLE_SAMPLE_ONLY:
            if len(docs) == 1:
                out.extend(docs)
        elif mode == FIRST_TWO_OF_MULTIDOC:
            if len(docs) >= 2:
                out.extend(docs[:2])
        elif mode == FIRST_TWO_DOCS:
            out.extend(docs[:2])
        else:
            out.extend(docs)
    if not out:
        raise EmptySubset(f"selector {mode!r} kept no documents")
    return out


def distribution(records) -> Counter:
    """Document count -> number of writers with exactly that many documents."""
    return Counter(len(d) for d in documents_by_writer(records).values())


def format_distribution(records) -> str:
    """Writers per document count (cumulative and exact rows) plus a summary line."""
    dist = distribution(records)
    counts = sorted(dist)
    at_least = [sum(v for k, v in dist.items() if k >= c) for c in counts]
    head = ["# Docs"] + [str(c) for c in counts]
    ge = ["Writers with # docs or more"] + [str(v) for v in at_least]
    eq = ["Writers with # docs exactly"] + [str(dist[c]) for c in counts]
    widths = [max(len(r[i]) for r in (head, ge, eq)) for i in range(len(head))]
    lines = ["  ".join(cell.rjust(wd) if i else cell.ljust(wd)
                       for i, (cell, wd) in enumerate(zip(row, widths)))
             for row in (head, ge, eq)]
    total_docs = sum(k * v for k, v in dist.items())
    parts = [f"{c} doc{'s' if c > 1 else ''}: {dist[c]}" for c in counts]
    parts[0] += " writers"
    lines.append(", ".join(parts))
    lines.append(f"Total: {sum(dist.values())} writers, {total_docs} documents")
    return "\n".join(lines)
