"""Experiment reports: per-fold identification rates, mean, sigma and DIF."""
from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, replace

from ..errors import DataError
from .splits import WITH_DF, WITHOUT_DF

CSV_COLUMNS = ("database", "descriptor", "writers", "fold1", "fold2", "fold3", "mean",
               "sigma", "mode", "dif")


@dataclass(frozen=True)
class ExperimentReport:
    database: str
    descriptor: str
    writers: int
    mode: str
    fold_accuracies: tuple
    dif: float | None = None

    def __post_init__(self):
        for acc in self.fold_accuracies:
            if not 0.0 <= acc <= 100.0:
                raise ValueError(f"accuracy {acc} outside [0, 100]")

    @property
    def mean(self) -> float:
        return math.fsum(self.fold_accuracies) / len(self.fold_accuracies)

    @property
    def sigma(self) -> float:
        """Sample standard deviation over folds (0 for a single fold)."""
        if len(self.fold_accuracies) < 2:
            return 0.0
        return statistics.stdev(self.fold_accuracies)

    def cell(self) -> str:
        return format_cell(self.mean, self.sigma)


def format_cell(mean: float, sigma: float) -> str:
    return f"{mean:.2f} (± {sigma:.2f})"


def pair_reports(without: ExperimentReport, with_: ExperimentReport):
    """Attach DIF = mean(without) - mean(with) to both reports."""
    dif = without.mean - with_.mean
    return replace(without, dif=dif), replace(with_, dif=dif)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        folds = [repr(float(a)) for a in r.fold_accuracies]
        folds = (folds + [""] * 3)[:3]
        w.writerow([r.database, r.descriptor, r.writers, *folds, repr(r.mean), repr(r.sigma),
                    r.mode, "" if r.dif is None else repr(r.dif)])
    return buf.getvalue()


def reports_from_csv(text: str) -> list[ExperimentReport]:
    """Parse a report file and re-check that stored means match their folds."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        try:
            folds = tuple(float(row[f"fold{k}"]) for k in (1, 2, 3) if row[f"fold{k}"] != "")
            rep = ExperimentReport(row["database"], row["descriptor"], int(row["writers"]),
                                   row["mode"], folds,
                                   None if row["dif"] == "" else float(row["dif"]))
            stored = float(row["mean"])
        except (KeyError, ValueError) as exc:
            raise DataError(f"malformed report row: {exc}") from exc
        if abs(stored - rep.mean) > 1e-9:
            raise DataError(f"report mean {stored} disagrees with its folds ({rep.mean})")
        out.append(rep)
    return out


def format_table(reports, first_column: str = "Database") -> str:
    """Human-readable 'Without DF (σ) | With DF (σ) | DIF' table."""
    rows, index = [], {}
    for r in reports:
        key = (r.database, r.descriptor)
        if key not in index:
            index[key] = len(rows)
            rows.append({"db": r.database, "desc": r.descriptor, "writers": r.writers})
        rows[index[key]][r.mode] = r
    header = [first_column, "Descriptor", "# Writers", "Without DF (σ)", "With DF (σ)", "DIF"]
    body = []
    for row in rows:
        wo, wi = row.get(WITHOUT_DF), row.get(WITH_DF)
        dif = f"{wo.mean - wi.mean:.2f}" if wo and wi else "-"
        body.append([row["db"], row["desc"], str(row["writers"]),
                     wo.cell() if wo else "-", wi.cell() if wi else "-", dif])
    widths = [max(len(x[i]) for x in [header] + body) for i in range(len(header))]
    lines = [" | ".join(c.ljust(wd) for c, wd in zip(header, widths)).rstrip()]
    lines.append("-+-".join("-" * wd for wd in widths))
    lines += [" | ".join(c.ljust(wd) for c, wd in zip(b, widths)).rstrip() for b in body]
    return "\n".join(lines) + "\n"
