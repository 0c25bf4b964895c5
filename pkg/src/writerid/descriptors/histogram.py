from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Filter responses within this distance of zero count as ties. Inputs are
# integer gray levels, so genuinely non-zero responses sit orders of
# magnitude above it while rounding noise sits far below it.
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class HistogramFeature:
    kind: str
    bins: np.ndarray
    normalization: str = "raw"

    def l1(self) -> "HistogramFeature":
        total = float(self.bins.sum())
        bins = self.bins / total if total > 0 else self.bins.astype(np.float64)
        return HistogramFeature(self.kind, bins, "l1")

    def __len__(self):
        return len(self.bins)
