"""Local binary patterns over circular neighbourhoods."""
from __future__ import annotations

import numpy as np

from ..errors import BlockTooSmall, ConfigError
from ..imaging import as_gray
from .histogram import HistogramFeature, TIE_TOLERANCE


def neighbour_offsets(radius: float, neighbors: int) -> list[tuple[float, float]]:
    """(dx, dy) per neighbour; index 0 at angle 0, counter-clockwise on screen.

    Image rows grow downwards, so a counter-clockwise step moves to smaller
    row indices. Offsets are rounded to 12 decimals so axis-aligned samples
    land exactly on pixel centres.
    """
    out = []
    for i in range(neighbors):
        angle = 2.0 * np.pi * i / neighbors
        dx = round(radius * np.cos(angle), 12) + 0.0
        dy = round(-radius * np.sin(angle), 12) + 0.0
        out.append((dx, dy))
    return out


def lbp_codes(block, radius: int = 1, neighbors: int = 8) -> np.ndarray:
    """Per-pixel LBP codes for every pixel at least ``radius`` from the border."""
    img = as_gray(block).astype(np.float64)
    h, w = img.shape
    if neighbors < 1 or neighbors > 32:
        raise ConfigError("neighbors must be in [1, 32]")
    if h <= 2 * radius or w <= 2 * radius:
        raise BlockTooSmall(f"{w}x{h} block too small for radius {radius}")
    ih, iw = h - 2 * radius, w - 2 * radius
    center = img[radius:radius + ih, radius:radius + iw]
    codes = np.zeros((ih, iw), dtype=np.int64)

    def shifted(dy, dx):
        return img[radius + dy:radius + dy + ih, radius + dx:radius + dx + iw]

    for i, (dx, dy) in enumerate(neighbour_offsets(radius, neighbors)):
        x0, y0 = int(np.floor(dx)), int(np.floor(dy))
        fx, fy = dx - x0, dy - y0
        # sample minus centre, written in difference form so that a flat
        # neighbourhood gives exactly zero
        a = shifted(y0, x0)
        diff = a - center
        if fx > 0:
            diff = diff + fx * (shifted(y0, x0 + 1) - a)
        if fy > 0:
            diff = diff + fy * (shifted(y0 + 1, x0) - a)
        if fx > 0 and fy > 0:
            d = shifted(y0 + 1, x0 + 1) - shifted(y0 + 1, x0) - shifted(y0, x0 + 1) + a
            diff = diff + fx * fy * d
        bit = diff >= -TIE_TOLERANCE
        codes |= bit.astype(np.int64) << i
    return codes


def uniform_mapping(neighbors: int = 8) -> np.ndarray:
    """Map plain codes to the P*(P-1)+3 uniform-pattern bins."""
    table = np.empty(1 << neighbors, dtype=np.int64)
    next_bin = 0
    uniform_bins = {}
    for code in range(1 << neighbors):
        bits = [(code >> k) & 1 for k in range(neighbors)]
        transitions = sum(bits[k] != bits[(k + 1) % neighbors] for k in range(neighbors))
        if transitions <= 2:
            uniform_bins[code] = next_bin
            next_bin += 1
    for code in range(1 << neighbors):
        table[code] = uniform_bins.get(code, next_bin)
    return table


def lbp_histogram(block, radius: int = 1, neighbors: int = 8, uniform: bool = False,
                  normalize: bool = False) -> HistogramFeature:
    codes = lbp_codes(block, radius, neighbors)
    if uniform:
        mapping = uniform_mapping(neighbors)
        codes = mapping[codes]
        nbins = int(mapping.max()) + 1
    else:
        nbins = 1 << neighbors
    counts = np.bincount(codes.ravel(), minlength=nbins).astype(np.float64)
    feat = HistogramFeature("lbp", counts)
    return feat.l1() if normalize else feat
