"""Grayscale image primitives: conversion, Otsu binarization, integral
images and 8-connected component labeling.

Images are plain numpy arrays indexed ``[row, col]``: ``uint8`` for gray
images, ``bool`` for ink masks (True = ink).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import ConstantImage, InvalidImage

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def as_gray(img) -> np.ndarray:
    """Validate and return ``img`` as a 2-D uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidImage(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if np.any(arr < 0) or np.any(arr > 255):
            raise InvalidImage("intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def to_grayscale(rgb) -> np.ndarray:
    """ITU-R 601 luminance, rounded half-up, computed in integer arithmetic."""
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[2] < 3 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidImage(f"expected an HxWx3 raster, got shape {arr.shape}")
    rgbi = arr[..., :3].astype(np.int64)
    lum = (299 * rgbi[..., 0] + 587 * rgbi[..., 1] + 114 * rgbi[..., 2] + 500) // 1000
    return np.clip(lum, 0, 255).astype(np.uint8)


def load_image(path) -> np.ndarray:
    """Read a PNG/PGM file as a gray image; colour files go through to_grayscale."""
    with Image.open(path) as im:
        if im.mode in ("L", "LA", "1", "I", "I;16"):
            return as_gray(np.asarray(im.convert("L")))
        return to_grayscale(np.asarray(im.convert("RGB")))


def save_png(img: np.ndarray, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(as_gray(img), mode="L").save(path, format="PNG")


def otsu_threshold(img) -> int:
    """Return the threshold t maximizing between-class variance of {<=t, >t}.

    The criterion ``(N*S0 - N0*S)^2 / (N0*N1)`` is proportional to the
    between-class variance and is compared as exact fractions, so ties are
    real ties and resolve to the smallest t.
    """
    img = as_gray(img)
    hist = np.bincount(img.ravel(), minlength=256).astype(np.int64)
    if np.count_nonzero(hist) < 2:
        raise ConstantImage("image has a single intensity level")
    n_total = int(hist.sum())
    s_total = int(np.dot(hist, np.arange(256)))
    cum_n = np.cumsum(hist)
    cum_s = np.cumsum(hist * np.arange(256))
    best_t, best = -1, Fraction(-1)
    for t in range(256):
        n0 = int(cum_n[t])
        n1 = n_total - n0
        if n0 == 0 or n1 == 0:
            continue
        num = n_total * int(cum_s[t]) - n0 * s_total
        score = Fraction(num * num, n0 * n1)
        if score > best:
            best, best_t = score, t
    return best_t


def binarize(img, threshold: int | None = None) -> np.ndarray:
    """Ink mask: pixels at or below the (Otsu) threshold are ink."""
    img = as_gray(img)
    if threshold is None:
        threshold = otsu_threshold(img)
    return img <= threshold


@dataclass(frozen=True)
class IntegralImage:
    """Summed-area table with a zero guard row and column.

    ``table[r + 1, c + 1]`` is the sum over rows ``0..r`` and cols ``0..c``
    inclusive. Stored as int64 so box sums are exact.
    """

    table: np.ndarray

    @property
    def height(self) -> int:
        return self.table.shape[0] - 1

    @property
    def width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def sums(self) -> np.ndarray:
        return self.table[1:, 1:]

    def window_sum(self, r0, c0, r1, c1):
        """Sum over rows [r0, r1] and cols [c0, c1], inclusive bounds."""
        t = self.table
        return t[r1 + 1, c1 + 1] - t[r0, c1 + 1] - t[r1 + 1, c0] + t[r0, c0]

    def box(self, row, col, rows, cols):
        """Sum over the half-open box starting at (row, col), clipped to the image.

        Accepts scalars or broadcastable integer arrays; boxes falling entirely
        outside the image sum to zero.
        """
        h, w = self.height, self.width
        r0 = np.clip(row, 0, h)
        c0 = np.clip(col, 0, w)
        r1 = np.clip(np.asarray(row) + rows, 0, h)
        c1 = np.clip(np.asarray(col) + cols, 0, w)
        t = self.table
        return t[r1, c1] - t[r0, c1] - t[r1, c0] + t[r0, c0]


def integral_image(img) -> IntegralImage:
    img = as_gray(img)
    table = np.zeros((img.shape[0] + 1, img.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(img.astype(np.int64), axis=0), axis=1, out=table[1:, 1:])
    return IntegralImage(table)


@dataclass(frozen=True)
class ConnectedComponent:
    rows: np.ndarray
    cols: np.ndarray
    bbox: tuple[int, int, int, int]  # (min_x, min_y, max_x, max_y), inclusive

    @property
    def size(self) -> int:
        return int(self.rows.size)

    @property
    def centroid(self) -> tuple[float, float]:
        return float(self.cols.mean()), float(self.rows.mean())

    @property
    def width(self) -> int:
        return self.bbox[2] - self.bbox[0] + 1

    @property
    def height(self) -> int:
        return self.bbox[3] - self.bbox[1] + 1

    @property
    def pixels(self) -> set[tuple[int, int]]:
        return set(zip(self.cols.tolist(), self.rows.tolist()))


def connected_components(mask) -> list[ConnectedComponent]:
    """8-connected ink components in reading order.

    Reading order: centroids are bucketed into horizontal bands whose height
    is the median component height, then sorted left to right in each band.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise InvalidImage("mask must be 2-D")
    labels, count = ndimage.label(mask, structure=EIGHT_CONNECTED)
    if count == 0:
        return []
    comps = []
    for idx, sl in enumerate(ndimage.find_objects(labels), start=1):
        local = labels[sl] == idx
        rr, cc = np.nonzero(local)
        rr = rr + sl[0].start
        cc = cc + sl[1].start
        bbox = (sl[1].start, sl[0].start, sl[1].stop - 1, sl[0].stop - 1)
        comps.append(ConnectedComponent(rr, cc, bbox))
    band = max(1.0, float(np.median([c.height for c in comps])))

    def key(c):
        cx, cy = c.centroid
        return (int(cy // band), cx, cy)

    return sorted(comps, key=key)


def ink_bbox(mask) -> tuple[int, int, int, int] | None:
    """(min_x, min_y, max_x, max_y) of all ink, or None for an empty mask."""
    mask = np.asarray(mask, dtype=bool)
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(mask.any(axis=0))
    return int(cols[0]), int(rows[0]), int(cols[-1]), int(rows[-1])


def stroke_orientation(mask) -> float:
    """Dominant stroke orientation in degrees, image coordinates (rows grow downwards).

    Second central moments are taken around each component's own centroid
    and pooled, so the angle reflects the strokes themselves rather than
    where lines and words sit on the page.
    """
    mask = np.asarray(mask, dtype=bool)
    labels, n = ndimage.label(mask, structure=EIGHT_CONNECTED)
    rr, cc = np.nonzero(mask)
    if rr.size < 2:
        return 0.0
    lab = labels[rr, cc]
    counts = np.bincount(lab, minlength=n + 1).astype(np.float64)
    mx = np.bincount(lab, cc, minlength=n + 1) / np.maximum(counts, 1)
    my = np.bincount(lab, rr, minlength=n + 1) / np.maximum(counts, 1)
    x = cc - mx[lab]
    y = rr - my[lab]
    mu20, mu02, mu11 = np.mean(x * x), np.mean(y * y), np.mean(x * y)
    return float(np.degrees(0.5 * np.arctan2(2 * mu11, mu20 - mu02)))
