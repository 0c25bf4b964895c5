"""SURF keypoints: Fast-Hessian detection with box filters on an integral
image, Haar-wavelet orientation, and the 64-value descriptor.

Intensities are scaled to [0, 1] and filter responses are divided by the
filter area, so the default threshold is resolution independent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..errors import BlockTooSmall
from ..imaging import IntegralImage, as_gray, integral_image

DEFAULT_THRESHOLD = 4e-4
MIN_BLOCK = 32
INTERVALS = 4


@dataclass(frozen=True)
class SurfKeypoint:
    x: float
    y: float
    scale: float
    orientation: float
    laplacian: int
    descriptor: np.ndarray = field(repr=False)
    response: float = 0.0

    @property
    def position(self) -> tuple[float, float]:
        return self.x, self.y


def filter_size(octave: int, interval: int) -> int:
    """9, 15, 21, 27 for octave 0; 15, 27, 39, 51 for octave 1; ..."""
    return 3 * ((2 ** (octave + 1)) * (interval + 1) + 1)


def _box(ii: IntegralImage, row, col, rows, cols):
    return ii.box(row, col, rows, cols).astype(np.float64)


def hessian_layer(ii: IntegralImage, size: int, step: int):
    """Determinant-of-Hessian responses and Laplacian signs on a ``step`` grid."""
    h, w = ii.height, ii.width
    lobe = size // 3
    border = (size - 1) // 2
    norm = 1.0 / (size * size * 255.0)
    r = np.arange(0, h, step)[:, None]
    c = np.arange(0, w, step)[None, :]
    dxx = (_box(ii, r - lobe + 1, c - border, 2 * lobe - 1, size)
           - 3 * _box(ii, r - lobe + 1, c - lobe // 2, 2 * lobe - 1, lobe))
    dyy = (_box(ii, r - border, c - lobe + 1, size, 2 * lobe - 1)
           - 3 * _box(ii, r - lobe // 2, c - lobe + 1, lobe, 2 * lobe - 1))
    dxy = (_box(ii, r - lobe, c + 1, lobe, lobe) + _box(ii, r + 1, c - lobe, lobe, lobe)
           - _box(ii, r - lobe, c - lobe, lobe, lobe) - _box(ii, r + 1, c + 1, lobe, lobe))
    dxx, dyy, dxy = dxx * norm, dyy * norm, dxy * norm
    det = dxx * dyy - 0.81 * dxy * dxy
    sign = np.where(dxx + dyy >= 0, 1, -1)
    return det, sign


_NEIGHBOURS = np.ones((3, 3, 3), dtype=bool)
_NEIGHBOURS[1, 1, 1] = False


def _interpolate(stack, m, r, c):
    """Quadratic fit around (layer m, row r, col c); returns (dx, dy, ds) or None."""
    b, t = stack[m - 1], stack[m + 1]
    mid = stack[m]
    v = mid[r, c]
    grad = np.array([
        (mid[r, c + 1] - mid[r, c - 1]) / 2.0,
        (mid[r + 1, c] - mid[r - 1, c]) / 2.0,
        (t[r, c] - b[r, c]) / 2.0,
    ])
    dxx = mid[r, c + 1] + mid[r, c - 1] - 2 * v
    dyy = mid[r + 1, c] + mid[r - 1, c] - 2 * v
    dss = t[r, c] + b[r, c] - 2 * v
    dxy = (mid[r + 1, c + 1] - mid[r + 1, c - 1] - mid[r - 1, c + 1] + mid[r - 1, c - 1]) / 4.0
    dxs = (t[r, c + 1] - t[r, c - 1] - b[r, c + 1] + b[r, c - 1]) / 4.0
    dys = (t[r + 1, c] - t[r - 1, c] - b[r + 1, c] + b[r - 1, c]) / 4.0
    hess = np.array([[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]])
    try:
        offset = -np.linalg.solve(hess, grad)
    except np.linalg.LinAlgError:
        return None
    if np.all(np.abs(offset) < 0.5):
        return offset
    return None


def detect(ii: IntegralImage, threshold: float = DEFAULT_THRESHOLD, octaves: int = 4,
           init_step: int = 1):
    """Fast-Hessian interest points as (x, y, scale, laplacian, response) tuples."""
    found = []
    h, w = ii.height, ii.width
    for o in range(octaves):
        step = init_step * 2 ** o
        sizes = [filter_size(o, i) for i in range(INTERVALS)]
        layers = [hessian_layer(ii, s, step) for s in sizes]
        stack = np.stack([det for det, _ in layers])
        neigh_max = ndimage.maximum_filter(stack, footprint=_NEIGHBOURS, mode="constant",
                                           cval=-np.inf)
        for m in range(1, INTERVALS - 1):
            border = (sizes[m + 1] + 1) // (2 * step)
            rows, cols = stack.shape[1:]
            if rows - border <= border + 1 or cols - border <= border + 1:
                continue
            cand = np.zeros((rows, cols), dtype=bool)
            cand[border + 1:rows - border, border + 1:cols - border] = True
            # only compare against the three layers centred on m
            cand &= stack[m] >= threshold
            cand &= stack[m] > neigh_max[m]
            for r, c in zip(*np.nonzero(cand)):
                if r + 1 >= rows or c + 1 >= cols:
                    continue
                offset = _interpolate(stack, m, r, c)
                if offset is None:
                    continue
                x = (c + offset[0]) * step
                y = (r + offset[1]) * step
                if not (0 <= x < w and 0 <= y < h):
                    continue
                filter_step = sizes[m] - sizes[m - 1]
                scale = 0.1333 * (sizes[m] + offset[2] * filter_step)
                if scale <= 0:
                    continue
                found.append((float(x), float(y), float(scale), int(layers[m][1][r, c]),
                              float(stack[m][r, c])))
    return found


def haar_x(ii, row, col, size):
    half = size // 2
    return _box(ii, row - half, col, size, half) - _box(ii, row - half, col - half, size, half)


def haar_y(ii, row, col, size):
    half = size // 2
    return _box(ii, row, col - half, half, size) - _box(ii, row - half, col - half, half, size)


def _orientation(ii, x, y, scale):
    s = max(1, int(round(scale)))
    i, j = np.meshgrid(np.arange(-6, 7), np.arange(-6, 7), indexing="ij")
    keep = i * i + j * j < 36
    i, j = i[keep], j[keep]
    gauss = np.exp(-(i * i + j * j) / (2 * 2.5 ** 2))
    row = int(round(y)) + j * s
    col = int(round(x)) + i * s
    rx = gauss * haar_x(ii, row, col, 4 * s)
    ry = gauss * haar_y(ii, row, col, 4 * s)
    angles = np.mod(np.arctan2(ry, rx), 2 * np.pi)
    best, best_angle = -1.0, 0.0
    for start in np.arange(0.0, 2 * np.pi, 0.15):
        rel = np.mod(angles - start, 2 * np.pi)
        inside = rel < np.pi / 3
        sx, sy = rx[inside].sum(), ry[inside].sum()
        mag = sx * sx + sy * sy
        if mag > best:
            best, best_angle = mag, float(np.arctan2(sy, sx))
    return float(np.mod(best_angle, 2 * np.pi))


def _descriptor(ii, x, y, scale, theta):
    co, si = np.cos(theta), np.sin(theta)
    haar = 2 * max(1, int(round(scale)))
    sub = np.arange(4)
    smp = np.arange(5)
    # u runs along the keypoint's x axis, v along its y axis
    ui, uk = np.meshgrid(sub, smp, indexing="ij")
    offs = (-10 + 5 * ui + uk + 0.5).ravel()  # 20 positions, subregion-major
    u = np.repeat(offs[None, :], 20, axis=0) * scale
    v = np.repeat(offs[:, None], 20, axis=1) * scale
    px = x + u * co - v * si
    py = y + u * si + v * co
    weight = np.exp(-(u * u + v * v) / (2 * (3.3 * scale) ** 2))
    rows = np.rint(py).astype(np.int64)
    cols = np.rint(px).astype(np.int64)
    rx = haar_x(ii, rows, cols, haar)
    ry = haar_y(ii, rows, cols, haar)
    dx = weight * (rx * co + ry * si)
    dy = weight * (-rx * si + ry * co)
    # (v index, u index) -> subregion (v // 5, u // 5)
    dx = dx.reshape(4, 5, 4, 5)
    dy = dy.reshape(4, 5, 4, 5)
    desc = np.stack([dx.sum(axis=(1, 3)), np.abs(dx).sum(axis=(1, 3)),
                     dy.sum(axis=(1, 3)), np.abs(dy).sum(axis=(1, 3))], axis=-1)
    desc = desc.reshape(64)
    norm = np.linalg.norm(desc)
    if norm == 0 or not np.isfinite(norm):
        return None
    return desc / norm


def surf_keypoints(block, hessian_threshold: float = DEFAULT_THRESHOLD,
                   max_keypoints: int | None = None, octaves: int = 4,
                   init_step: int = 1) -> list[SurfKeypoint]:
    """Detect and describe SURF keypoints in ``block``.

    With ``max_keypoints`` set, only the strongest responses are kept and the
    result is ordered by decreasing response.
    """
    img = as_gray(block)
    if img.shape[0] < MIN_BLOCK or img.shape[1] < MIN_BLOCK:
        raise BlockTooSmall(f"SURF needs at least {MIN_BLOCK}x{MIN_BLOCK} pixels")
    ii = integral_image(img)
    points = detect(ii, hessian_threshold, octaves, init_step)
    if max_keypoints is not None and len(points) > max_keypoints:
        order = sorted(range(len(points)), key=lambda k: -points[k][4])
        points = [points[k] for k in order[:max_keypoints]]
    out = []
    for x, y, scale, lap, resp in points:
        theta = _orientation(ii, x, y, scale)
        desc = _descriptor(ii, x, y, scale, theta)
        if desc is None:
            continue
        out.append(SurfKeypoint(x, y, scale, theta, lap, desc, resp))
    return out


def aggregate_surf(keypoints) -> np.ndarray:
    """One 65-value row per keypoint: descriptor followed by the Laplacian sign."""
    if not keypoints:
        return np.zeros((0, 65))
    return np.array([np.append(k.descriptor, float(k.laplacian)) for k in keypoints])
