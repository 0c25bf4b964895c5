"""Local phase quantization.

Four short-time Fourier coefficients are taken at each pixel over a square
window, at frequencies (a, 0), (0, a), (a, a) and (a, -a) with a = 1/window.
The signs of their real and imaginary parts form an 8-bit code.
"""
from __future__ import annotations

import numpy as np

from ..errors import BlockTooSmall, ConfigError
from ..imaging import as_gray
from .histogram import HistogramFeature, TIE_TOLERANCE

# (horizontal, vertical) frequency multipliers of a = 1/window
FREQUENCIES = ((1, 0), (0, 1), (1, 1), (1, -1))


def _correlate_valid(img, row_kernel, col_kernel):
    """sum_{y,x} img[p_y + y, p_x + x] * col_kernel[y] * row_kernel[x] over valid positions."""
    k = len(row_kernel)
    h, w = img.shape
    tmp = np.zeros((h, w - k + 1), dtype=np.complex128)
    for j in range(k):
        tmp = tmp + row_kernel[j] * img[:, j:j + w - k + 1]
    out = np.zeros((h - k + 1, w - k + 1), dtype=np.complex128)
    for i in range(k):
        out = out + col_kernel[i] * tmp[i:i + h - k + 1, :]
    return out


def stft_coefficients(block, window: int = 7) -> np.ndarray:
    """Array of shape (4, H-window+1, W-window+1) with the complex coefficients."""
    img = as_gray(block).astype(np.float64)
    if window < 3 or window % 2 == 0:
        raise ConfigError("window must be an odd integer >= 3")
    if img.shape[0] < window or img.shape[1] < window:
        raise BlockTooSmall(f"{img.shape[1]}x{img.shape[0]} block smaller than window {window}")
    r = (window - 1) // 2
    x = np.arange(-r, r + 1)
    a = 1.0 / window
    ones = np.ones(window, dtype=np.complex128)
    w_pos = np.exp(-2j * np.pi * a * x)
    w_neg = np.conj(w_pos)
    kernels = {0: ones, 1: w_pos, -1: w_neg}
    return np.stack([_correlate_valid(img, kernels[u], kernels[v]) for u, v in FREQUENCIES])


def _decorrelation_matrix(window: int, rho: float = 0.9) -> np.ndarray:
    r = (window - 1) // 2
    x = np.arange(-r, r + 1)
    yy, xx = np.meshgrid(x, x, indexing="ij")
    pos = np.stack([xx.ravel(), yy.ravel()], axis=1).astype(np.float64)
    dist = np.sqrt(((pos[:, None, :] - pos[None, :, :]) ** 2).sum(-1))
    cov = rho ** dist
    a = 1.0 / window
    rows = []
    for u, v in FREQUENCIES:
        basis = np.exp(-2j * np.pi * a * (u * xx + v * yy)).ravel()
        rows.append(basis)
    rows = np.array(rows)
    m = np.vstack([rows.real, rows.imag])
    d = m @ cov @ m.T
    _, _, vt = np.linalg.svd(d)
    return vt


def lpq_codes(block, window: int = 7, decorrelate: bool = False) -> np.ndarray:
    coeffs = stft_coefficients(block, window)
    parts = np.concatenate([coeffs.real, coeffs.imag])  # bit k <- parts[k]
    if decorrelate:
        vt = _decorrelation_matrix(window)
        parts = np.tensordot(vt, parts, axes=(1, 0))
    codes = np.zeros(parts.shape[1:], dtype=np.int64)
    for k in range(8):
        codes |= (parts[k] >= -TIE_TOLERANCE).astype(np.int64) << k
    return codes


def lpq_histogram(block, window: int = 7, decorrelate: bool = False,
                  normalize: bool = False) -> HistogramFeature:
    codes = lpq_codes(block, window, decorrelate)
    counts = np.bincount(codes.ravel(), minlength=256).astype(np.float64)
    feat = HistogramFeature("lpq", counts)
    return feat.l1() if normalize else feat
