"""Slow, direct reference implementations used as test oracles."""
import math

import numpy as np

TIE = 1e-9


def lbp_oracle(block, radius=1, neighbors=8):
    """Per-pixel circular sampling with textbook bilinear weights."""
    img = np.asarray(block, dtype=np.float64)
    h, w = img.shape
    hist = np.zeros(1 << neighbors, dtype=np.int64)
    for r in range(radius, h - radius):
        for c in range(radius, w - radius):
            center = img[r, c]
            code = 0
            for i in range(neighbors):
                ang = 2 * math.pi * i / neighbors
                x = c + round(radius * math.cos(ang), 12)
                y = r - round(radius * math.sin(ang), 12)
                x0, y0 = math.floor(x), math.floor(y)
                fx, fy = x - x0, y - y0
                x1, y1 = min(x0 + 1, w - 1), min(y0 + 1, h - 1)
                v = ((1 - fx) * (1 - fy) * img[y0, x0] + fx * (1 - fy) * img[y0, x1]
                     + (1 - fx) * fy * img[y1, x0] + fx * fy * img[y1, x1])
                if v - center >= -TIE:
                    code |= 1 << i
            hist[code] += 1
    return hist


def lpq_oracle(block, window=7):
    """Windowed DFT evaluated term by term at every valid pixel."""
    img = np.asarray(block, dtype=np.float64)
    h, w = img.shape
    r = (window - 1) // 2
    a = 1.0 / window
    freqs = [(a, 0.0), (0.0, a), (a, a), (a, -a)]
    hist = np.zeros(256, dtype=np.int64)
    for py in range(r, h - r):
        for px in range(r, w - r):
            coeffs = []
            for u, v in freqs:
                acc = 0j
                for dy in range(-r, r + 1):
                    for dx in range(-r, r + 1):
                        acc += img[py + dy, px + dx] * np.exp(-2j * np.pi * (u * dx + v * dy))
                coeffs.append(acc)
            code = 0
            for j, f in enumerate(coeffs):
                if f.real >= -TIE:
                    code |= 1 << j
                if f.imag >= -TIE:
                    code |= 1 << (j + 4)
            hist[code] += 1
    return hist


def det_hessian_peak(img, sigmas=(2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0)):
    """(x, y, sigma) maximising the scale-normalised Gaussian det-of-Hessian."""
    from scipy import ndimage
    f = np.asarray(img, dtype=np.float64)
    best = (-np.inf, None)
    for s in sigmas:
        dxx = ndimage.gaussian_filter(f, s, order=(0, 2))
        dyy = ndimage.gaussian_filter(f, s, order=(2, 0))
        dxy = ndimage.gaussian_filter(f, s, order=(1, 1))
        det = s ** 4 * (dxx * dyy - dxy ** 2)
        k = np.unravel_index(np.argmax(det), det.shape)
        if det[k] > best[0]:
            best = (det[k], (k[1], k[0], s))
    return best[1]


def qp_enumeration(gram, y, C):
    """Exact SVM dual by enumerating which alphas sit at 0, at C, or free.

    For every free set the equality-constrained KKT system is factored once
    and solved for all 0/C assignments of the remaining variables together;
    the best feasible point over all 3^n patterns is returned.
    """
    import itertools
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    Q = gram * np.outer(y, y)
    best_obj, best_alpha = -np.inf, None
    for k in range(n + 1):
        for F in itertools.combinations(range(n), k):
            F = np.array(F, dtype=int)
            B = np.setdiff1d(np.arange(n), F)
            # every 0/C pattern of the bound variables, one row each
            pats = np.array(list(itertools.product((0.0, C), repeat=len(B))), dtype=np.float64)
            pats = pats.reshape(2 ** len(B), len(B))
            alpha = np.zeros((len(pats), n))
            alpha[:, B] = pats
            if k:
                # KKT: Q_FF a_F + y_F mu = 1 - Q_FB a_B ; y_F . a_F = -y_B . a_B
                A = np.zeros((k + 1, k + 1))
                A[:k, :k] = Q[np.ix_(F, F)]
                A[:k, k] = y[F]
                A[k, :k] = y[F]
                rhs = np.zeros((k + 1, len(pats)))
                rhs[:k] = 1.0 - Q[np.ix_(F, B)] @ pats.T
                rhs[k] = -(pats @ y[B])
                sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
                alpha[:, F] = sol[:k].T
            ok = ((alpha >= -1e-9) & (alpha <= C + 1e-9)).all(axis=1)
            ok &= np.abs(alpha @ y) <= 1e-7
            if not ok.any():
                continue
            cand = np.clip(alpha[ok], 0.0, C)
            obj = cand.sum(axis=1) - 0.5 * np.einsum("ij,jk,ik->i", cand, Q, cand)
            i = int(np.argmax(obj))
            if obj[i] > best_obj:
                best_obj, best_alpha = float(obj[i]), cand[i]
    return best_obj, best_alpha


def gaussian_blob(size=64, sigma=4.0, center=None, depth=200.0):
    cy, cx = center if center is not None else ((size - 1) / 2, (size - 1) / 2)
    yy, xx = np.mgrid[0:size, 0:size]
    g = np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sigma ** 2))
    return np.clip(np.rint(255 - depth * g), 0, 255).astype(np.uint8)
