"""Synthetic handwriting-like corpora with writer styles and per-document nuisance.

Every writer draws a persistent style: stroke slant, pen thickness, glyph
size, letter spacing and pen darkness. Every document then gets a nuisance
transform (contrast scale, stroke-thickness jitter, background tint) whose
magnitude is proportional to ``nuisance_strength``. At strength 0 all of a
writer's documents share identical rendering parameters and differ only in
glyph shapes and pixel noise.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..imaging import save_png
from .manifest import SampleRecord, write_manifest

PAGE_WIDTH = 640
PAGE_HEIGHT = 520
PIXEL_NOISE = 5.0


@dataclass(frozen=True)
class WriterStyle:
    slant: float  # radians, positive leans right
    thickness: float  # pen radius in pixels
    height: float
    width: float
    spacing: float
    ink: float  # gray level of a fully inked pixel
    strokes: int  # curve segments per glyph


@dataclass(frozen=True)
class Nuisance:
    contrast: float = 1.0
    thickness_jitter: float = 0.0
    tint: float = 0.0


def _writer_rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))


def writer_style(style_seed: int, writer: int) -> WriterStyle:
    rng = _writer_rng(style_seed, 0, writer)
    return WriterStyle(
        slant=float(np.radians(rng.uniform(-35, 35))),
        thickness=float(rng.uniform(0.7, 2.4)),
        height=float(rng.uniform(9, 17)),
        width=float(rng.uniform(6, 13)),
        spacing=float(rng.uniform(2, 7)),
        ink=float(rng.uniform(10, 90)),
        strokes=int(rng.integers(2, 5)),
    )


def document_nuisance(style_seed: int, writer: int, doc: int, strength: float) -> Nuisance:
    rng = _writer_rng(style_seed, 1, writer, doc)
    u = rng.uniform(-1, 1, size=3)
    return Nuisance(
        contrast=float(1.0 + 0.45 * strength * u[0]),
        thickness_jitter=float(1.6 * strength * u[1]),
        tint=float(60.0 * strength * (u[2] + 1) / 2),
    )


def _segment_distance(px, py, x0, y0, x1, y1):
    """Distance from points (px, py) to each segment; shape (points, segments)."""
    dx, dy = x1 - x0, y1 - y0
    len2 = np.maximum(dx * dx + dy * dy, 1e-12)
    t = ((px[:, None] - x0) * dx + (py[:, None] - y0) * dy) / len2
    t = np.clip(t, 0.0, 1.0)
    cx = x0 + t * dx
    cy = y0 + t * dy
    return np.hypot(px[:, None] - cx, py[:, None] - cy)


def _glyph(style: WriterStyle, radius: float, rng) -> np.ndarray:
    """Ink coverage in [0, 1] for one glyph on its own small canvas."""
    h, w = style.height * rng.uniform(0.8, 1.2), style.width * rng.uniform(0.7, 1.3)
    pts = [(rng.uniform(0, w), rng.uniform(0, h)) for _ in range(style.strokes + 1)]
    curve = []
    for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
        mx = (ax + bx) / 2 + rng.uniform(-w / 3, w / 3)
        my = (ay + by) / 2 + rng.uniform(-h / 3, h / 3)
        t = np.linspace(0, 1, 8)[:, None]
        seg = (1 - t) ** 2 * np.array([ax, ay]) + 2 * (1 - t) * t * np.array([mx, my]) \
            + t ** 2 * np.array([bx, by])
        curve.append(seg if not curve else seg[1:])
    curve = np.vstack(curve)
    shear = np.tan(style.slant)
    x = curve[:, 0] + (h - curve[:, 1]) * shear
    y = curve[:, 1]
    pad = radius + 2
    x = x - x.min() + pad
    y = y - y.min() + pad
    cw, ch = int(np.ceil(x.max() + pad)), int(np.ceil(y.max() + pad))
    yy, xx = np.mgrid[0:ch, 0:cw]
    dist = _segment_distance(xx.ravel() + 0.5, yy.ravel() + 0.5, x[:-1], y[:-1], x[1:], y[1:])
    cover = np.clip(radius + 0.5 - dist.min(axis=1), 0.0, 1.0)
    return cover.reshape(ch, cw)


def render_page(style: WriterStyle, nuisance: Nuisance, rng,
                width: int = PAGE_WIDTH, height: int = PAGE_HEIGHT) -> np.ndarray:
    radius = max(0.35, style.thickness + nuisance.thickness_jitter)
    background = 255.0 - nuisance.tint
    depth = np.clip((background - style.ink) * nuisance.contrast, 30.0, background)
    cover = np.zeros((height, width))
    line_h = int(style.height * 1.9 + 2 * radius + 6)
    margin = 16
    y = margin
    while y + line_h < height - margin:
        x = margin + rng.uniform(0, 10)
        while True:
            n_glyphs = int(rng.integers(2, 7))
            glyphs = [_glyph(style, radius, rng) for _ in range(n_glyphs)]
            word_w = sum(g.shape[1] for g in glyphs) + style.spacing * (n_glyphs - 1)
            if x + word_w > width - margin:
                break
            for g in glyphs:
                gy = int(y + line_h - g.shape[0] - rng.uniform(0, 3))
                gx = int(round(x))
                region = cover[gy:gy + g.shape[0], gx:gx + g.shape[1]]
                np.maximum(region, g[:region.shape[0], :region.shape[1]], out=region)
                x += g.shape[1] + style.spacing
            x += 3 * style.spacing + rng.uniform(4, 10)
        y += line_h
    page = background - depth * cover + rng.normal(0.0, PIXEL_NOISE, size=cover.shape)
    return np.clip(np.rint(page), 0, 255).astype(np.uint8)


def synth_corpus(out_dir, writers: int, docs_per_writer: int, style_seed: int = 0,
                 nuisance_strength: float = 0.5) -> list[SampleRecord]:
    """Render a corpus into ``out_dir`` and write ``out_dir/manifest.csv``."""
    if writers < 2:
        raise ConfigError("need at least two writers")
    if docs_per_writer < 1:
        raise ConfigError("need at least one document per writer")
    if not 0.0 <= nuisance_strength <= 1.0:
        raise ConfigError("nuisance strength must lie in [0, 1]")
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    records = []
    for w in range(writers):
        style = writer_style(style_seed, w)
        for d in range(docs_per_writer):
            nuisance = document_nuisance(style_seed, w, d, nuisance_strength)
            rng = _writer_rng(style_seed, 2, w, d)
            page = render_page(style, nuisance, rng)
            writer_id, doc_id = f"w{w:03d}", f"d{d + 1}"
            rel = f"images/{writer_id}_{doc_id}.png"
            save_png(page, out_dir / rel)
            records.append(SampleRecord(writer_id, doc_id, d + 1, rel))
    write_manifest(records, out_dir / "manifest.csv")
    return records
