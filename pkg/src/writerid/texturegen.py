"""Compacted texture images and fixed-size block extraction.

A texture is built by translating every connected component of a page,
in reading order, into tightly packed rows. Components keep their shape
and slant; only the white space between them shrinks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BlankDocument, ConfigError, InsufficientText
from .imaging import as_gray, connected_components, ink_bbox, save_png

RAW = "raw"
TEXTURE = "texture"
SOURCE_KINDS = (RAW, TEXTURE)


@dataclass(frozen=True)
class CompactionParams:
    row_width: int = 9 * 256
    component_gap: int = 3
    row_gap: int = 2

    def __post_init__(self):
        if self.row_width < 1 or self.component_gap < 0 or self.row_gap < 0:
            raise ConfigError(f"invalid compaction parameters {self}")


@dataclass(frozen=True)
class BlockSpec:
    width: int = 256
    height: int = 256
    count: int = 9

    def __post_init__(self):
        if self.width < 32 or self.height < 32:
            raise ConfigError("blocks must be at least 32x32 pixels")
        if self.count < 2:
            raise ConfigError("at least two blocks per document are needed")

    def default_compaction(self) -> CompactionParams:
        return CompactionParams(row_width=9 * self.width)


@dataclass(frozen=True)
class TextureImage:
    pixels: np.ndarray
    source_id: str
    params: CompactionParams
    mask: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Block:
    writer_id: str
    document_id: str
    index: int
    pixels: np.ndarray = field(repr=False)
    kind: str = TEXTURE

    @property
    def filename(self) -> str:
        return f"{self.writer_id}_{self.document_id}_{self.kind}_{self.index}.png"


def _layout(comps, params):
    """Return per-component (x, y) offsets and the texture size."""
    rows, current, cursor = [], [], 0
    for comp in comps:
        w = comp.width
        needed = w if not current else cursor + params.component_gap + w
        if current and needed > params.row_width:
            rows.append(current)
            current, cursor = [], 0
            needed = w
        current.append((comp, needed - w))
        cursor = needed
    if current:
        rows.append(current)

    offsets, y, width = [], 0, 0
    for i, row in enumerate(rows):
        row_h = max(c.height for c, _ in row)
        for comp, x in row:
            offsets.append((comp, x, y))
        last, x_last = row[-1]
        width = max(width, x_last + last.width)
        y += row_h
        if i < len(rows) - 1:
            y += params.row_gap
    if len(rows) > 1:
        # wrapped rows: the canvas spans the full row width
        width = max(width, params.row_width)
    return offsets, width, y


def generate_texture(doc, mask, params: CompactionParams | None = None,
                     source_id: str = "") -> TextureImage:
    """Pack the components of ``mask`` into a dense texture.

    Each component's gray pixels (ink pixels only) are copied, translated,
    onto a white canvas. A component wider than ``row_width`` gets a row of
    its own and widens the canvas instead of being clipped. A texture that
    fits on one row is cropped to its content; wrapped textures are
    ``row_width`` wide.
    """
    doc = as_gray(doc)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != doc.shape:
        raise ConfigError("document and mask shapes differ")
    params = params or CompactionParams()
    comps = connected_components(mask)
    if not comps:
        raise BlankDocument(f"no ink found in document {source_id!r}")

    offsets, width, height = _layout(comps, params)
    out = np.full((height, width), 255, dtype=np.uint8)
    out_mask = np.zeros((height, width), dtype=bool)
    for comp, x, y in offsets:
        rr = comp.rows - comp.bbox[1] + y
        cc = comp.cols - comp.bbox[0] + x
        out[rr, cc] = doc[comp.rows, comp.cols]
        out_mask[rr, cc] = True
    return TextureImage(out, source_id, params, out_mask)


def extract_blocks(img, spec: BlockSpec, writer_id: str = "", document_id: str = "",
                   kind: str = TEXTURE) -> list[Block]:
    """Cut ``spec.count`` non-overlapping blocks row-major from the top-left."""
    img = as_gray(img)
    if kind not in SOURCE_KINDS:
        raise ConfigError(f"unknown block kind {kind!r}")
    per_row = img.shape[1] // spec.width
    per_col = img.shape[0] // spec.height
    possible = per_row * per_col
    if possible < spec.count:
        raise InsufficientText(possible, spec.count)
    blocks = []
    for i in range(spec.count):
        r, c = divmod(i, per_row)
        y, x = r * spec.height, c * spec.width
        pixels = img[y:y + spec.height, x:x + spec.width].copy()
        blocks.append(Block(writer_id, document_id, i, pixels, kind))
    return blocks


def crop_to_ink(img, mask) -> np.ndarray:
    """Crop a page to the bounding box of its ink (drops blank margins)."""
    box = ink_bbox(mask)
    if box is None:
        raise BlankDocument("page has no ink")
    x0, y0, x1, y1 = box
    return as_gray(img)[y0:y1 + 1, x0:x1 + 1]


def save_blocks(blocks, directory) -> list[Path]:
    directory = Path(directory)
    paths = []
    for b in blocks:
        path = directory / b.filename
        save_png(b.pixels, path)
        paths.append(path)
    return paths
