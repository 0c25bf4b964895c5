"""Document -> blocks -> features, shared by the CLI and the test harness."""
from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .descriptors import aggregate_surf, lbp_histogram, lpq_histogram, surf_keypoints
from .descriptors.cache import FeatureStore
from .errors import ConfigError, ConstantImage, BlankDocument
from .imaging import binarize, load_image
from .texturegen import (RAW, TEXTURE, BlockSpec, CompactionParams, crop_to_ink,
                         extract_blocks, generate_texture, save_blocks)
from .imaging import save_png

log = logging.getLogger(__name__)

DESCRIPTORS = ("lbp", "lpq", "surf")


@dataclass(frozen=True)
class FeatureConfig:
    descriptor: str = "lbp"
    block: BlockSpec = field(default_factory=BlockSpec)
    compaction: CompactionParams | None = None
    lbp_radius: int = 1
    lbp_neighbors: int = 8
    lbp_uniform: bool = False
    lpq_window: int = 7
    lpq_decorrelate: bool = False
    surf_threshold: float = 4e-4
    surf_max_keypoints: int | None = 32

    def __post_init__(self):
        if self.descriptor not in DESCRIPTORS:
            raise ConfigError(f"unknown descriptor {self.descriptor!r}")

    @property
    def block_kind(self) -> str:
        return RAW if self.descriptor == "surf" else TEXTURE

    @property
    def params(self) -> CompactionParams:
        return self.compaction or self.block.default_compaction()

    def fingerprint(self) -> str:
        return repr((self.descriptor, self.block, self.params, self.lbp_radius,
                     self.lbp_neighbors, self.lbp_uniform, self.lpq_window,
                     self.lpq_decorrelate, self.surf_threshold, self.surf_max_keypoints))


def document_blocks(img, writer_id, document_id, cfg: FeatureConfig, image_dir=None):
    """Blocks of one page: texture blocks for LBP/LPQ, ink-cropped raw blocks for SURF."""
    try:
        mask = binarize(img)
    except ConstantImage:
        raise BlankDocument(f"document {writer_id}/{document_id} is blank") from None
    if cfg.block_kind == TEXTURE:
        tex = generate_texture(img, mask, cfg.params, f"{writer_id}/{document_id}")
        source = tex.pixels
        if image_dir is not None:
            save_png(source, Path(image_dir) / f"{writer_id}_{document_id}_texture_full.png")
    else:
        source = crop_to_ink(img, mask)
    blocks = extract_blocks(source, cfg.block, writer_id, document_id, cfg.block_kind)
    if image_dir is not None:
        save_blocks(blocks, image_dir)
    return blocks


def block_features(pixels, cfg: FeatureConfig) -> np.ndarray:
    """(instances, dim) feature matrix of one block."""
    if cfg.descriptor == "lbp":
        h = lbp_histogram(pixels, cfg.lbp_radius, cfg.lbp_neighbors, cfg.lbp_uniform,
                          normalize=True)
        return h.bins[None, :]
    if cfg.descriptor == "lpq":
        h = lpq_histogram(pixels, cfg.lpq_window, cfg.lpq_decorrelate, normalize=True)
        return h.bins[None, :]
    kps = surf_keypoints(pixels, cfg.surf_threshold, cfg.surf_max_keypoints)
    return aggregate_surf(kps)


def _record_features(args):
    path, writer, doc, cfg, image_dir = args
    img = load_image(path)
    blocks = document_blocks(img, writer, doc, cfg, image_dir)
    return [((writer, doc, b.index), block_features(b.pixels, cfg)) for b in blocks]


def extract_features(records, base_dir, cfg: FeatureConfig, workers: int = 1,
                     image_dir=None) -> FeatureStore:
    """Features for every block of every record; order-independent of ``workers``."""
    base_dir = Path(base_dir)
    jobs = [(r.resolved_path(base_dir), r.writer_id, r.document_id, cfg, image_dir)
            for r in records]
    store = FeatureStore(cfg.descriptor)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_record_features, jobs))
    else:
        results = [_record_features(j) for j in jobs]
    for items in results:
        for key, arr in items:
            store[key] = arr
    return store


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def feature_key(records, base_dir, cfg: FeatureConfig) -> str:
    """Hash of input image contents plus the feature configuration."""
    h = hashlib.sha256(cfg.fingerprint().encode())
    for r in sorted(records, key=lambda r: (r.writer_id, r.document_id)):
        h.update(f"{r.writer_id}\x1f{r.document_id}\x1f".encode())
        h.update(file_digest(r.resolved_path(Path(base_dir))).encode())
    return h.hexdigest()[:24]
