from collections import Counter

import numpy as np
import pytest

from writerid.errors import BlankDocument, ConfigError, InsufficientText
from writerid.imaging import binarize, connected_components, stroke_orientation
from writerid.protocol.synth import document_nuisance, render_page, writer_style
from writerid.texturegen import (RAW, BlockSpec, CompactionParams, crop_to_ink,
                                 extract_blocks, generate_texture, save_blocks)


def _page(writer=3, seed=0):
    style = writer_style(seed, writer)
    return render_page(style, document_nuisance(seed, writer, 0, 0.3),
                       np.random.default_rng(seed))


def test_single_component_is_its_bounding_box():
    doc = np.full((40, 40), 255, dtype=np.uint8)
    doc[10:15, 20:28] = 30
    doc[12, 22] = 60
    tex = generate_texture(doc, doc < 128)
    assert tex.pixels.shape == (5, 8)
    assert np.array_equal(tex.pixels, doc[10:15, 20:28])


def test_gap_between_components():
    doc = np.full((20, 140), 255, dtype=np.uint8)
    doc[5:15, 5:15] = 0
    doc[5:15, 115:125] = 0
    tex = generate_texture(doc, doc < 128, CompactionParams(row_width=100, component_gap=3))
    cols = np.flatnonzero(tex.mask.any(axis=0))
    assert tex.pixels.shape == (10, 23)
    assert cols.tolist() == list(range(10)) + list(range(13, 23))


def test_wide_component_gets_own_row():
    doc = np.full((30, 80), 255, dtype=np.uint8)
    doc[2:5, 2:5] = 0
    doc[10:13, 0:70] = 0
    tex = generate_texture(doc, doc < 128, CompactionParams(row_width=40, row_gap=2))
    assert tex.pixels.shape == (3 + 2 + 3, 70)
    assert tex.mask[5:8].sum() == 3 * 70


def test_blank_document():
    with pytest.raises(BlankDocument):
        generate_texture(np.full((8, 8), 255, np.uint8), np.zeros((8, 8), bool))


def test_texture_properties_on_a_page():
    page = _page()
    mask = binarize(page)
    tex = generate_texture(page, mask, CompactionParams(row_width=9 * 64))
    # denser than the page
    assert tex.mask.mean() >= mask.mean()
    # translation keeps every component's size
    before = Counter(c.size for c in connected_components(mask))
    after = Counter(c.size for c in connected_components(tex.mask))
    assert before == after
    # copied gray values are the original ink pixels
    assert Counter(page[mask].tolist()) == Counter(tex.pixels[tex.mask].tolist())
    assert abs(stroke_orientation(tex.mask) - stroke_orientation(mask)) <= 5.0


def test_blocks_tile_exactly():
    img = np.arange(96 * 96).reshape(96, 96) % 251
    img = img.astype(np.uint8)
    blocks = extract_blocks(img, BlockSpec(32, 32, 9), "w", "d")
    assert [b.index for b in blocks] == list(range(9))
    assert np.array_equal(blocks[0].pixels, img[:32, :32])
    assert np.array_equal(blocks[8].pixels, img[64:, 64:])
    for b in blocks:
        r, c = divmod(b.index, 3)
        assert np.array_equal(b.pixels, img[32 * r:32 * r + 32, 32 * c:32 * c + 32])


def test_blocks_single_row():
    img = np.random.default_rng(0).integers(0, 256, (32, 320)).astype(np.uint8)
    blocks = extract_blocks(img, BlockSpec(32, 32, 9))
    for i, b in enumerate(blocks):
        assert np.array_equal(b.pixels, img[:, 32 * i:32 * (i + 1)])


def test_insufficient_text_reports_possible_blocks():
    with pytest.raises(InsufficientText) as err:
        extract_blocks(np.zeros((32, 32), np.uint8), BlockSpec(32, 32, 9))
    assert err.value.possible == 1 and err.value.required == 9


def test_block_spec_validation():
    with pytest.raises(ConfigError):
        BlockSpec(16, 64)
    with pytest.raises(ConfigError):
        BlockSpec(64, 64, 1)


def test_crop_and_save(tmp_path):
    page = _page()
    raw = crop_to_ink(page, binarize(page))
    blocks = extract_blocks(raw, BlockSpec(64, 64, 9), "w001", "d2", RAW)
    paths = save_blocks(blocks, tmp_path)
    assert paths[4].name == "w001_d2_raw_4.png"
    assert all(p.is_file() for p in paths)


def test_orientation_tracks_slant():
    # the same glyph sheared two ways gives clearly different orientations
    mask = np.zeros((40, 80), dtype=bool)
    for k in range(4):
        for r in range(30):
            mask[5 + r, 10 + 15 * k + r // 3] = True
    flipped = mask[:, ::-1]
    assert abs(stroke_orientation(mask) - stroke_orientation(flipped)) > 20
