from dataclasses import replace

import pytest

from writerid.cli import main
from writerid.config import dump_config, load_config
from writerid.errors import ConfigError
from writerid.pipeline import FeatureConfig, block_features, document_blocks
from writerid.protocol.manifest import SampleRecord, write_manifest
from writerid.protocol.splits import WITH_DF, WITHOUT_DF, plan_splits, save_plan
from writerid.texturegen import BlockSpec

SMALL = ["--block-width", "64", "--block-height", "64"]


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert main(["synth", str(root), "--writers", "4", "--docs", "2", "--seed", "1"]) == 0
    return root


def test_config_file_and_overrides(tmp_path):
    (tmp_path / "run.ini").write_text("[data]\nmanifest = m.csv\n[blocks]\nblock_width = 64\n"
                                      "[classifier]\nc_grid = 1, 4\n")
    cfg = load_config(tmp_path / "run.ini", {"block_width": "96", "modes": "with-df"})
    assert cfg.manifest == str(tmp_path / "m.csv")
    assert cfg.block_width == 96 and cfg.c_grid == (1.0, 4.0) and cfg.modes == ("with-df",)
    assert cfg.compaction().row_width == 9 * 96
    again = tmp_path / "again.ini"
    again.write_text(dump_config(cfg))
    back = load_config(again)
    # relative paths resolve against the config file's directory
    assert back.cache_dir == str(tmp_path / "cache")
    assert replace(back, cache_dir="cache", output_dir="results") == cfg


@pytest.mark.parametrize("text", ["[bogus]\nx = 1\n", "[blocks]\nblock_size = 3\n",
                                  "[blocks]\nblock_count = 1\n", "[run]\nmodes = maybe\n",
                                  "[descriptors]\nlbp_uniform = perhaps\n"])
def test_config_errors(tmp_path, text):
    (tmp_path / "bad.ini").write_text(text)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.ini")


def test_pipeline_blocks_and_features(corpus):
    from writerid.imaging import load_image
    img = load_image(corpus / "images" / "w000_d1.png")
    for desc, dim in (("lbp", 256), ("lpq", 256), ("surf", 65)):
        cfg = FeatureConfig(desc, BlockSpec(64, 64, 9))
        blocks = document_blocks(img, "w000", "d1", cfg)
        assert len(blocks) == 9 and blocks[0].kind == cfg.block_kind
        feats = block_features(blocks[0].pixels, cfg)
        assert feats.shape[1] == dim
        if desc != "surf":
            assert abs(feats.sum() - 1) < 1e-12


def test_ingest(tmp_path, capsys):
    recs = []
    for w, n in enumerate([1, 1, 1, 2, 2, 3]):
        for d in range(n):
            recs.append(SampleRecord(f"w{w}", f"d{d}", d, "x.png"))
    write_manifest(recs, tmp_path / "m.csv")
    assert main(["ingest", "--manifest", str(tmp_path / "m.csv"), "--verify-paths", "no",
                 "--subset", "all"]) == 0
    out = capsys.readouterr().out
    assert "1 doc: 3 writers, 2 docs: 2, 3 docs: 1" in out
    (tmp_path / "empty.csv").write_text("writer_id,document_id,sequence,image_path\n")
    assert main(["ingest", "--manifest", str(tmp_path / "empty.csv")]) == 3


def test_audit_exit_codes(tmp_path, capsys):
    def records(counts):
        return [SampleRecord(f"w{w}", f"d{d}", d, "x") for w, n in enumerate(counts)
                for d in range(n)]

    save_plan(plan_splits(records([2, 2]), WITH_DF), tmp_path / "clean.csv")
    save_plan(plan_splits(records([2, 2]), WITHOUT_DF), tmp_path / "leaky.csv")
    save_plan(plan_splits(records([1, 2]), WITH_DF), tmp_path / "fallback.csv")
    assert main(["audit", str(tmp_path / "clean.csv")]) == 0
    assert capsys.readouterr().out == "fold,writer_id,document_id,tag\n"
    assert main(["audit", str(tmp_path / "leaky.csv")]) == 1
    assert "1,w0,d0,leak" in capsys.readouterr().out
    assert main(["audit", str(tmp_path / "fallback.csv")]) == 0
    assert "warning" in capsys.readouterr().err
    assert main(["audit", "--strict", str(tmp_path / "fallback.csv")]) == 1
    assert main(["audit", str(tmp_path / "nope.csv")]) == 3


def test_config_error_exit_code(corpus):
    assert main(["run", "--manifest", str(corpus / "manifest.csv"), "--block-width", "8"]) == 2
    assert main(["run", "--manifest", str(corpus / "manifest.csv"), "--descriptors", "hog"]) == 2


def test_missing_image_names_path(tmp_path, capsys):
    write_manifest([SampleRecord("w1", "d1", 1, "gone.png")], tmp_path / "m.csv")
    assert main(["run", "--manifest", str(tmp_path / "m.csv"), "--cache-dir",
                 str(tmp_path / "c")]) == 3
    err = capsys.readouterr().err
    assert "ingest" in err and "gone.png" in err


def test_stages_and_run(corpus, tmp_path, capsys):
    base = ["--manifest", str(corpus / "manifest.csv"), "--cache-dir", str(tmp_path / "cache"),
            "--output-dir", str(tmp_path / "out"), "--c-grid", "2,32", "--gamma-grid",
            "0.125,2", *SMALL]
    assert main(["texture", *base]) == 0
    assert len(list((tmp_path / "cache" / "textures").glob("*/*_texture_*.png"))) == 8 * 10
    assert main(["features", *base]) == 0
    assert main(["plan", *base]) == 0
    assert main(["train", *base]) == 0
    models = sorted((tmp_path / "cache" / "models").iterdir())
    assert models
    assert main(["evaluate", *base]) == 0
    report = (tmp_path / "out" / "report.csv").read_text()
    assert main(["run", *base]) == 0
    # everything came from the cache
    assert sorted((tmp_path / "cache" / "models").iterdir()) == models
    assert (tmp_path / "out" / "report.csv").read_text() == report
    lines = report.splitlines()
    assert len(lines) == 3 and lines[1].endswith(lines[2].rsplit(",", 1)[1])
    assert (tmp_path / "out" / "audit-with-df.csv").read_text() == "fold,writer_id,document_id,tag\n"
    out = capsys.readouterr().out
    assert "Without DF (σ)" in out
