"""Run configuration: an INI-style key/value file plus command-line overrides.

Every key below can be set in the file (under any of the listed sections)
and overridden by a flag of the same name, with dashes for underscores
(``block_width`` -> ``--block-width``).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, fields
from pathlib import Path

from .classifier import DEFAULT_C_GRID, DEFAULT_GAMMA_GRID
from .errors import ConfigError
from .pipeline import DESCRIPTORS, FeatureConfig
from .protocol.evaluate import ClassifierConfig
from .protocol.manifest import FIRST_TWO_OF_MULTIDOC, SELECTORS
from .protocol.splits import DF_MODES
from .texturegen import BlockSpec, CompactionParams

SECTIONS = {
    "data": ("manifest", "subset", "database", "verify_paths"),
    "blocks": ("block_width", "block_height", "block_count"),
    "texture": ("row_width", "component_gap", "row_gap", "save_images"),
    "descriptors": ("descriptors", "lbp_radius", "lbp_neighbors", "lbp_uniform", "lpq_window",
                    "lpq_decorrelate", "surf_threshold", "surf_max_keypoints"),
    "classifier": ("c_grid", "gamma_grid", "cv_folds", "kernel"),
    "run": ("modes", "reverse_df", "seed", "cache_dir", "output_dir", "workers"),
}
PATH_KEYS = ("manifest", "cache_dir", "output_dir")


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(p.strip() for p in str(text).split(",") if p.strip())


def _floats(text) -> tuple:
    return tuple(float(v) for v in _list(text))


def _opt_int(text):
    if text is None or str(text).strip().lower() in ("", "none", "0"):
        return None
    return int(text)


@dataclass
class RunConfig:
    manifest: str = ""
    subset: str = FIRST_TWO_OF_MULTIDOC
    database: str = "corpus"
    verify_paths: bool = True
    block_width: int = 256
    block_height: int = 256
    block_count: int = 9
    row_width: int = 0  # 0 selects 9 * block_width
    component_gap: int = 3
    row_gap: int = 2
    save_images: bool = False
    descriptors: tuple = ("lbp",)
    lbp_radius: int = 1
    lbp_neighbors: int = 8
    lbp_uniform: bool = False
    lpq_window: int = 7
    lpq_decorrelate: bool = False
    surf_threshold: float = 4e-4
    surf_max_keypoints: int | None = 32
    c_grid: tuple = DEFAULT_C_GRID
    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    cv_folds: int = 3
    kernel: str = "rbf"
    modes: tuple = DF_MODES
    reverse_df: bool = False
    seed: int = 0
    cache_dir: str = "cache"
    output_dir: str = "results"
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.subset not in SELECTORS:
            raise ConfigError(f"subset must be one of {', '.join(SELECTORS)}")
        if not self.descriptors:
            raise ConfigError("at least one descriptor is required")
        for d in self.descriptors:
            if d not in DESCRIPTORS:
                raise ConfigError(f"unknown descriptor {d!r}")
        for m in self.modes:
            if m not in DF_MODES:
                raise ConfigError(f"unknown DF mode {m!r}")
        if not self.modes:
            raise ConfigError("at least one DF mode is required")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.block_spec()
        self.compaction()
        return self

    def block_spec(self) -> BlockSpec:
        return BlockSpec(self.block_width, self.block_height, self.block_count)

    def compaction(self) -> CompactionParams:
        width = self.row_width or 9 * self.block_width
        return CompactionParams(width, self.component_gap, self.row_gap)

    def feature_config(self, descriptor: str) -> FeatureConfig:
        return FeatureConfig(descriptor, self.block_spec(), self.compaction(), self.lbp_radius,
                             self.lbp_neighbors, self.lbp_uniform, self.lpq_window,
                             self.lpq_decorrelate, self.surf_threshold, self.surf_max_keypoints)

    def classifier_config(self) -> ClassifierConfig:
        return ClassifierConfig(tuple(self.c_grid), tuple(self.gamma_grid), self.cv_folds,
                                self.kernel, self.seed)


CONVERTERS = {
    "verify_paths": _bool, "save_images": _bool, "lbp_uniform": _bool,
    "lpq_decorrelate": _bool, "reverse_df": _bool,
    "descriptors": _list, "modes": _list, "c_grid": _floats, "gamma_grid": _floats,
    "surf_max_keypoints": _opt_int, "surf_threshold": float,
}
KEYS = [f.name for f in fields(RunConfig)]


def convert(key: str, value):
    conv = CONVERTERS.get(key)
    if conv is None:
        default = getattr(RunConfig, key)
        conv = int if isinstance(default, int) else str
    try:
        return conv(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional file and explicit overrides.

    Relative paths in the file resolve against the file's directory.
    """
    values = {}
    if path is not None:
        path = Path(path)
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        try:
            read = parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in SECTIONS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                value = convert(key, raw)
                if key in PATH_KEYS and value and not Path(value).is_absolute():
                    value = str(path.parent / value)
                values[key] = value
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = convert(key, raw)
    return RunConfig(**values).validate()


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for section, keys in SECTIONS.items():
        lines.append(f"[{section}]")
        for key in keys:
            value = getattr(cfg, key)
            if isinstance(value, tuple):
                value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            elif value is None:
                value = "none"
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
