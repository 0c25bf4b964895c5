"""Command-line entry point: ``writerid <command> [--config FILE] [--key value ...]``.

Exit codes: 0 success (or a clean audit), 1 audit violations, 2 configuration
error, 3 data error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiment as ex
from .config import KEYS, load_config
from .errors import ConfigError, DataError, WriterIdError
from .protocol.audit import audit_leakage
from .protocol.manifest import format_distribution, load_manifest
from .protocol.report import format_table
from .protocol.splits import load_plan
from .protocol.synth import synth_corpus

log = logging.getLogger("writerid")

EXIT_OK, EXIT_VIOLATIONS, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI-style configuration file")
    g = p.add_argument_group("configuration overrides")
    for key in KEYS:
        g.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="VALUE")
    p.add_argument("-v", "--verbose", action="store_true")


def _config(args):
    overrides = {k: getattr(args, k, None) for k in KEYS}
    return load_config(args.config, overrides)


def cmd_ingest(args) -> int:
    cfg = _config(args)
    if not cfg.manifest:
        raise ConfigError("no manifest given (--manifest)")
    records = load_manifest(cfg.manifest, verify_paths=cfg.verify_paths)
    print(format_distribution(records))
    subset, _ = ex.load_records(cfg)
    writers = len({r.writer_id for r in subset})
    print(f"Subset {cfg.subset}: {writers} writers, {len(subset)} documents")
    return EXIT_OK


def cmd_texture(args) -> int:
    cfg = _config(args)
    records, base = ex.load_records(cfg)
    for d in cfg.descriptors:
        _, path = ex.stage_features(cfg, records, base, d, force_images=True)
        key = path.stem.split("-", 1)[1]
        print(Path(cfg.cache_dir) / "textures" / key)
    return EXIT_OK


def cmd_features(args) -> int:
    cfg = _config(args)
    records, base = ex.load_records(cfg)
    for d in cfg.descriptors:
        print(ex.stage_features(cfg, records, base, d)[1])
    return EXIT_OK


def cmd_plan(args) -> int:
    cfg = _config(args)
    records, _ = ex.load_records(cfg)
    for mode, (plan, path) in ex.stage_plans(cfg, records).items():
        print(f"{mode}: {path} ({len(plan.writers)} writers, "
              f"{len(plan.fallback_writers)} single-sample)")
    return EXIT_OK


def cmd_audit(args) -> int:
    try:
        plan = load_plan(args.plan)
    except OSError as exc:
        raise DataError(f"cannot read plan {args.plan}: {exc}") from None
    report = audit_leakage(plan)
    sys.stdout.write(report.to_csv())
    if report.clean:
        return EXIT_OK
    if report.avoidable or args.strict:
        print(f"{len(report.violations)} violation(s), {len(report.avoidable)} avoidable",
              file=sys.stderr)
        return EXIT_VIOLATIONS
    print(f"warning: {len(report.violations)} unavoidable single-sample violation(s)",
          file=sys.stderr)
    return EXIT_OK


def _features_and_plans(cfg):
    records, base = ex.load_records(cfg)
    features = {d: ex.stage_features(cfg, records, base, d)[0] for d in cfg.descriptors}
    return features, ex.stage_plans(cfg, records)


def cmd_train(args) -> int:
    cfg = _config(args)
    features, plans = _features_and_plans(cfg)
    n = ex.stage_train(cfg, plans, features)
    print(f"trained {n} model(s); cache at {Path(cfg.cache_dir) / 'models'}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    features, plans = _features_and_plans(cfg)
    reports = ex.stage_evaluate(cfg, plans, features)
    ex.write_outputs(cfg, reports, plans)
    print(format_table(reports))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    reports, paths = ex.run_all(cfg)
    print(format_table(reports))
    for p in paths:
        log.info("wrote %s", p)
    return EXIT_OK


def cmd_synth(args) -> int:
    records = synth_corpus(args.out, args.writers, args.docs, args.seed, args.strength)
    print(f"{len(records)} documents written; manifest {Path(args.out) / 'manifest.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="writerid",
                                     description="Texture-based writer identification")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "ingest": (cmd_ingest, "validate a manifest and print its distribution"),
        "texture": (cmd_texture, "write texture and block images to the cache"),
        "features": (cmd_features, "compute (or reuse) cached block features"),
        "plan": (cmd_plan, "write split plans for the configured DF modes"),
        "train": (cmd_train, "train (or reuse) per-fold models"),
        "evaluate": (cmd_evaluate, "score test documents and write reports"),
        "run": (cmd_run, "all stages end to end"),
    }
    for name, (fn, text) in commands.items():
        p = sub.add_parser(name, help=text)
        _add_config_flags(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("audit", help="check a plan file for document leakage")
    p.add_argument("plan")
    p.add_argument("--strict", action="store_true",
                   help="fail on unavoidable single-sample violations too")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("synth", help="render a synthetic corpus with a manifest")
    p.add_argument("out")
    p.add_argument("--writers", type=int, default=10)
    p.add_argument("--docs", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strength", type=float, default=0.5, help="nuisance strength in [0, 1]")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_synth)
    return parser


def _exit_code(exc) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    return EXIT_DATA


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ex.StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc.cause)
    except (WriterIdError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
