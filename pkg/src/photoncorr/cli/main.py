"""Command-line entry point.

Exit codes: 0 success, 2 invalid config, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

from ..exceptions import PhotonCorrError
from .config import ConfigError, load, schema_document
from .scenarios import run_config

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _preset_dir():
    return resources.files("photoncorr") / "presets"


def preset_paths():
    """Bundled preset configs, sorted by name."""
    return sorted((p for p in _preset_dir().iterdir() if p.name.endswith(".toml")),
                  key=lambda p: p.name)


def _resolve_config_path(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    for p in preset_paths():
        if p.name in (arg, arg + ".toml"):
            return Path(str(p))
    return path


def _cmd_run(args) -> int:
    try:
        cfg = load(_resolve_config_path(args.config))
        if args.threads is not None and args.threads < 0:
            raise ConfigError("--threads", "must be >= 0")
        out = args.out if args.out is not None else cfg["output"]["dir"]
        summary = run_config(cfg, out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhotonCorrError as exc:
        # the message starts with the failing operation
        print(f"numerical failure in {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure in {cfg['scenario']}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {Path(out) / 'result.csv'} ({summary['n_points']} point(s), "
          f"{summary['elapsed_s']:.2f} s)")
    return 0


def _cmd_schema(args) -> int:
    print(json.dumps(schema_document(), indent=2))
    return 0


def _cmd_presets(args) -> int:
    for p in preset_paths():
        cfg = load(Path(str(p)))
        print(f"{p.name:28s} {cfg['scenario']:15s} {cfg['description']}")
    print(f"\ndirectory: {_preset_dir()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photoncorr",
        description="Photon correlations of waveguide-coupled emitters from config files.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario config (.toml, .json or a preset name)")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides output.dir)")
    run.add_argument("--threads", type=int, help="worker threads; 0 = one per CPU")
    run.set_defaults(func=_cmd_run)
    sub.add_parser("schema", help="print the config schema as JSON").set_defaults(func=_cmd_schema)
    sub.add_parser("presets", help="list bundled configs").set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
