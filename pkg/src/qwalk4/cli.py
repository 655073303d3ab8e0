"""Command-line entry point: run one experiment or figure preset per call.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    FORMATS,
    PRESETS,
    ConfigError,
    config_from_dict,
    emit,
    preset_config,
    run_experiment,
    write_atomic,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwalk4", description="Four-state-coin quantum walk simulator.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="JSON experiment config")
    src.add_argument("--preset", choices=sorted(PRESETS), help="figure preset")
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--steps", type=int)
    p.add_argument("--coin", help="hadamard4 | grover4 | sagnac_swap | identity4 | file:<path>")
    p.add_argument("--initial", nargs="+", metavar="STATE",
                   help="phi1 | phi2 | phi3 | basis:<idx> | 8 numbers re0 im0 ... re3 im3")
    p.add_argument("--shifts", nargs=4, type=int, metavar="E")
    p.add_argument("--mode", choices=("walk1d", "walk2d"))
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--recenter", action="store_true", default=None)
    p.add_argument("--sagnac-swap", action="store_true", default=None, dest="apply_sagnac_swap")
    return p


def _config_dict(args) -> dict:
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError("invalid_json", str(exc)) from None
        if not isinstance(d, dict):
            raise ConfigError("invalid_json", "config must be a JSON object")
    elif args.preset:
        preset_config(args.preset)
        d = dict(PRESETS[args.preset])
    else:
        d = {}
    overrides = {
        "steps": args.steps,
        "coin": args.coin,
        "shifts": args.shifts,
        "mode": args.mode,
        "N": args.N,
        "recenter": args.recenter,
        "apply_sagnac_swap": args.apply_sagnac_swap,
        "format": args.format,
        "output": args.output,
    }
    if args.initial is not None:
        if len(args.initial) == 1:
            overrides["initial"] = args.initial[0]
        else:
            try:
                overrides["initial"] = [float(x) for x in args.initial]
            except ValueError:
                raise ConfigError("bad_initial", f"cannot read {args.initial}") from None
    d.update({k: v for k, v in overrides.items() if v is not None})
    return d


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        d = _config_dict(args)
        cfg = config_from_dict(d)
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    md = dict(result.metadata)
    if args.preset:
        md["preset"] = args.preset
    data = emit(result.records, cfg.format, md)
    try:
        if cfg.output:
            write_atomic(cfg.output, data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
