"""Command-line front end.

    fwgame run --preset NAME [--T 64,128,...,4096] [--seed N]
               [--eta-mult X] [--out DIR] [--dims D] [--config PATH]
    fwgame list-presets
    fwgame verify --all | --preset NAME

Config files are flat `key = value` text with `#` comments; command-line
flags win over config values.  Exit codes: 0 pass, 1 error, 2 tolerance
failure.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    PRESETS,
    ExperimentConfig,
    parse_config_file,
    parse_t_list,
    run_preset,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fwgame")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment preset")
    run_p.add_argument("--preset", required=True)
    run_p.add_argument("--T", dest="t_list", default=None,
                       help="comma list of horizons; '...' continues the progression")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--eta-mult", type=float, default=None)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--dims", type=int, default=None)
    run_p.add_argument("--config", default=None)

    sub.add_parser("list-presets", help="list available presets")

    ver_p = sub.add_parser("verify", help="run preset pass/fail suites")
    ver_p.add_argument("--all", action="store_true")
    ver_p.add_argument("--preset", action="append", default=[])
    ver_p.add_argument("--out", default="out")
    ver_p.add_argument("--seed", type=int, default=0)
    return parser


_CONFIG_KEYS = {"preset", "T", "seed", "eta_mult", "out", "dims"}


def _config_from_args(args) -> ExperimentConfig:
    values = {}
    if args.config:
        raw = parse_config_file(args.config)
        unknown = set(raw) - _CONFIG_KEYS - {k for k in raw if k.startswith("tol.")}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)
    # flags win over config-file values
    if args.preset is not None:
        values["preset"] = args.preset
    if args.t_list is not None:
        values["T"] = args.t_list
    if args.seed is not None:
        values["seed"] = args.seed
    if args.eta_mult is not None:
        values["eta_mult"] = args.eta_mult
    if args.out is not None:
        values["out"] = args.out
    if args.dims is not None:
        values["dims"] = args.dims
    tolerances = {k[4:]: float(v) for k, v in values.items()
                  if isinstance(k, str) and k.startswith("tol.")}
    return ExperimentConfig(
        preset=values["preset"],
        T_list=parse_t_list(values["T"]) if values.get("T") else None,
        seed=int(values.get("seed", 0)),
        eta_multiplier=float(values.get("eta_mult", 1.0)),
        output_path=str(values.get("out", "out")),
        dims=int(values.get("dims", 5)),
        tolerances=tolerances,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-presets":
        for name in sorted(PRESETS):
            print(name)
        return 0
    if args.command == "run":
        try:
            cfg = _config_from_args(args)
        except (ValueError, OSError) as exc:
            print(f"error: {exc}")
            return 1
        return run_preset(cfg)
    if args.command == "verify":
        names = sorted(PRESETS) if args.all or not args.preset else args.preset
        worst = 0
        for name in names:
            if name not in PRESETS:
                print(f"error: unknown preset {name!r}")
                print("available presets: " + ", ".join(sorted(PRESETS)))
                return 1
            code = run_preset(ExperimentConfig(preset=name, seed=args.seed,
                                               output_path=args.out))
            print()
            worst = max(worst, code)
            if code == 1:
                return 1
        return worst
    return 1


if __name__ == "__main__":
    sys.exit(main())
