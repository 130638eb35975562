"""Command-line entry point.

    torusflow validate  [--config F] [--trials K] [--set key=value ...]
    torusflow simulate   --config F [--seed S] [--out D] [--workers K] [--set ...]
    torusflow ensemble   --config F [...]
    torusflow sweep-eps  --config F [...]
    torusflow sweep-lambda --config F [...]
    torusflow print-config          # dump the documented default config

Configuration is a flat key=value file; --set overrides individual keys.
"""

from __future__ import annotations

import argparse
import sys

from .config import default_config_text, load_config
from .runner import cmd_ensemble, cmd_simulate, cmd_sweep_eps, cmd_sweep_lambda, cmd_validate


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", default=None, help="flat key=value config file")
    sp.add_argument("--seed", type=int, default=None, help="override base_seed")
    sp.add_argument("--out", default=None, help="override out_dir")
    sp.add_argument("--workers", type=int, default=None, help="override workers")
    sp.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any config key (repeatable)",
    )


def _collect(args: argparse.Namespace) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for item in args.overrides:
        if "=" not in item:
            raise SystemExit(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["base_seed"] = str(args.seed)
    if args.out is not None:
        overrides["out_dir"] = args.out
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = str(args.workers)
    if getattr(args, "trials", None) is not None:
        overrides["validate_trials"] = str(args.trials)
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="torusflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="run the lemma validators")
    _add_common(sp)
    sp.add_argument("--trials", type=int, default=None, help="trials per check")

    for name in ("simulate", "ensemble", "sweep-eps", "sweep-lambda"):
        _add_common(sub.add_parser(name))

    sub.add_parser("print-config", help="print the documented default config")

    args = parser.parse_args(argv)
    if args.command == "print-config":
        print(default_config_text(), end="")
        return 0

    cfg = load_config(args.config, _collect(args))
    if args.command == "validate":
        return cmd_validate(cfg)
    if args.command == "simulate":
        summary = cmd_simulate(cfg)
    elif args.command == "ensemble":
        summary = cmd_ensemble(cfg)
    elif args.command == "sweep-eps":
        summary = cmd_sweep_eps(cfg)
    else:
        summary = cmd_sweep_lambda(cfg)
    out = summary["config"]["out_dir"]
    print(f"{args.command}: wrote run_summary.json and artifacts to {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
