"""Command line front end.

    dampedkdv run --config scenario.json [--out DIR] [--seed N] [--quiet]
    dampedkdv sweep --config sweep.json [--out DIR] [--quiet]
    dampedkdv k0 --grid-n 512 --box 80 --restarts 2 [--out DIR]
    dampedkdv estimate-c1 --T 1.0 --battery battery.json [--out DIR]

Exit codes: 0 success, 2 config error, 3 blow-up, 4 analysis precondition unmet.
"""

import argparse
import logging
import os
import sys
from dataclasses import asdict

from . import scenario
from .grid import GridSpec
from .scenario import EXIT_CONFIG, EXIT_OK, ConfigError
from .well import estimate_k0

log = logging.getLogger("dampedkdv")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--seed", type=int, help="override initial_data.seed")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    p = argparse.ArgumentParser(prog="dampedkdv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run one scenario")
    run.add_argument("--config", required=True)
    sw = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    sw.add_argument("--config", required=True)
    k0 = sub.add_parser("k0", parents=[common], help="estimate the sharp constant k0")
    k0.add_argument("--grid-n", type=int, default=512)
    k0.add_argument("--box", type=float, default=80.0)
    k0.add_argument("--restarts", type=int, default=2)
    c1 = sub.add_parser("estimate-c1", parents=[common], help="measure the linear-estimate constant")
    c1.add_argument("--T", type=float, required=True)
    c1.add_argument("--battery", required=True, help="JSON list of initial-data specs")
    c1.add_argument("--grid-n", type=int, default=512)
    c1.add_argument("--box", type=float, default=80.0)
    return p


def _emit(payload, out, name, quiet):
    text = scenario.dumps(payload)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text)
    if not quiet:
        sys.stdout.write(text)


def _apply_seed(cfg, seed):
    if seed is not None and isinstance(cfg.get("initial_data"), dict):
        cfg["initial_data"]["seed"] = seed


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            cfg = scenario.load_config(args.config)
            _apply_seed(cfg, args.seed)
            status, analysis = scenario.run_scenario(cfg, args.out)
            if not args.quiet:
                log.info("scenario %s finished with status %s", analysis["scenario_id"], analysis["status"])
            return status
        if args.command == "sweep":
            cfg = scenario.load_config(args.config)
            if args.seed is not None and isinstance(cfg.get("base"), dict):
                _apply_seed(cfg["base"], args.seed)
            path, rows = scenario.run_sweep(cfg, args.out)
            if not args.quiet:
                log.info("wrote %s (%d rows)", path, len(rows))
            return EXIT_OK
        if args.command == "k0":
            try:
                grid = GridSpec(args.box, args.grid_n)
                consts = estimate_k0(grid, restarts=args.restarts)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            payload = {k: v for k, v in asdict(consts).items() if k != "maximizer"}
            payload["sobolev_l3_lower"] = consts.sobolev_l3_lower
            _emit(payload, args.out, "k0.json", args.quiet)
            return EXIT_OK
        if args.command == "estimate-c1":
            battery = scenario.load_config(args.battery)
            if not isinstance(battery, list):
                raise ConfigError("battery must be a JSON list of initial-data specs")
            report = scenario.estimate_c1(args.T, battery, args.box, args.grid_n)
            _emit(report, args.out, "c1.json", args.quiet)
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
