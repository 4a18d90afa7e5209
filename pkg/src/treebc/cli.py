"""Command-line entry point.

    treebc --experiment tower --ell 2 --n 1..4 --K 8 --out results/

Exit codes: 0 ok, 2 config error, 3 resource cap exceeded, 4 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from treebc.errors import CapExceeded, ConfigError, InvariantBreach
from treebc.experiments import EXPERIMENTS, load_config, run


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="treebc",
        description="Finite periodic-BC covers and their eigenvalue-counting diagnostics.",
    )
    p.add_argument("--config", help="JSON config file (flags override its keys)")
    p.add_argument("--experiment", choices=EXPERIMENTS, help="which experiment to run")
    p.add_argument("--ell", type=int, help="number of rose petals (free-group rank)")
    p.add_argument("--r", help="ball radius range, e.g. 4..10 or 7 or 1,3,5")
    p.add_argument("--n", help="congruence tower level range, e.g. 1..4")
    p.add_argument("--K", type=int, help="highest moment order")
    p.add_argument("--samples", type=int, help="random samples per radius")
    p.add_argument("--seed", type=int, help="master seed for random experiments")
    p.add_argument("--cap-vertices", type=int, dest="cap_vertices", help="vertex cap")
    p.add_argument("--out", help="output directory")
    p.add_argument("--graph", help="graph file for lego-demo / dos-table")
    p.add_argument(
        "--no-plots",
        action="store_const",
        const=False,
        dest="plots",
        default=None,
        help="emit CSVs only, no figures",
    )
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {
        k: v
        for k, v in vars(args).items()
        if k in ("experiment", "ell", "r", "n", "K", "samples", "seed", "cap_vertices", "out", "graph", "plots")
    }
    try:
        cfg = load_config(args.config, flags)
        paths = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return 3
    except InvariantBreach as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return 4
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
