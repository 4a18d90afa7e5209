"""Reproducible experiment runner behind the CLI.

Configuration is declarative: a JSON file, overridden by TREEBC_* environment
variables, overridden by command-line flags (flags mirror config keys
one-to-one).  Every run writes RFC-4180 CSVs plus a manifest.json echoing the
config; rerunning the same config yields byte-identical CSVs (the manifest
timestamp is the one moving part).  Figures are rendered next to the CSVs
unless plots are disabled.
"""

from __future__ import annotations

import csv
import json
import os
import platform
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

import treebc
from treebc.balls import antipodal_pairing, build_ball, close_ball, random_pairing
from treebc.diagnostics import ensemble_convergence
from treebc.errors import ConfigError
from treebc.groups import congruence_quotient, free_generator_images, injectivity_radius
from treebc.jacobi import JacobiData, trace_power_moments
from treebc.multigraph import FiniteGraph, lego_expand, spanning_tree
from treebc.rng import derive_seed
from treebc.treedos import dos_moments, rose_dos_moments

EXPERIMENTS = ("q0-sweep", "random-sweep", "tower", "lego-demo", "dos-table")

ENV_PREFIX = "TREEBC_"


def parse_range(text: str) -> list[int]:
    """Accepts '4', '4..10' (inclusive), or '1,3,5'."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..")
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ConfigError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    if "," in text:
        return [int(t) for t in text.split(",")]
    return [int(text)]


@dataclass
class ExperimentConfig:
    experiment: str
    ell: int = 2
    r: Optional[str] = None
    n: Optional[str] = None
    K: int = 6
    samples: int = 10
    seed: Optional[int] = None
    cap_vertices: int = 200_000
    out: str = "out"
    plots: bool = True
    graph: Optional[str] = None

    def r_values(self) -> list[int]:
        return parse_range(self.r) if self.r else []

    def n_values(self) -> list[int]:
        return parse_range(self.n) if self.n else []

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}"
            )
        if self.ell < 2:
            raise ConfigError("ell must be >= 2")
        if self.K < 2:
            raise ConfigError("K must be >= 2")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.cap_vertices < 1:
            raise ConfigError("cap-vertices must be >= 1")
        if self.r is not None and not self.r_values():
            raise ConfigError("r range is empty")
        if self.n is not None and not self.n_values():
            raise ConfigError("n range is empty")
        if self.experiment in ("q0-sweep", "random-sweep") and not self.r_values():
            raise ConfigError(f"{self.experiment} needs an r range")
        if self.experiment == "random-sweep" and self.seed is None:
            raise ConfigError("random-sweep needs a seed")
        if self.experiment == "tower" and not self.n_values():
            raise ConfigError("tower needs an n range")
        if self.experiment in ("lego-demo", "dos-table") and not self.graph:
            raise ConfigError(f"{self.experiment} needs a graph file")
        if self.experiment == "lego-demo" and not (self.n_values() or self.r_values()):
            raise ConfigError("lego-demo needs an r or n range to pick the cover family")


_CONFIG_KEYS = (
    "experiment",
    "ell",
    "r",
    "n",
    "K",
    "samples",
    "seed",
    "cap_vertices",
    "out",
    "plots",
    "graph",
)
_INT_KEYS = {"ell", "K", "samples", "seed", "cap_vertices"}
_BOOL_KEYS = {"plots"}


def load_config(
    config_file: Optional[str],
    flag_values: dict,
    env: Optional[dict] = None,
) -> ExperimentConfig:
    """Merge config sources: defaults < JSON file < TREEBC_* env < flags."""
    env = os.environ if env is None else env
    merged: dict = {}
    if config_file:
        try:
            raw = json.loads(Path(config_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_file}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, val in raw.items():
            norm = key.replace("-", "_")
            if norm not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            merged[norm] = val
    for key in _CONFIG_KEYS:
        env_val = env.get(ENV_PREFIX + key.upper())
        if env_val is not None:
            merged[key] = env_val
    for key, val in flag_values.items():
        if val is not None:
            merged[key] = val
    for key in _INT_KEYS:
        if key in merged and merged[key] is not None:
            try:
                merged[key] = int(merged[key])
            except (TypeError, ValueError):
                raise ConfigError(f"config key {key} must be an integer")
    for key in _BOOL_KEYS:
        if key in merged and isinstance(merged[key], str):
            merged[key] = merged[key].lower() not in ("0", "false", "no")
    if "experiment" not in merged:
        raise ConfigError("no experiment selected")
    for key in ("r", "n"):
        if key in merged and merged[key] is not None:
            merged[key] = str(merged[key])
    cfg = ExperimentConfig(**merged)
    cfg.validate()
    return cfg


# -- graph input file ----------------------------------------------------------
#
#   graph p=<p> q=<q>
#   vertex <i> b=<rational>
#   edge <u> <v> a=<rational>


def parse_graph_file(text: str) -> tuple[FiniteGraph, JacobiData]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("graph"):
        raise ConfigError("graph file must start with 'graph p=<p> q=<q>'")
    head = dict(tok.split("=") for tok in lines[0].split()[1:])
    p, q = int(head["p"]), int(head["q"])
    b: list[Optional[Fraction]] = [None] * p
    edges: list[tuple[int, int]] = []
    a: list[Fraction] = []
    for ln in lines[1:]:
        toks = ln.split()
        if toks[0] == "vertex":
            b[int(toks[1])] = Fraction(toks[2].split("=")[1])
        elif toks[0] == "edge":
            edges.append((int(toks[1]), int(toks[2])))
            a.append(Fraction(toks[3].split("=")[1]))
        else:
            raise ConfigError(f"malformed graph line {ln!r}")
    if len(edges) != q or any(x is None for x in b):
        raise ConfigError("graph file does not match its declared p/q")
    return FiniteGraph(p, edges), JacobiData(tuple(b), tuple(a))  # type: ignore[arg-type]


# -- runners --------------------------------------------------------------------


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def _frac(x: Fraction) -> str:
    return str(x)


def _run_q0_sweep(cfg: ExperimentConfig, out: Path) -> list[Path]:
    rows = []
    dos_m2 = rose_dos_moments(cfg.ell, 0, [1] * cfg.ell, 2)[2]
    for r in cfg.r_values():
        ball = build_ball(cfg.ell, r, cap=cfg.cap_vertices)
        cover = close_ball(ball, antipodal_pairing(ball))
        data = JacobiData.unit(cover)
        m2 = trace_power_moments(cover, data, 2)[2]
        excess = m2 - dos_m2
        rows.append(
            [cfg.ell, r, cover.n_vertices, _frac(m2), _frac(dos_m2), _frac(excess), float(excess)]
        )
    path = out / "q0_sweep.csv"
    _write_csv(path, ["ell", "r", "n_vertices", "m2", "dos_m2", "excess", "excess_float"], rows)
    paths = [path]
    if cfg.plots:
        from treebc import plots

        paths.append(plots.q0_sweep_figure(rows, out / "q0_sweep.png"))
    return paths


def _run_random_sweep(cfg: ExperimentConfig, out: Path) -> list[Path]:
    report = ensemble_convergence(
        cfg.ell,
        cfg.r_values(),
        cfg.K,
        cfg.samples,
        cfg.seed,  # type: ignore[arg-type]
        bad_m=(1, 2),
        cap=cfg.cap_vertices,
    )
    conv_rows = []
    bad_rows = []
    for s in report.samples:
        for g in s.gaps:
            conv_rows.append([cfg.ell, s.r, s.seed, g.k, _frac(g.gap), g.gap_float])
        for m in sorted(s.bad_fractions):
            bad_rows.append([cfg.ell, s.r, m, s.seed, _frac(s.bad_fractions[m])])
    conv_path = out / "convergence.csv"
    bad_path = out / "badfrac.csv"
    _write_csv(conv_path, ["ell", "r", "seed", "k", "gap_exact", "gap_float"], conv_rows)
    _write_csv(bad_path, ["ell", "r", "m", "seed", "fraction"], bad_rows)
    paths = [conv_path, bad_path]
    if cfg.plots:
        from treebc import plots

        paths.append(plots.convergence_figure(report, out / "convergence.png"))
        paths.append(plots.badfrac_figure(report, out / "badfrac.png"))
    return paths


def _run_tower(cfg: ExperimentConfig, out: Path) -> list[Path]:
    gens = free_generator_images(cfg.ell)
    dos = rose_dos_moments(cfg.ell, 0, [1] * cfg.ell, cfg.K)
    rows = []
    for n in cfg.n_values():
        q = congruence_quotient(gens, n, cap=cfg.cap_vertices)
        radius = injectivity_radius(gens, n, cap=2 * q.size + 1)
        data = JacobiData.unit(q.cover)
        moments = trace_power_moments(q.cover, data, cfg.K)
        gaps = [moments[k] - dos[k] for k in range(cfg.K + 1)]
        max_gap = max((abs(g) for g in gaps), default=Fraction(0))
        row = [n, q.size, radius if radius is not None else ""]
        row += [_frac(max_gap), float(max_gap)]
        row += [_frac(moments[k]) for k in range(cfg.K + 1)]
        row += [_frac(dos[k]) for k in range(cfg.K + 1)]
        rows.append(row)
    header = ["n", "size", "injectivity_radius", "max_abs_gap", "max_abs_gap_float"]
    header += [f"m_{k}" for k in range(cfg.K + 1)]
    header += [f"dos_m_{k}" for k in range(cfg.K + 1)]
    path = out / "tower.csv"
    _write_csv(path, header, rows)
    paths = [path]
    if cfg.plots:
        from treebc import plots

        paths.append(plots.tower_figure(rows, out / "tower.png"))
    return paths


def _lego_covers(cfg: ExperimentConfig, ell: int):
    """The cover family for lego-demo: tower if n given, else random (seeded)
    or antipodal covers at the r range."""
    if cfg.n_values():
        gens = free_generator_images(ell)
        for n in cfg.n_values():
            yield ("tower", n, None, congruence_quotient(gens, n, cap=cfg.cap_vertices).cover)
    else:
        for r in cfg.r_values():
            ball = build_ball(ell, r, cap=cfg.cap_vertices)
            if cfg.seed is not None:
                seed = derive_seed(cfg.seed, r, 0)
                yield ("random", r, seed, close_ball(ball, random_pairing(ball, seed)))
            else:
                yield ("q0", r, None, close_ball(ball, antipodal_pairing(ball)))


def _run_lego_demo(cfg: ExperimentConfig, out: Path) -> list[Path]:
    base, data = parse_graph_file(Path(cfg.graph).read_text())  # type: ignore[arg-type]
    marked, _, rank = spanning_tree(base)
    dos = dos_moments(base, data, cfg.K)
    rows = []
    for family, param, seed, cover in _lego_covers(cfg, rank):
        big, big_data, _ = lego_expand(cover, marked, data)
        moments = trace_power_moments(big, big_data, cfg.K)
        for k in range(cfg.K + 1):
            gap = moments[k] - dos[k]
            rows.append(
                [
                    family,
                    param,
                    "" if seed is None else seed,
                    rank,
                    base.n_vertices,
                    big.n_vertices,
                    k,
                    _frac(moments[k]),
                    _frac(dos[k]),
                    _frac(gap),
                    float(gap),
                ]
            )
    path = out / "lego_demo.csv"
    _write_csv(
        path,
        [
            "family",
            "param",
            "seed",
            "ell",
            "base_p",
            "cover_vertices",
            "k",
            "cover_m",
            "dos_m",
            "gap_exact",
            "gap_float",
        ],
        rows,
    )
    paths = [path]
    if cfg.plots:
        from treebc import plots

        paths.append(plots.lego_figure(rows, out / "lego_demo.png"))
    return paths


def _run_dos_table(cfg: ExperimentConfig, out: Path) -> list[Path]:
    base, data = parse_graph_file(Path(cfg.graph).read_text())  # type: ignore[arg-type]
    moments = dos_moments(base, data, cfg.K)
    rows = [[k, _frac(moments[k]), float(moments[k])] for k in range(cfg.K + 1)]
    path = out / "dos_table.csv"
    _write_csv(path, ["k", "moment", "moment_float"], rows)
    paths = [path]
    if cfg.plots:
        from treebc import plots

        paths.append(plots.dos_table_figure(rows, out / "dos_table.png"))
    return paths


_RUNNERS = {
    "q0-sweep": _run_q0_sweep,
    "random-sweep": _run_random_sweep,
    "tower": _run_tower,
    "lego-demo": _run_lego_demo,
    "dos-table": _run_dos_table,
}


def run(cfg: ExperimentConfig) -> list[Path]:
    """Run one experiment; returns the emitted file paths (manifest last)."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    paths = _RUNNERS[cfg.experiment](cfg, out)
    manifest = {
        "config": asdict(cfg),
        "package_version": treebc.__version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "outputs": [p.name for p in paths],
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return paths + [manifest_path]
