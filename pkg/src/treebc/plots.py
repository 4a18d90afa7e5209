"""Figure rendering for the experiment reports.

Each experiment gets one or two PNGs next to its CSVs.  matplotlib is
imported lazily with the Agg backend so headless runs and --no-plots runs
never touch a display.
"""

from __future__ import annotations

from pathlib import Path


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    _plt().close(fig)
    return path


def q0_sweep_figure(rows, path: Path) -> Path:
    plt = _plt()
    rs = [row[1] for row in rows]
    excess = [row[6] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rs, excess, "o-", color="tab:red")
    ax.set_xlabel("ball radius r")
    ax.set_ylabel(r"$m_2$ excess over tree DOS")
    ax.set_title("Antipodal closure: second-moment excess stays bounded away from 0")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def convergence_figure(report, path: Path) -> Path:
    plt = _plt()
    rs = sorted({s.r for s in report.samples})
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for k in range(1, report.K + 1):
        means = [max(report.mean_abs_gap(r, k), 1e-17) for r in rs]
        style = "o-" if k % 2 == 0 else "s--"
        ax.semilogy(rs, means, style, label=f"k={k}", alpha=0.85)
    ax.set_xlabel("ball radius r")
    ax.set_ylabel("mean |moment gap|")
    ax.set_title("Random closures: moment gaps against the tree DOS")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(ncol=2, fontsize=8)
    return _save(fig, path)


def badfrac_figure(report, path: Path) -> Path:
    plt = _plt()
    rs = sorted({s.r for s in report.samples})
    ms = sorted({m for s in report.samples for m in s.bad_fractions})
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for m in ms:
        means = [max(report.mean_bad_fraction(r, m), 1e-17) for r in rs]
        ax.semilogy(rs, means, "o-", label=f"m={m}")
    if rs:
        two_ell_m1 = 2 * report.ell - 1
        ref0 = max(report.mean_bad_fraction(rs[0], ms[-1]), 1e-17)
        guide = [ref0 * two_ell_m1 ** (rs[0] - r) for r in rs]
        ax.semilogy(rs, guide, "k:", label=r"$1/M_r$ slope")
    ax.set_xlabel("ball radius r")
    ax.set_ylabel("mean bad-vertex fraction")
    ax.set_title("Bad-vertex fractions scale like $1/M_r$")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, path)


def tower_figure(rows, path: Path) -> Path:
    plt = _plt()
    ns = [row[0] for row in rows]
    radii = [row[2] if row[2] != "" else None for row in rows]
    gaps = [row[4] for row in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(ns, radii, "o-", color="tab:blue")
    ax1.set_xlabel("tower level n")
    ax1.set_ylabel("injectivity radius")
    ax1.set_title("Congruence tower: radius grows")
    ax1.grid(True, alpha=0.3)
    ax2.plot(ns, gaps, "o-", color="tab:red")
    ax2.set_xlabel("tower level n")
    ax2.set_ylabel("max |moment gap|")
    ax2.set_title("Counting measure vs DOS")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def lego_figure(rows, path: Path) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    by_param: dict = {}
    for row in rows:
        by_param.setdefault((row[0], row[1]), []).append((row[6], abs(row[10])))
    for (family, param), pts in sorted(by_param.items()):
        ks = [p[0] for p in pts]
        gs = [max(p[1], 1e-17) for p in pts]
        ax.semilogy(ks, gs, "o-", label=f"{family} {param}")
    ax.set_xlabel("moment order k")
    ax.set_ylabel("|moment gap|")
    ax.set_title("Expanded covers vs base-graph DOS")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, path)


def dos_table_figure(rows, path: Path) -> Path:
    plt = _plt()
    ks = [row[0] for row in rows]
    vals = [row[2] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(ks, vals, color="tab:blue", width=0.6)
    ax.set_xlabel("moment order k")
    ax.set_ylabel(r"$m_k$ of the DOS")
    ax.set_title("Tree density-of-states moments")
    ax.grid(True, axis="y", alpha=0.3)
    return _save(fig, path)
