"""Loop statistics and convergence diagnostics for finite covers.

The eigenvalue counting measure of a cover matches the tree DOS exactly as
far as walks cannot feel a cycle; everything here quantifies how far that is.
`tree_like_radius` finds, per vertex, the largest ball that unfolds like the
2l-regular tree (a vertex is "m-bad" when the radius is below m);
`moment_gap_report` and `ensemble_convergence` measure the exact per-moment
gaps against the DOS, the latter over seeded random-pairing ensembles.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from treebc.balls import build_ball, close_ball, random_pairing
from treebc.jacobi import JacobiData, MomentVector, trace_power_moments
from treebc.multigraph import RoseCover
from treebc.rng import derive_seed
from treebc.treedos import rose_dos_moments


def tree_like_radius(cover: RoseCover, v: int, cap: Optional[int] = None) -> int:
    """Largest m such that the radius-m ball around v unfolds as a truncated tree.

    BFS from v; certifying radius m+1 requires that expanding layer m meets no
    repeated vertex and no extra edge into already-seen territory (the parent
    edge is the one exception).  A self-loop or parallel edge at v gives 0.
    Vertex v is "m-bad" exactly when the returned radius is < m.
    """
    g = cover
    inc = g.incidence()
    seen = {v}
    # frontier entries: (vertex, half-edge at vertex leading to its parent)
    frontier: list[tuple[int, int]] = [(v, -1)]
    radius = 0
    limit = cap if cap is not None else g.n_vertices
    while radius < limit:
        nxt: list[tuple[int, int]] = []
        for u, parent_h in frontier:
            for h in inc[u]:
                if h == parent_h:
                    continue
                p = g.partner[h]
                if p == -1:
                    continue
                w = g.he_vertex[p]
                if w in seen:
                    return radius
                seen.add(w)
                nxt.append((w, p))
        if not nxt:
            return radius  # ran out of graph: everything reachable is a tree
        frontier = nxt
        radius += 1
    return radius


def bad_fraction(cover: RoseCover, m: int) -> Fraction:
    """Fraction of vertices whose tree-like radius is below m."""
    if m < 1:
        raise ValueError("need m >= 1")
    bad = sum(1 for v in range(cover.n_vertices) if tree_like_radius(cover, v, cap=m) < m)
    return Fraction(bad, cover.n_vertices)


def girth(cover: RoseCover) -> int:
    """Length of the shortest cycle: self-loop 1, parallel pair 2, else BFS.

    Returns 0 only for acyclic input, which cannot happen for a rose cover.
    """
    edges = cover.edge_list()
    simple: dict[int, set[int]] = {}
    best = 0
    for u, v in edges:
        if u == v:
            return 1
        lo, hi = (u, v) if u < v else (v, u)
        if hi in simple.setdefault(lo, set()):
            best = 2
        else:
            simple[lo].add(hi)
    if best:
        return best

    adj: list[list[int]] = [[] for _ in range(cover.n_vertices)]
    for lo, res in simple.items():
        for hi in res:
            adj[lo].append(hi)
            adj[hi].append(lo)
    best = 0
    for root in range(cover.n_vertices):
        depth = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if best and 2 * depth[u] >= best:
                break  # deeper layers cannot yield a shorter cycle
            for w in adj[u]:
                if w == parent[u]:
                    continue  # the one tree edge back (simple graph)
                if w in depth:
                    cycle = depth[u] + depth[w] + 1
                    if best == 0 or cycle < best:
                        best = cycle
                else:
                    depth[w] = depth[u] + 1
                    parent[w] = u
                    queue.append(w)
    return best


@dataclass(frozen=True)
class MomentGap:
    """One exact cover-vs-DOS moment comparison."""

    k: int
    cover_moment: Fraction
    dos_moment: Fraction
    gap: Fraction

    @property
    def gap_float(self) -> float:
        return float(self.gap)

    @property
    def exact_zero(self) -> bool:
        return self.gap == 0


@dataclass
class SampleGaps:
    """Gaps for one cover (one (r, seed) draw in an ensemble, or a lone cover)."""

    gaps: tuple[MomentGap, ...]
    n_vertices: int
    r: Optional[int] = None
    seed: Optional[int] = None
    bad_fractions: dict[int, Fraction] = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    """Exact moment gaps against the DOS, with ensemble summary helpers."""

    ell: int
    K: int
    dos: MomentVector
    samples: list[SampleGaps]

    def for_r(self, r: Optional[int]) -> list[SampleGaps]:
        return [s for s in self.samples if s.r == r]

    def mean_abs_gap(self, r: Optional[int], k: int) -> float:
        rows = self.for_r(r)
        return sum(abs(s.gaps[k].gap_float) for s in rows) / len(rows)

    def max_abs_gap(self, r: Optional[int], k: int) -> float:
        return max(abs(s.gaps[k].gap_float) for s in self.for_r(r))

    def mean_bad_fraction(self, r: Optional[int], m: int) -> float:
        rows = self.for_r(r)
        return sum(float(s.bad_fractions[m]) for s in rows) / len(rows)


def _gaps_against(dos: MomentVector, cover_moments: MomentVector) -> tuple[MomentGap, ...]:
    return tuple(
        MomentGap(k, cover_moments[k], dos[k], cover_moments[k] - dos[k])
        for k in range(dos.K + 1)
    )


def _infer_rose_dos(cover: RoseCover, data: JacobiData, K: int) -> MomentVector:
    if cover.ell is None:
        raise ValueError("cover carries no color count; pass dos= explicitly")
    b = data.b[0]
    if any(x != b for x in data.b):
        raise ValueError("diagonal b is not constant; pass dos= explicitly")
    a_by_color: dict[int, Fraction] = {}
    for c, a in zip(cover.edge_colors(), data.a):
        if c is None or a_by_color.setdefault(c, a) != a:
            raise ValueError("couplings not constant per color; pass dos= explicitly")
    return rose_dos_moments(cover.ell, b, [a_by_color[j] for j in range(1, cover.ell + 1)], K)


def moment_gap_report(
    cover,
    data: JacobiData,
    K: int,
    dos: Optional[MomentVector] = None,
) -> ConvergenceReport:
    """Exact gaps m_k(cover) - m_k(DOS) for k <= K for a single cover.

    The DOS reference is inferred from period-1 rose data; for lego-expanded
    covers (plain FiniteGraphs) pass the base graph's `dos_moments` explicitly.
    """
    if dos is None:
        dos = _infer_rose_dos(cover, data, K)
    moments = trace_power_moments(cover, data, K)
    sample = SampleGaps(gaps=_gaps_against(dos, moments), n_vertices=cover.n_vertices)
    ell = getattr(cover, "ell", None) or 0
    return ConvergenceReport(ell, K, dos, [sample])


def ensemble_convergence(
    ell: int,
    r_values: Sequence[int],
    K: int,
    samples: int,
    master_seed: int,
    b=0,
    a: Optional[Sequence] = None,
    bad_m: Sequence[int] = (),
    cap: int = 200_000,
) -> ConvergenceReport:
    """Moment gaps over seeded random-pairing ensembles.

    For each radius r, draws `samples` pairings with seeds derive_seed(
    master_seed, r, i), closes the ball, and records exact per-k gaps (plus
    bad-vertex fractions for each m in `bad_m`).  Identical master seeds give
    identical reports.
    """
    if samples < 1:
        raise ValueError("need samples >= 1")
    a_list = [Fraction(1)] * ell if a is None else [Fraction(x) for x in a]
    dos = rose_dos_moments(ell, b, a_list, K)
    report = ConvergenceReport(ell, K, dos, [])
    for r in r_values:
        ball = build_ball(ell, r, cap=cap)
        for i in range(samples):
            seed = derive_seed(master_seed, r, i)
            cover = close_ball(ball, random_pairing(ball, seed))
            data = JacobiData.rose(cover, b, a_list)
            moments = trace_power_moments(cover, data, K)
            sample = SampleGaps(
                gaps=_gaps_against(dos, moments),
                n_vertices=cover.n_vertices,
                r=r,
                seed=seed,
            )
            for m in bad_m:
                sample.bad_fractions[m] = bad_fraction(cover, m)
            report.samples.append(sample)
    return report


def hausdorff_gap(s: np.ndarray, reference: np.ndarray) -> float:
    """One-sided Hausdorff distance: max over s of the distance to `reference`.

    A diagnostic against a large homogeneous cover's spectrum standing in for
    the tree spectrum; calibration, not ground truth.
    """
    s = np.asarray(s, dtype=float)
    ref = np.sort(np.asarray(reference, dtype=float))
    if len(s) == 0 or len(ref) == 0:
        raise ValueError("spectra must be nonempty")
    idx = np.searchsorted(ref, s)
    left = np.abs(s - ref[np.clip(idx - 1, 0, len(ref) - 1)])
    right = np.abs(ref[np.clip(idx, 0, len(ref) - 1)] - s)
    return float(np.max(np.minimum(left, right)))
