"""Jacobi matrices on finite graphs: exact moments and floating spectra.

A Jacobi matrix has diagonal b (one rational per vertex) and a strictly
positive coupling a per edge; parallel edges add their couplings, and a
self-loop contributes 2a to its vertex's diagonal entry (a loop is
traversable in two directions, which is what makes finite-cover traces agree
with walk counts on the covering tree).

Moments are exact: denominators are cleared once, powers of the integer
matrix are applied sparsely to basis vectors, and the common denominator is
restored at the end.  The eigensolver is the one floating-point component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from treebc.errors import CapExceeded
from treebc.multigraph import ColoredMultigraph, FiniteGraph

GraphLike = Union[ColoredMultigraph, FiniteGraph]

DEFAULT_EIGEN_CAP = 20_000


def _edges_of(g: GraphLike) -> list[tuple[int, int]]:
    return g.edge_list() if isinstance(g, ColoredMultigraph) else list(g.edges)


@dataclass(frozen=True)
class JacobiData:
    """Diagonal value per vertex and positive coupling per edge (edge-list order)."""

    b: tuple[Fraction, ...]
    a: tuple[Fraction, ...]

    def __post_init__(self):
        if any(x <= 0 for x in self.a):
            raise ValueError("couplings a must be strictly positive")

    def validate_for(self, g: GraphLike) -> None:
        if len(self.b) != g.n_vertices or len(self.a) != len(_edges_of(g)):
            raise ValueError(
                f"JacobiData ({len(self.b)} vertices, {len(self.a)} edges) does not "
                f"match graph ({g.n_vertices} vertices, {len(_edges_of(g))} edges)"
            )

    @staticmethod
    def unit(g: GraphLike) -> "JacobiData":
        """b = 0, a = 1 everywhere."""
        return JacobiData(
            (Fraction(0),) * g.n_vertices, (Fraction(1),) * len(_edges_of(g))
        )

    @staticmethod
    def constant(g: GraphLike, b, a) -> "JacobiData":
        return JacobiData(
            (Fraction(b),) * g.n_vertices, (Fraction(a),) * len(_edges_of(g))
        )

    @staticmethod
    def rose(cover: ColoredMultigraph, b, a_by_color: Sequence) -> "JacobiData":
        """Period-1 data on a rose cover: one b, one coupling a_j per color."""
        aj = [Fraction(x) for x in a_by_color]
        colors = cover.edge_colors()
        if any(c is None for c in colors):
            raise ValueError("cover has uncolored edges")
        return JacobiData(
            (Fraction(b),) * cover.n_vertices, tuple(aj[c - 1] for c in colors)
        )


@dataclass(frozen=True)
class MomentVector:
    """Exact rational moments m_0..m_K of a spectral measure."""

    K: int
    m: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.m) != self.K + 1:
            raise ValueError("moment vector length must be K+1")

    def __getitem__(self, k: int) -> Fraction:
        return self.m[k]

    def as_floats(self) -> list[float]:
        return [float(x) for x in self.m]


def assemble_matrix(g: GraphLike, data: JacobiData) -> list[list[Fraction]]:
    """Dense exact matrix: offdiagonal (u,v) sums parallel couplings, diagonal
    is b_v plus 2a per self-loop."""
    data.validate_for(g)
    n = g.n_vertices
    mat = [[Fraction(0)] * n for _ in range(n)]
    for v in range(n):
        mat[v][v] = data.b[v]
    for (u, v), a in zip(_edges_of(g), data.a):
        if u == v:
            mat[u][u] += 2 * a
        else:
            mat[u][v] += a
            mat[v][u] += a
    return mat


def _integer_rows(g: GraphLike, data: JacobiData) -> tuple[list[list[tuple[int, int]]], int]:
    """Clear denominators: returns sparse rows of D*H (integer entries) and D."""
    data.validate_for(g)
    n = g.n_vertices
    denom = 1
    for x in data.b:
        denom = denom * x.denominator // math.gcd(denom, x.denominator)
    for x in data.a:
        denom = denom * x.denominator // math.gcd(denom, x.denominator)
    diag = [int(x * denom) for x in data.b]
    off: list[dict[int, int]] = [{} for _ in range(n)]
    for (u, v), a in zip(_edges_of(g), data.a):
        w = int(a * denom)
        if u == v:
            diag[u] += 2 * w
        else:
            off[u][v] = off[u].get(v, 0) + w
            off[v][u] = off[v].get(u, 0) + w
    rows: list[list[tuple[int, int]]] = []
    for v in range(n):
        row = list(off[v].items())
        if diag[v]:
            row.append((v, diag[v]))
        rows.append(row)
    return rows, denom


def _apply(rows: list[list[tuple[int, int]]], vec: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    get = out.get
    for u, x in vec.items():
        for w, a in rows[u]:
            out[w] = get(w, 0) + a * x
    return out


def _dot(v1: dict[int, int], v2: dict[int, int]) -> int:
    if len(v2) < len(v1):
        v1, v2 = v2, v1
    get = v2.get
    return sum(x * get(u, 0) for u, x in v1.items())


def _vertex_integer_moments(
    rows: list[list[tuple[int, int]]], v: int, K: int
) -> list[int]:
    """[<delta_v, (DH)^k delta_v> for k <= K] by sparse application to delta_v."""
    half = (K + 1) // 2
    vecs: list[dict[int, int]] = [{v: 1}]
    for _ in range(half):
        vecs.append(_apply(rows, vecs[-1]))
    out = []
    for k in range(K + 1):
        i = k // 2
        out.append(_dot(vecs[i], vecs[k - i]))
    return out


def vertex_moments(g: GraphLike, data: JacobiData, v: int, K: int) -> list[Fraction]:
    """Exact <delta_v, H^k delta_v> for k = 0..K."""
    rows, denom = _integer_rows(g, data)
    ints = _vertex_integer_moments(rows, v, K)
    return [Fraction(ints[k], denom**k) for k in range(K + 1)]


def per_vertex_moment(g: GraphLike, data: JacobiData, v: int, k: int) -> Fraction:
    """Exact <delta_v, H^k delta_v>: the weighted closed-walk sum at v."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return vertex_moments(g, data, v, k)[k]


def trace_power_moments(g: GraphLike, data: JacobiData, K: int) -> MomentVector:
    """Exact m_k = n^-1 tr(H^k) for k = 0..K, by sparse application per vertex."""
    if K < 0:
        raise ValueError("K must be >= 0")
    rows, denom = _integer_rows(g, data)
    n = g.n_vertices
    totals = [0] * (K + 1)
    for v in range(n):
        for k, val in enumerate(_vertex_integer_moments(rows, v, K)):
            totals[k] += val
    return MomentVector(K, tuple(Fraction(totals[k], n * denom**k) for k in range(K + 1)))


def eigenvalues(g: GraphLike, data: JacobiData, cap: int = DEFAULT_EIGEN_CAP) -> np.ndarray:
    """Sorted eigenvalues (with multiplicity) of the assembled matrix, float64."""
    data.validate_for(g)
    n = g.n_vertices
    if n > cap:
        raise CapExceeded(f"eigensolve size {n} exceeds cap {cap}")
    mat = np.zeros((n, n))
    for v in range(n):
        mat[v, v] = float(data.b[v])
    for (u, v), a in zip(_edges_of(g), data.a):
        if u == v:
            mat[u, u] += 2.0 * float(a)
        else:
            mat[u, v] += float(a)
            mat[v, u] += float(a)
    return np.linalg.eigvalsh(mat)


def norm_bound(cover: ColoredMultigraph, data: JacobiData) -> Fraction:
    """Gamma = |b| + 2*sum_j a_j for period-1 data on a rose cover.

    Every eigenvalue of every cover with these parameters lies in
    [-Gamma, Gamma].  Rejects non-constant data: the bound is only claimed
    for the period-1 rose case.
    """
    data.validate_for(cover)
    if cover.ell is None:
        raise ValueError("not a rose cover")
    b = data.b[0]
    if any(x != b for x in data.b):
        raise ValueError("diagonal b is not constant")
    a_by_color: dict[int, Fraction] = {}
    for c, a in zip(cover.edge_colors(), data.a):
        if c is None:
            raise ValueError("cover has uncolored edges")
        if a_by_color.setdefault(c, a) != a:
            raise ValueError(f"coupling not constant on color {c}")
    if len(a_by_color) != cover.ell:
        # colors with no edge (impossible on a valid cover) would hide a term
        raise ValueError("some color has no edges")
    return abs(b) + 2 * sum(a_by_color.values())


def cdf_distance(s1: np.ndarray, s2: np.ndarray) -> float:
    """Kolmogorov (sup) distance between the two empirical CDFs."""
    s1 = np.sort(np.asarray(s1, dtype=float))
    s2 = np.sort(np.asarray(s2, dtype=float))
    if len(s1) == 0 or len(s2) == 0:
        raise ValueError("spectra must be nonempty")
    grid = np.concatenate([s1, s2])
    c1 = np.searchsorted(s1, grid, side="right") / len(s1)
    c2 = np.searchsorted(s2, grid, side="right") / len(s2)
    return float(np.max(np.abs(c1 - c2)))


def format_spectrum(s: np.ndarray) -> str:
    """Newline-separated decimals with 12 significant digits."""
    return "\n".join(f"{x:.12g}" for x in s) + "\n"


def moment_fraction_str(x: Fraction) -> str:
    """Exact fraction string p/q (integers render without the /q)."""
    return str(x)
