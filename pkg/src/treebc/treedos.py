"""Density-of-states moments of the lifted operator on the universal cover.

Closed walks of length k from a vertex of a tree stay within distance
floor(k/2), so moments through order K can be read off a depth-ceil(K/2)
truncation of the cover.  `dos_moments` does exactly that for a general base
graph (one lift per base vertex, averaged); `rose_dos_moments` shortcuts the
rose case with a walk dynamic program over excursion decompositions, keyed by
the color of the edge above the current vertex, in O(K^2 l) rational
operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from treebc.jacobi import JacobiData, MomentVector, vertex_moments
from treebc.multigraph import CoveringMap, FiniteGraph


@dataclass
class TruncatedCover:
    """Depth-d ball of the universal cover around a lift of `base`.

    `graph` is the tree (vertex 0 is the base lift), `data` the lifted Jacobi
    data, and `covering` the projection; the projection is a local bijection
    everywhere except at the depth-d leaves, so `covering_map_check` is not
    claimed for it.
    """

    graph: FiniteGraph
    data: JacobiData
    base: int
    depth: int
    vertex_base: tuple[int, ...]
    edge_base: tuple[int, ...]
    covering: CoveringMap


def truncated_universal_cover(
    g: FiniteGraph, data: JacobiData, base: int, depth: int
) -> TruncatedCover:
    """BFS unfolding of non-backtracking directed-edge extensions from `base`.

    Directed edges are (edge id, endpoint slot); a step never immediately
    re-traverses the edge it arrived by, but may go around a self-loop again
    in the same sense (the two senses of a loop are distinct directed edges).
    """
    data.validate_for(g)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    inc = g.incident_edges()

    def out_dirs(v: int) -> list[tuple[int, int]]:
        dirs = []
        for e in inc[v]:
            u, w = g.edges[e]
            if u == w:
                dirs.extend([(e, 0), (e, 1)])
            else:
                dirs.append((e, 0) if u == v else (e, 1))
        return dirs

    node_base = [base]
    node_in: list[Optional[tuple[int, int]]] = [None]
    tree_edges: list[tuple[int, int]] = []
    edge_base: list[int] = []
    edge_dir: list[tuple[int, int]] = []
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for node in frontier:
            v = node_base[node]
            came = node_in[node]
            for e, slot in out_dirs(v):
                if came is not None and e == came[0] and slot != came[1]:
                    continue  # backtracking: the reverse of the arriving direction
                child = len(node_base)
                u, w = g.edges[e]
                node_base.append(w if slot == 0 else u)
                node_in.append((e, slot))
                tree_edges.append((node, child))
                edge_base.append(e)
                edge_dir.append((e, slot))
                nxt.append(child)
        frontier = nxt

    tree = FiniteGraph(len(node_base), tree_edges)
    lifted = JacobiData(
        tuple(data.b[node_base[i]] for i in range(len(node_base))),
        tuple(data.a[e] for e in edge_base),
    )
    hmap: list[int] = []
    for e, slot in edge_dir:
        from_half = 2 * e + slot
        hmap.extend((from_half, from_half ^ 1))
    covering = CoveringMap(tree, g, list(node_base), hmap)
    return TruncatedCover(
        tree, lifted, 0, depth, tuple(node_base), tuple(edge_base), covering
    )


def dos_moments(
    g: FiniteGraph, data: JacobiData, K: int, depth: Optional[int] = None
) -> MomentVector:
    """Exact DOS moments m_0..m_K: average over base vertices of the moment of
    the lifted operator at one lift each."""
    if K < 0:
        raise ValueError("K must be >= 0")
    if not g.is_connected() or not g.is_leafless():
        raise ValueError("base graph must be connected and leafless")
    if depth is None:
        depth = (K + 1) // 2
    p = g.n_vertices
    totals = [Fraction(0)] * (K + 1)
    for base in range(p):
        tc = truncated_universal_cover(g, data, base, depth)
        for k, val in enumerate(vertex_moments(tc.graph, tc.data, 0, K)):
            totals[k] += val
    return MomentVector(K, tuple(t / p for t in totals))


def rose_dos_moments(ell: int, b, a: Sequence, K: int) -> MomentVector:
    """DOS moments for the rose with l petals, period-1 data (b, a_1..a_l).

    Walk DP: a closed walk at a vertex is a sequence of stays and excursions
    (down an edge, a closed walk grounded at the child, back up).  From a
    vertex whose parent edge has color j the downward colors are all 2l
    except (j, -s), so the grounded-walk table is keyed by remaining length
    and parent color.  m_2 in particular comes out as b^2 + 2*sum a_m^2.
    """
    if ell < 1 or len(a) != ell:
        raise ValueError("need one coupling per color")
    if K < 0:
        raise ValueError("K must be >= 0")
    bq = Fraction(b)
    aq = [Fraction(x) for x in a]
    a2 = [x * x for x in aq]

    # u[t][j]: weight sum of grounded walks of length t at a vertex with
    # parent color j; w[t][j]: excursion openers from such a vertex.
    u = [[Fraction(0)] * ell for _ in range(K + 1)]
    w = [[Fraction(0)] * ell for _ in range(K + 1)]
    W = [Fraction(0)] * (K + 1)  # excursion openers from the root

    def fill_w(t: int) -> None:
        tot = sum(2 * a2[i] * u[t][i] for i in range(ell))
        W[t] = tot
        for j in range(ell):
            w[t][j] = tot - a2[j] * u[t][j]

    for j in range(ell):
        u[0][j] = Fraction(1)
    fill_w(0)
    for t in range(1, K + 1):
        for j in range(ell):
            val = bq * u[t - 1][j]
            for s in range(t - 1):
                val += w[s][j] * u[t - 2 - s][j]
            u[t][j] = val
        fill_w(t)

    r = [Fraction(0)] * (K + 1)
    r[0] = Fraction(1)
    for t in range(1, K + 1):
        val = bq * r[t - 1]
        for s in range(t - 1):
            val += W[s] * r[t - 2 - s]
        r[t] = val
    return MomentVector(K, tuple(r))
