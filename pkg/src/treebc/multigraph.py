"""Colored half-edge multigraphs, covers of the rose, and covering maps.

The universal carrier is a multigraph whose half-edges carry colors (j, sign)
with j in 1..l and sign +1/-1; an edge is a pairing of a (j,+1) half-edge with
a (j,-1) half-edge.  Unpaired half-edges are "dangling".  Self-loops and
parallel edges are first-class.  A cover of the rose with l petals is such a
graph where every vertex carries exactly one half-edge of each of the 2l
colors and the pairing is total.

Canonical layout: covers built by this package store the half-edge of color
slot c at vertex v under index v*2l + c, with slots 0..l-1 = (1,+)..(l,+) and
slots l..2l-1 = (1,-)..(l,-).

Conventions fixed here (the underlying math does not force a choice):
- spanning trees are BFS trees from vertex 0, taking incident edges in
  increasing edge-index order;
- a cut edge is oriented with its "+" end at the endpoint discovered first.

Graphs are immutable once built; all operations are pure queries or
constructors building fresh graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Sequence, Union

from treebc.errors import InvariantBreach

if TYPE_CHECKING:
    from treebc.jacobi import JacobiData

Color = tuple[int, int]  # (index j >= 1, sign +1/-1)


def color_slot(ell: int, j: int, sign: int) -> int:
    """Slot of color (j, sign) in the canonical per-vertex layout."""
    return (j - 1) if sign > 0 else (ell + j - 1)


def slot_color(ell: int, c: int) -> Color:
    return (c + 1, 1) if c < ell else (c - ell + 1, -1)


class ColoredMultigraph:
    """Vertices plus colored half-edges with a (possibly partial) pairing involution."""

    def __init__(self, n_vertices: int, ell: Optional[int] = None):
        self.n_vertices = n_vertices
        self.ell = ell
        self.he_vertex: list[int] = []
        self.he_color: list[Optional[Color]] = []
        self.partner: list[int] = []  # -1 marks a dangling half-edge
        self._edges: Optional[list[tuple[int, int]]] = None
        self._incidence: Optional[list[list[int]]] = None

    # -- construction -----------------------------------------------------

    def add_half_edge(self, v: int, color: Optional[Color] = None) -> int:
        if not 0 <= v < self.n_vertices:
            raise ValueError(f"vertex {v} out of range")
        self.he_vertex.append(v)
        self.he_color.append(color)
        self.partner.append(-1)
        self._edges = None
        self._incidence = None
        return len(self.he_vertex) - 1

    def pair(self, h1: int, h2: int) -> None:
        if h1 == h2:
            raise ValueError("pairing must be fixed-point free")
        if self.partner[h1] != -1 or self.partner[h2] != -1:
            raise ValueError("half-edge already paired")
        c1, c2 = self.he_color[h1], self.he_color[h2]
        if (c1 is None) != (c2 is None):
            raise ValueError("cannot pair colored with uncolored half-edge")
        if c1 is not None and (c1[0] != c2[0] or c1[1] != -c2[1]):
            raise ValueError(f"colors {c1} and {c2} do not match across an edge")
        self.partner[h1] = h2
        self.partner[h2] = h1
        self._edges = None

    # -- half-edge interface (shared with FiniteGraph) ---------------------

    @property
    def half_edge_count(self) -> int:
        return len(self.he_vertex)

    def he_owner(self, h: int) -> int:
        return self.he_vertex[h]

    def he_partner(self, h: int) -> int:
        return self.partner[h]

    def half_edges_of(self, v: int) -> list[int]:
        return self.incidence()[v]

    def incidence(self) -> list[list[int]]:
        if self._incidence is None:
            inc: list[list[int]] = [[] for _ in range(self.n_vertices)]
            for h, v in enumerate(self.he_vertex):
                inc[v].append(h)
            self._incidence = inc
        return self._incidence

    # -- derived structure --------------------------------------------------

    def dangling(self) -> list[int]:
        return [h for h, p in enumerate(self.partner) if p == -1]

    def edge_pairs(self) -> list[tuple[int, int]]:
        """Edges as (h_small, h_big) half-edge pairs, ordered by h_small."""
        if self._edges is None:
            self._edges = [(h, p) for h, p in enumerate(self.partner) if p > h]
        return self._edges

    def edge_list(self) -> list[tuple[int, int]]:
        """Edges as (owner of first half, owner of second half)."""
        return [(self.he_vertex[h1], self.he_vertex[h2]) for h1, h2 in self.edge_pairs()]

    def edge_colors(self) -> list[Optional[int]]:
        """Color index j per edge (aligned with edge_list), None if uncolored."""
        out = []
        for h1, _ in self.edge_pairs():
            c = self.he_color[h1]
            out.append(None if c is None else c[0])
        return out

    def degree(self, v: int) -> int:
        return len(self.incidence()[v])

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return True
        seen = bytearray(self.n_vertices)
        seen[0] = 1
        stack = [0]
        count = 1
        inc = self.incidence()
        while stack:
            u = stack.pop()
            for h in inc[u]:
                p = self.partner[h]
                if p == -1:
                    continue
                w = self.he_vertex[p]
                if not seen[w]:
                    seen[w] = 1
                    count += 1
                    stack.append(w)
        return count == self.n_vertices

    def adjacency(self) -> list[list[int]]:
        """Neighbor lists (with multiplicity; self-loops appear twice)."""
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edge_list():
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def to_finite_graph(self) -> "FiniteGraph":
        return FiniteGraph(self.n_vertices, self.edge_list())


# A rose cover is a ColoredMultigraph with total pairing and one half-edge of
# each color per vertex; `validate_rose_cover` checks the claim.
RoseCover = ColoredMultigraph


def canonical_cover_shell(n: int, ell: int) -> ColoredMultigraph:
    """n vertices, each with one half-edge per color in canonical layout, nothing paired."""
    g = ColoredMultigraph(n, ell)
    for v in range(n):
        for c in range(2 * ell):
            g.add_half_edge(v, slot_color(ell, c))
    return g


def cover_from_color_pairs(n: int, ell: int, pairs: Sequence[tuple[int, int, int]]) -> RoseCover:
    """Build a rose cover from (v_plus, j, v_minus) triples.

    Each triple pairs the (j,+) half-edge of v_plus with the (j,-) half-edge
    of v_minus; the triples must use every (vertex, color, sign) exactly once.
    """
    g = canonical_cover_shell(n, ell)
    for u, j, v in pairs:
        g.pair(u * 2 * ell + color_slot(ell, j, 1), v * 2 * ell + color_slot(ell, j, -1))
    return g


def rose_graph(ell: int) -> RoseCover:
    """The rose itself: one vertex, l self-loops (the trivial cover)."""
    return cover_from_color_pairs(1, ell, [(0, j, 0) for j in range(1, ell + 1)])


def validate_rose_cover(g: ColoredMultigraph, ell: int) -> list[str]:
    """Check the rose-cover invariants; an empty list means ok.

    Violations are data, not failures: callers decide what to do with them.
    """
    violations: list[str] = []
    n_dangling = len(g.dangling())
    if n_dangling:
        violations.append(f"{n_dangling} unpaired half-edges")
    for h, p in enumerate(g.partner):
        if p == -1:
            continue
        if p == h:
            violations.append(f"half-edge {h} paired with itself")
        elif g.partner[p] != h:
            violations.append(f"pairing not an involution at half-edge {h}")
        elif p > h:
            c1, c2 = g.he_color[h], g.he_color[p]
            if c1 is None or c2 is None:
                violations.append(f"uncolored half-edge in edge ({h},{p})")
            elif c1[0] != c2[0] or c1[1] != -c2[1]:
                violations.append(f"edge ({h},{p}) joins colors {c1} and {c2}")
    for v in range(g.n_vertices):
        colors = sorted(
            (c for c in (g.he_color[h] for h in g.half_edges_of(v)) if c is not None),
            key=lambda c: (c[0], -c[1]),
        )
        expected = sorted(
            ((j, s) for j in range(1, ell + 1) for s in (1, -1)), key=lambda c: (c[0], -c[1])
        )
        if colors != expected:
            seen: set[Color] = set()
            dup = None
            for c in colors:
                if c in seen:
                    dup = c
                    break
                seen.add(c)
            if dup is not None:
                violations.append(f"duplicate color {dup} at vertex {v}")
            else:
                violations.append(f"vertex {v} does not carry one half-edge of each color")
    if not g.is_connected():
        violations.append("graph is not connected")
    return violations


class FiniteGraph:
    """A finite graph: vertices 0..p-1 and an edge list (loops, multi-edges allowed).

    May carry a spanning-tree marking (`tree_edges`) plus the BFS discovery
    order that produced it.  The half-edge view places edge e's half-edges at
    indices 2e (first endpoint) and 2e+1 (second endpoint).
    """

    def __init__(
        self,
        n_vertices: int,
        edges: Sequence[tuple[int, int]],
        tree_edges: Optional[frozenset[int]] = None,
        discovery: Optional[tuple[int, ...]] = None,
    ):
        for u, v in edges:
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u},{v}) out of range")
        self.n_vertices = n_vertices
        self.edges = [(u, v) for u, v in edges]
        self.tree_edges = tree_edges
        self.discovery = discovery
        self._incident: Optional[list[list[int]]] = None

    # -- half-edge interface ----------------------------------------------

    @property
    def half_edge_count(self) -> int:
        return 2 * len(self.edges)

    def he_owner(self, h: int) -> int:
        return self.edges[h // 2][h % 2]

    def he_partner(self, h: int) -> int:
        return h ^ 1

    def half_edges_of(self, v: int) -> list[int]:
        out = []
        for e in self.incident_edges()[v]:
            u, w = self.edges[e]
            if u == v:
                out.append(2 * e)
            if w == v:
                out.append(2 * e + 1)
        return out

    # -- structure ----------------------------------------------------------

    def incident_edges(self) -> list[list[int]]:
        """Edge ids per vertex, each id once even for self-loops, ascending."""
        if self._incident is None:
            inc: list[list[int]] = [[] for _ in range(self.n_vertices)]
            for e, (u, v) in enumerate(self.edges):
                inc[u].append(e)
                if v != u:
                    inc[v].append(e)
            self._incident = inc
        return self._incident

    def degree(self, v: int) -> int:
        d = 0
        for e in self.incident_edges()[v]:
            u, w = self.edges[e]
            d += 2 if u == w else 1
        return d

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return True
        seen = bytearray(self.n_vertices)
        seen[0] = 1
        stack = [0]
        count = 1
        while stack:
            x = stack.pop()
            for e in self.incident_edges()[x]:
                u, v = self.edges[e]
                w = v if u == x else u
                if not seen[w]:
                    seen[w] = 1
                    count += 1
                    stack.append(w)
        return count == self.n_vertices

    def is_leafless(self) -> bool:
        return all(self.degree(v) >= 2 for v in range(self.n_vertices))

    def rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    def cut_edges(self) -> list[int]:
        if self.tree_edges is None:
            raise ValueError("graph carries no spanning-tree marking")
        return [e for e in range(len(self.edges)) if e not in self.tree_edges]

    def cut_orientation(self, e: int) -> tuple[int, int]:
        """(tail, head) of a cut edge: the tail is the endpoint discovered first."""
        if self.discovery is None:
            raise ValueError("graph carries no BFS discovery order")
        u, v = self.edges[e]
        if self.discovery[u] <= self.discovery[v]:
            return u, v
        return v, u


def spanning_tree(g: FiniteGraph) -> tuple[FiniteGraph, list[int], int]:
    """Deterministic BFS spanning tree (from vertex 0, lowest edge index first).

    Returns the marked graph, the cut-edge list (ascending edge ids), and the
    rank l = q - p + 1.  Rejects disconnected or leafy input.
    """
    if not g.is_connected():
        raise ValueError("graph is not connected")
    if not g.is_leafless():
        raise ValueError("graph has a leaf (vertex of degree < 2)")
    n = g.n_vertices
    disc = [-1] * n
    disc[0] = 0
    tree: set[int] = set()
    queue = deque([0])
    t = 1
    inc = g.incident_edges()
    while queue:
        x = queue.popleft()
        for e in inc[x]:
            u, v = g.edges[e]
            w = v if u == x else u
            if disc[w] == -1:
                disc[w] = t
                t += 1
                tree.add(e)
                queue.append(w)
    marked = FiniteGraph(n, g.edges, tree_edges=frozenset(tree), discovery=tuple(disc))
    cut = marked.cut_edges()
    return marked, cut, g.rank()


GraphLike = Union[ColoredMultigraph, FiniteGraph]


@dataclass
class CoveringMap:
    """A candidate covering map given on vertices and half-edges."""

    source: GraphLike
    target: GraphLike
    vertex_map: list[int]
    half_edge_map: list[int]


def covering_map_check(m: CoveringMap) -> bool:
    """True iff `m` is a genuine covering map.

    Checks that half-edge images respect ownership and the pairing, and that
    at every source vertex the half-edge map restricts to a bijection onto the
    half-edges of the image vertex (the local homeomorphism condition).
    Sources with dangling half-edges fail: the maps must be totally defined.
    """
    s, t = m.source, m.target
    if len(m.vertex_map) != s.n_vertices or len(m.half_edge_map) != s.half_edge_count:
        return False
    for h in range(s.half_edge_count):
        th = m.half_edge_map[h]
        if not 0 <= th < t.half_edge_count:
            return False
        if m.vertex_map[s.he_owner(h)] != t.he_owner(th):
            return False
        p = s.he_partner(h)
        if p == -1:
            return False
        if m.half_edge_map[p] != t.he_partner(th):
            return False
    for v in range(s.n_vertices):
        image = sorted(m.half_edge_map[h] for h in s.half_edges_of(v))
        if image != sorted(t.half_edges_of(m.vertex_map[v])):
            return False
    return True


def rose_covering_map(cover: ColoredMultigraph, ell: int) -> CoveringMap:
    """The canonical projection of a rose cover onto the rose (by color)."""
    rose = rose_graph(ell)
    hmap = []
    for h in range(cover.half_edge_count):
        c = cover.he_color[h]
        if c is None:
            raise ValueError("cover has uncolored half-edges")
        hmap.append(color_slot(ell, c[0], c[1]))
    return CoveringMap(cover, rose, [0] * cover.n_vertices, hmap)


def lego_expand(
    cover: RoseCover, pattern: FiniteGraph, data: "JacobiData"
) -> tuple[FiniteGraph, "JacobiData", CoveringMap]:
    """Expand a rose cover into a cover of a general finite leafless graph.

    Every vertex of `cover` becomes a copy of the pattern's spanning tree with
    its diagonal values and intra-tree couplings; every color-j edge of the
    cover re-glues one copy of cut edge j (cut edges numbered 1..l in edge-id
    order, oriented + at the endpoint discovered first).  The returned
    covering map always passes `covering_map_check`.
    """
    from treebc.jacobi import JacobiData

    if pattern.tree_edges is None:
        pattern, _, _ = spanning_tree(pattern)
    cut = pattern.cut_edges()
    ell = cover.ell
    if ell is None or len(cut) != ell:
        raise ValueError(f"pattern rank {len(cut)} does not match cover ell {ell}")
    data.validate_for(pattern)
    p = pattern.n_vertices
    ncov = cover.n_vertices

    out_edges: list[tuple[int, int]] = []
    out_a: list[Fraction] = []
    hmap: list[int] = []

    tree_ids = sorted(pattern.tree_edges)
    for v in range(ncov):
        base = v * p
        for e in tree_ids:
            x, y = pattern.edges[e]
            out_edges.append((base + x, base + y))
            out_a.append(data.a[e])
            hmap.extend((2 * e, 2 * e + 1))

    # color-j edges of the cover, grouped by color then by cover edge order
    by_color: list[list[tuple[int, int]]] = [[] for _ in range(ell)]
    for h1, h2 in cover.edge_pairs():
        c = cover.he_color[h1]
        if c is None:
            raise ValueError("cover has uncolored half-edges")
        j, sign = c
        plus, minus = (h1, h2) if sign > 0 else (h2, h1)
        by_color[j - 1].append((cover.he_vertex[plus], cover.he_vertex[minus]))

    for j in range(1, ell + 1):
        e = cut[j - 1]
        tail, head = pattern.cut_orientation(e)
        x, y = pattern.edges[e]
        tail_half, head_half = (2 * e, 2 * e + 1) if tail == x else (2 * e + 1, 2 * e)
        for u, w in by_color[j - 1]:
            out_edges.append((u * p + tail, w * p + head))
            out_a.append(data.a[e])
            hmap.extend((tail_half, head_half))

    out_graph = FiniteGraph(ncov * p, out_edges)
    out_data = JacobiData(tuple(data.b) * ncov, tuple(out_a))
    vmap = [i % p for i in range(ncov * p)]
    cm = CoveringMap(out_graph, pattern, vmap, hmap)
    if not covering_map_check(cm):
        raise InvariantBreach("lego expansion produced a non-covering map")
    return out_graph, out_data, cm


# -- textual format ----------------------------------------------------------
#
# Header `rose-cover ℓ=<l> n=<n>`, then one line per edge
# `u (j,s) v (j,s')` with the + side first, then one line `u (j,s) -` per
# dangling half-edge.  Lines are sorted, so serialize(parse(text)) == text.


def _color_token(c: Color) -> str:
    return f"({c[0]},{'+' if c[1] > 0 else '-'})"


def _parse_color(tok: str) -> Color:
    if not (tok.startswith("(") and tok.endswith(")")):
        raise ValueError(f"malformed color token {tok!r}")
    j_s, sign_s = tok[1:-1].split(",")
    return int(j_s), 1 if sign_s == "+" else -1


def serialize_cover(g: ColoredMultigraph) -> str:
    """Serialize a colored multigraph (rose cover or ball) to the textual format."""
    if g.ell is None:
        raise ValueError("graph has no color count ell")
    edge_lines = []
    for h1, h2 in g.edge_pairs():
        c1 = g.he_color[h1]
        if c1 is None:
            raise ValueError("uncolored half-edge cannot be serialized")
        plus, minus = (h1, h2) if c1[1] > 0 else (h2, h1)
        u, v = g.he_vertex[plus], g.he_vertex[minus]
        j = c1[0]
        edge_lines.append(f"{u} ({j},+) {v} ({j},-)")
    dangle_lines = []
    for h in g.dangling():
        c = g.he_color[h]
        if c is None:
            raise ValueError("uncolored half-edge cannot be serialized")
        dangle_lines.append(f"{g.he_vertex[h]} {_color_token(c)} -")
    lines = [f"rose-cover ℓ={g.ell} n={g.n_vertices}"]
    lines.extend(sorted(edge_lines))
    lines.extend(sorted(dangle_lines))
    return "\n".join(lines) + "\n"


def parse_cover(text: str) -> ColoredMultigraph:
    """Parse the textual format back into a colored multigraph."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty cover text")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "rose-cover":
        raise ValueError(f"bad header {lines[0]!r}")
    ell = int(header[1].split("=")[1])
    n = int(header[2].split("=")[1])
    g = ColoredMultigraph(n, ell)
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) == 3 and toks[2] == "-":
            g.add_half_edge(int(toks[0]), _parse_color(toks[1]))
        elif len(toks) == 4:
            h1 = g.add_half_edge(int(toks[0]), _parse_color(toks[1]))
            h2 = g.add_half_edge(int(toks[2]), _parse_color(toks[3]))
            g.pair(h1, h2)
        else:
            raise ValueError(f"malformed line {ln!r}")
    return g
