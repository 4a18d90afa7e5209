"""Homogeneous covers from normal subgroups of the free group.

The free group on two generators embeds in SL(2,Z) as the Sanov group
(generated by [[1,2],[0,1]] and [[1,0],[2,1]]); higher ranks embed via
explicit free bases of finite-index subgroups read off graph covers (the
circulant-style degree-4 graphs K_n and the Schreier construction).  Reducing
the generator images mod 2^n cuts out finite Cayley-graph covers of the rose:
these are the homogeneous covers, nested in a tower whose injectivity radius
grows without bound.

Words are tuples of signed generator indices, always freely reduced.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from treebc.errors import CapExceeded
from treebc.jacobi import JacobiData, _integer_rows, _vertex_integer_moments
from treebc.multigraph import (
    ColoredMultigraph,
    CoveringMap,
    RoseCover,
    color_slot,
    cover_from_color_pairs,
)

Word = tuple[int, ...]
IntMat = tuple[int, int, int, int]  # row-major 2x2 over Z

DEFAULT_QUOTIENT_CAP = 200_000


# -- free words ---------------------------------------------------------------


def free_reduce(letters: Sequence[int]) -> Word:
    """Freely reduce a letter sequence (cancel adjacent x, -x)."""
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def word_inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def word_concat(*ws: Sequence[int]) -> Word:
    out: list[int] = []
    for w in ws:
        out.extend(w)
    return free_reduce(out)


# -- integer 2x2 matrices ------------------------------------------------------


def mat_mul(m1: IntMat, m2: IntMat) -> IntMat:
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def mat_inv_det1(m: IntMat) -> IntMat:
    a, b, c, d = m
    return (d, -b, -c, a)


IDENTITY: IntMat = (1, 0, 0, 1)


def sanov_generators() -> tuple[IntMat, IntMat]:
    """The two free generators [[1,2],[0,1]] and [[1,0],[2,1]] of the Sanov group."""
    return (1, 2, 0, 1), (1, 0, 2, 1)


def word_matrix(w: Word, gens: Sequence[IntMat]) -> IntMat:
    """Evaluate a word in the given generator matrices (exact integers)."""
    m = IDENTITY
    for x in w:
        g = gens[abs(x) - 1]
        m = mat_mul(m, g if x > 0 else mat_inv_det1(g))
    return m


class MatMod2n(NamedTuple):
    """2x2 integer matrix mod 2^n with determinant 1."""

    a: int
    b: int
    c: int
    d: int
    n: int

    @classmethod
    def from_int(cls, m: IntMat, n: int) -> "MatMod2n":
        mod = 1 << n
        mm = cls(m[0] % mod, m[1] % mod, m[2] % mod, m[3] % mod, n)
        if (mm.a * mm.d - mm.b * mm.c) % mod != 1 % mod:
            raise ValueError("determinant is not 1 mod 2^n")
        return mm

    def mul(self, o: "MatMod2n") -> "MatMod2n":
        mod = 1 << self.n
        return MatMod2n(
            (self.a * o.a + self.b * o.c) % mod,
            (self.a * o.b + self.b * o.d) % mod,
            (self.c * o.a + self.d * o.c) % mod,
            (self.c * o.b + self.d * o.d) % mod,
            self.n,
        )

    def inv(self) -> "MatMod2n":
        mod = 1 << self.n
        return MatMod2n(self.d % mod, -self.b % mod, -self.c % mod, self.a % mod, self.n)

    def is_identity(self) -> bool:
        return self.a == 1 % (1 << self.n) and self.b == 0 and self.c == 0 and self.d == self.a

    def reduce(self, n2: int) -> "MatMod2n":
        mod = 1 << n2
        return MatMod2n(self.a % mod, self.b % mod, self.c % mod, self.d % mod, n2)


@dataclass(frozen=True)
class GeneratorImages:
    """Images of the free generators of F_l inside the Sanov group."""

    mats: tuple[IntMat, ...]
    words: tuple[Word, ...]  # the words in {a, b} each matrix came from

    @property
    def ell(self) -> int:
        return len(self.mats)


# -- graph constructions -------------------------------------------------------


def build_Kn(n: int) -> RoseCover:
    """Degree-4 cover of the rose with 2 petals on Z_n: color 1 joins m to m+1,
    color 2 joins m to m+2 (self-loops at n=2, multi-edges at n <= 4)."""
    if n < 2:
        raise ValueError("need n >= 2")
    pairs = [(m, 1, (m + 1) % n) for m in range(n)]
    pairs += [(m, 2, (m + 2) % n) for m in range(n)]
    return cover_from_color_pairs(n, 2, pairs)


def _bfs_tree(cover: ColoredMultigraph) -> tuple[list[int], dict[int, tuple[int, int]], set[int]]:
    """BFS tree over the cover's edges, smallest half-edge id first.

    Returns (discovery order per vertex, parent map vertex -> (edge id, letter
    into the vertex), tree edge id set).
    """
    if not cover.is_connected():
        raise ValueError("cover is not connected")
    pairs = cover.edge_pairs()
    inc: list[list[int]] = [[] for _ in range(cover.n_vertices)]
    for e, (h1, h2) in enumerate(pairs):
        inc[cover.he_vertex[h1]].append(e)
        u, v = cover.he_vertex[h1], cover.he_vertex[h2]
        if v != u:
            inc[v].append(e)
    for lst in inc:
        lst.sort()
    disc = [-1] * cover.n_vertices
    disc[0] = 0
    parent: dict[int, tuple[int, int]] = {}
    tree: set[int] = set()
    queue = deque([0])
    t = 1
    while queue:
        x = queue.popleft()
        for e in inc[x]:
            h1, h2 = pairs[e]
            u, v = cover.he_vertex[h1], cover.he_vertex[h2]
            w = v if u == x else u
            if disc[w] == -1:
                disc[w] = t
                t += 1
                tree.add(e)
                # letter of the traversal x -> w: sign of the half-edge at x
                hx = h1 if cover.he_vertex[h1] == x else h2
                j, sign = cover.he_color[hx]  # type: ignore[misc]
                parent[w] = (e, j if sign > 0 else -j)
                queue.append(w)
    return disc, parent, tree


def schreier_generators(cover: RoseCover) -> list[Word]:
    """A free basis of the cover's fundamental group as words in the rose petals.

    Uses the deterministic BFS spanning tree.  Each non-tree edge is traversed
    starting from its endpoint discovered later (a loop goes out by the tree,
    crosses back by the extra edge): the word is tree-path(start), the signed
    label of the crossing, then the reverse tree path from the other end.
    """
    disc, parent, tree = _bfs_tree(cover)
    pairs = cover.edge_pairs()

    paths: dict[int, Word] = {0: ()}

    def path_to(v: int) -> Word:
        if v not in paths:
            e, letter = parent[v]
            h1, h2 = pairs[e]
            u = cover.he_vertex[h1] if cover.he_vertex[h2] == v else cover.he_vertex[h2]
            if cover.he_vertex[h1] == v and cover.he_vertex[h2] == v:
                u = v
            paths[v] = path_to(u) + (letter,)
        return paths[v]

    words = []
    for e in range(len(pairs)):
        if e in tree:
            continue
        h1, h2 = pairs[e]
        x, y = cover.he_vertex[h1], cover.he_vertex[h2]
        if x == y:
            start_h = h1 if cover.he_color[h1][1] > 0 else h2  # type: ignore[index]
            start, other = x, y
        elif disc[x] >= disc[y]:
            start_h, start, other = h1, x, y
        else:
            start_h, start, other = h2, y, x
        j, sign = cover.he_color[start_h]  # type: ignore[misc]
        letter = j if sign > 0 else -j
        words.append(word_concat(path_to(start), (letter,), word_inverse(path_to(other))))
    return words


def free_generator_images(ell: int) -> GeneratorImages:
    """Images of free generators of F_l in the Sanov group.

    l = 2 gives the Sanov generators themselves; l >= 3 evaluates a Schreier
    basis of the rank-l subgroup carried by the cover K_{l-1}.
    """
    if ell < 2:
        raise ValueError("need ell >= 2")
    A, B = sanov_generators()
    if ell == 2:
        return GeneratorImages((A, B), ((1,), (2,)))
    words = tuple(schreier_generators(build_Kn(ell - 1)))
    mats = tuple(word_matrix(w, (A, B)) for w in words)
    return GeneratorImages(mats, words)


# -- congruence quotients --------------------------------------------------------


@dataclass
class QuotientCover:
    """Cayley-graph cover of the rose cut out by the level-n congruence condition."""

    cover: RoseCover
    level: int
    elements: tuple[MatMod2n, ...]
    index: dict[MatMod2n, int]

    @property
    def size(self) -> int:
        return len(self.elements)


def congruence_quotient(
    gens: GeneratorImages, n: int, cap: int = DEFAULT_QUOTIENT_CAP
) -> QuotientCover:
    """The Cayley graph of the generator images mod 2^n.

    Vertices are the BFS closure of the identity under right multiplication
    by the images and their inverses (colors 1..l then their inverses, queue
    order); the color-j edge at v holds (j,+) at v and (j,-) at v*g_j.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    ell = gens.ell
    g_mod = [MatMod2n.from_int(m, n) for m in gens.mats]
    steps = g_mod + [g.inv() for g in g_mod]
    ident = MatMod2n.from_int(IDENTITY, n)
    elements: list[MatMod2n] = [ident]
    index: dict[MatMod2n, int] = {ident: 0}
    queue = deque([ident])
    while queue:
        m = queue.popleft()
        for g in steps:
            t = m.mul(g)
            if t not in index:
                if len(elements) >= cap:
                    raise CapExceeded(f"quotient exceeds vertex cap {cap}")
                index[t] = len(elements)
                elements.append(t)
                queue.append(t)
    pairs = []
    for v, m in enumerate(elements):
        for j in range(1, ell + 1):
            pairs.append((v, j, index[m.mul(g_mod[j - 1])]))
    cover = cover_from_color_pairs(len(elements), ell, pairs)
    return QuotientCover(cover, n, tuple(elements), index)


def tower_covering_map(hi: QuotientCover, lo: QuotientCover) -> CoveringMap:
    """The color-respecting projection from level n+k to level n (mod-2^n reduction)."""
    if hi.level <= lo.level:
        raise ValueError("need a strictly higher tower level as source")
    ell = hi.cover.ell
    assert ell is not None and ell == lo.cover.ell
    vmap = [lo.index[m.reduce(lo.level)] for m in hi.elements]
    hmap = []
    for h in range(hi.cover.half_edge_count):
        v = hi.cover.he_vertex[h]
        j, sign = hi.cover.he_color[h]  # type: ignore[misc]
        hmap.append(vmap[v] * 2 * ell + color_slot(ell, j, sign))
    return CoveringMap(hi.cover, lo.cover, vmap, hmap)


def injectivity_radius(gens: GeneratorImages, n: int, cap: int) -> Optional[int]:
    """Length of the shortest nonempty reduced word whose image is 1 mod 2^n.

    Breadth-first over reduced words with matrices reduced mod 2^n, memoizing
    (matrix, last letter) states, so the search is polynomial in the quotient
    size.  Returns None when every word of length <= cap misses the identity
    (radius >= cap + 1); that is a valid answer, not an error.
    """
    if cap < 1:
        raise ValueError("need cap >= 1")
    ell = gens.ell
    g_mod = [MatMod2n.from_int(m, n) for m in gens.mats]
    ident = MatMod2n.from_int(IDENTITY, n)
    mats: dict[int, MatMod2n] = {}
    for j in range(1, ell + 1):
        mats[j] = g_mod[j - 1]
        mats[-j] = g_mod[j - 1].inv()
    letters = list(range(1, ell + 1)) + [-j for j in range(1, ell + 1)]
    frontier = [(mats[x], x) for x in letters]
    visited = set(frontier)
    length = 1
    while length <= cap:
        if not frontier:
            return None  # state space exhausted without meeting the identity
        if any(m == ident for m, _ in frontier):
            return length
        nxt = []
        for m, last in frontier:
            for x in letters:
                if x == -last:
                    continue
                state = (m.mul(mats[x]), x)
                if state not in visited:
                    visited.add(state)
                    nxt.append(state)
        frontier = nxt
        length += 1
    return None


def homogeneity_check(cover: RoseCover, data: JacobiData, K: int) -> bool:
    """True iff <delta_v, H^k delta_v> is the same (exactly) at every vertex
    for every k <= K.  Requires period-1 data (constant b, per-color a)."""
    data.validate_for(cover)
    b = data.b[0]
    if any(x != b for x in data.b):
        raise ValueError("diagonal b is not constant")
    by_color: dict[int, object] = {}
    for c, a in zip(cover.edge_colors(), data.a):
        if by_color.setdefault(c, a) != a:
            raise ValueError(f"coupling not constant on color {c}")
    # shared denominator, so comparing the integer moment tables is exact
    rows, _ = _integer_rows(cover, data)
    reference = _vertex_integer_moments(rows, 0, K)
    for v in range(1, cover.n_vertices):
        if _vertex_integer_moments(rows, v, K) != reference:
            return False
    return True
