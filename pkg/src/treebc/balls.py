"""Balls in the 2l-regular tree and their closures into rose covers.

A ball of radius r is the set of freely reduced words of length <= r over the
l generators and their inverses; every boundary word carries 2l-1 dangling
half-edges.  Closing the ball means choosing, per color, a bijection between
its dangling + and - half-edges; the antipodal choice pairs each boundary
word w_1...w_r with its letterwise inverse w_1^-1...w_r^-1, and the random
choice draws an independent uniform bijection per color from a seeded stream.

Counts for a ball of radius r (M_r = (2l-1)^r):
    #boundary = 2l/(2l-1) * M_r,   #vertices = (l*M_r - 1)/(l - 1),
and there are exactly M_r dangling half-edges of each of the 2l colors.
"""

from __future__ import annotations

from dataclasses import dataclass

from treebc.errors import CapExceeded
from treebc.multigraph import ColoredMultigraph, RoseCover, canonical_cover_shell, color_slot
from treebc.rng import SplitMix64, derive_seed

DEFAULT_VERTEX_CAP = 200_000

Word = tuple[int, ...]


def ball_vertex_count(ell: int, r: int) -> int:
    m = (2 * ell - 1) ** r
    return (ell * m - 1) // (ell - 1)


def boundary_count(ell: int, r: int) -> int:
    return 2 * ell * (2 * ell - 1) ** (r - 1)


@dataclass
class BallGraph:
    """A ball with dangling boundary half-edges plus its word labelling."""

    graph: ColoredMultigraph
    ell: int
    r: int
    words: tuple[Word, ...]
    word_index: dict[Word, int]
    boundary: tuple[int, ...]
    dangling_plus: dict[int, tuple[int, ...]]  # color j -> dangling (j,+) half-edges
    dangling_minus: dict[int, tuple[int, ...]]

    @property
    def M(self) -> int:
        return (2 * self.ell - 1) ** self.r


@dataclass(frozen=True)
class Pairing:
    """Per color j, a bijection of the dangling (j,+) onto the (j,-) half-edges.

    `perm[j]` is the permutation in one-line notation: the i-th (j,+) dangling
    half-edge (in canonical order) is matched with the perm[j][i]-th (j,-) one.
    """

    ell: int
    M: int
    perm: dict[int, tuple[int, ...]]

    def validate(self) -> None:
        for j in range(1, self.ell + 1):
            p = self.perm.get(j)
            if p is None or sorted(p) != list(range(self.M)):
                raise ValueError(f"color {j}: not a bijection on {self.M} points")


def build_ball(ell: int, r: int, cap: int = DEFAULT_VERTEX_CAP) -> BallGraph:
    """The radius-r ball around the identity, vertices in BFS word order."""
    if ell < 2 or r < 1:
        raise ValueError("need ell >= 2 and r >= 1")
    n = ball_vertex_count(ell, r)
    if n > cap:
        raise CapExceeded(f"ball has {n} vertices, cap is {cap}")
    letters = list(range(1, ell + 1)) + [-j for j in range(1, ell + 1)]
    words: list[Word] = [()]
    index: dict[Word, int] = {(): 0}
    frontier: list[Word] = [()]
    for _ in range(r):
        nxt: list[Word] = []
        for w in frontier:
            last = w[-1] if w else 0
            for x in letters:
                if x == -last:
                    continue
                w2 = w + (x,)
                index[w2] = len(words)
                words.append(w2)
                nxt.append(w2)
        frontier = nxt

    g = canonical_cover_shell(n, ell)
    two_ell = 2 * ell
    for w, i in index.items():
        if not w:
            continue
        pid = index[w[:-1]]
        x = w[-1]
        j = abs(x)
        if x > 0:  # edge leaves the parent along (j,+)
            g.pair(pid * two_ell + (j - 1), i * two_ell + (ell + j - 1))
        else:
            g.pair(pid * two_ell + (ell + j - 1), i * two_ell + (j - 1))

    boundary = tuple(i for w, i in index.items() if len(w) == r)
    dplus: dict[int, list[int]] = {j: [] for j in range(1, ell + 1)}
    dminus: dict[int, list[int]] = {j: [] for j in range(1, ell + 1)}
    for h in g.dangling():
        j, sign = g.he_color[h]  # type: ignore[misc]
        (dplus if sign > 0 else dminus)[j].append(h)
    ball = BallGraph(
        graph=g,
        ell=ell,
        r=r,
        words=tuple(words),
        word_index=index,
        boundary=boundary,
        dangling_plus={j: tuple(v) for j, v in dplus.items()},
        dangling_minus={j: tuple(v) for j, v in dminus.items()},
    )
    return ball


def antipodal_pairing(ball: BallGraph) -> Pairing:
    """The q0 pairing: every dangling (j,+) of a boundary word w goes to the
    dangling (j,-) of the letterwise inverse word."""
    g = ball.graph
    perms: dict[int, tuple[int, ...]] = {}
    for j in range(1, ball.ell + 1):
        minus_pos = {h: i for i, h in enumerate(ball.dangling_minus[j])}
        perm = []
        for h in ball.dangling_plus[j]:
            w = ball.words[g.he_vertex[h]]
            mirror = tuple(-x for x in w)
            v2 = ball.word_index[mirror]
            h2 = v2 * 2 * ball.ell + color_slot(ball.ell, j, -1)
            perm.append(minus_pos[h2])
        perms[j] = tuple(perm)
    p = Pairing(ball.ell, ball.M, perms)
    p.validate()
    return p


def random_pairing(ball: BallGraph, seed: int) -> Pairing:
    """A uniformly random pairing: per color, a seeded Fisher-Yates shuffle of
    the (j,-) list; color j draws from the substream derive_seed(seed, j)."""
    perms: dict[int, tuple[int, ...]] = {}
    for j in range(1, ball.ell + 1):
        perm = list(range(ball.M))
        SplitMix64(derive_seed(seed, j)).shuffle(perm)
        perms[j] = tuple(perm)
    return Pairing(ball.ell, ball.M, perms)


def close_ball(ball: BallGraph, pairing: Pairing) -> RoseCover:
    """Add the pairing's edges to the ball; the result is a rose cover."""
    if pairing.ell != ball.ell or pairing.M != ball.M:
        raise ValueError("pairing does not fit this ball")
    pairing.validate()
    g = ball.graph
    cover = ColoredMultigraph(g.n_vertices, ball.ell)
    cover.he_vertex = list(g.he_vertex)
    cover.he_color = list(g.he_color)
    cover.partner = list(g.partner)
    for j in range(1, ball.ell + 1):
        plus = ball.dangling_plus[j]
        minus = ball.dangling_minus[j]
        for i, h in enumerate(plus):
            cover.pair(h, minus[pairing.perm[j][i]])
    return cover


def serialize_pairing(p: Pairing) -> str:
    lines = [f"color {j}: " + " ".join(map(str, p.perm[j])) for j in range(1, p.ell + 1)]
    return "\n".join(lines) + "\n"


def parse_pairing(text: str) -> Pairing:
    perms: dict[int, tuple[int, ...]] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        head, _, rest = line.partition(":")
        j = int(head.split()[1])
        perms[j] = tuple(int(t) for t in rest.split())
    if not perms:
        raise ValueError("empty pairing text")
    sizes = {len(p) for p in perms.values()}
    if len(sizes) != 1:
        raise ValueError("inconsistent permutation sizes")
    pairing = Pairing(len(perms), sizes.pop(), perms)
    pairing.validate()
    return pairing
