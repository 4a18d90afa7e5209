"""Shared fixtures and independent oracle helpers.

The oracles here deliberately avoid the package's moment machinery: dense
matrix products over exact ints/Fractions, explicit walk enumeration over
half-edges, and closed-form count recursions.  Expected values in the tests
are computed by these, never by the code under test.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from treebc.balls import build_ball
from treebc.groups import congruence_quotient, free_generator_images
from treebc.multigraph import ColoredMultigraph, FiniteGraph
from treebc.rng import SplitMix64


# -- dense linear algebra oracle ------------------------------------------------


def dense_mul(A, B):
    n, m, kk = len(A), len(B[0]), len(B)
    return [[sum(A[i][k] * B[k][j] for k in range(kk)) for j in range(m)] for i in range(n)]


def dense_power_entry(M, k, i, j):
    """Entry (i, j) of M^k by repeated dense multiplication."""
    n = len(M)
    P = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    for _ in range(k):
        P = dense_mul(P, M)
    return P[i][j]


def dense_trace_power(M, k):
    n = len(M)
    P = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    for _ in range(k):
        P = dense_mul(P, M)
    return sum(P[i][i] for i in range(n))


# -- walk enumeration oracle ------------------------------------------------------


def walk_moment_oracle(g: ColoredMultigraph, b, a_per_edge, v: int, k: int):
    """<delta_v, H^k delta_v> by brute-force enumeration of length-k walks.

    A step either stays (weight b at the current vertex) or traverses one
    incident half-edge (weight a of its edge); each parallel edge and each
    sense of a self-loop is its own step.
    """
    edge_of_half = {}
    for e, (h1, h2) in enumerate(g.edge_pairs()):
        edge_of_half[h1] = e
        edge_of_half[h2] = e
    inc = g.incidence()
    total = Fraction(0)

    def rec(cur: int, steps: int, weight: Fraction):
        nonlocal total
        if steps == k:
            if cur == v:
                total += weight
            return
        if b[cur] != 0:
            rec(cur, steps + 1, weight * b[cur])
        for h in inc[cur]:
            p = g.partner[h]
            if p == -1:
                continue
            rec(g.he_vertex[p], steps + 1, weight * a_per_edge[edge_of_half[h]])

    rec(v, 0, Fraction(1))
    return total


# -- random structure generators ---------------------------------------------------


def random_leafless_graph(rng: SplitMix64, n: int, extra: int) -> FiniteGraph:
    """Connected leafless multigraph: a Hamiltonian cycle plus `extra` random
    edges (self-loops and parallels permitted)."""
    perm = list(range(n))
    rng.shuffle(perm)
    edges = [(perm[i], perm[(i + 1) % n]) for i in range(n)]
    for _ in range(extra):
        edges.append((rng.randbelow(n), rng.randbelow(n)))
    return FiniteGraph(n, edges)


def random_fraction(rng: SplitMix64, lo_num=1, hi_num=4, hi_den=4) -> Fraction:
    return Fraction(lo_num + rng.randbelow(hi_num), 1 + rng.randbelow(hi_den))


# -- shared expensive fixtures -------------------------------------------------------


@pytest.fixture(scope="session")
def sanov_images():
    return free_generator_images(2)


@pytest.fixture(scope="session")
def tower(sanov_images):
    """Congruence quotients for n = 1..5 (sizes 1, 4, 32, 256, 2048)."""
    return {n: congruence_quotient(sanov_images, n) for n in range(1, 6)}


@pytest.fixture(scope="session")
def ball21():
    return build_ball(2, 1)


@pytest.fixture(scope="session")
def ball22():
    return build_ball(2, 2)
