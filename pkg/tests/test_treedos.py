"""DOS moments: walk DP vs truncated-tree oracles, truncation properties."""

from fractions import Fraction

import pytest

from treebc.jacobi import JacobiData, assemble_matrix, per_vertex_moment
from treebc.multigraph import FiniteGraph, rose_graph
from treebc.rng import SplitMix64
from treebc.treedos import dos_moments, rose_dos_moments, truncated_universal_cover

from conftest import dense_power_entry, random_fraction


def rose_fg(ell: int) -> FiniteGraph:
    return rose_graph(ell).to_finite_graph()


# -- truncation ---------------------------------------------------------------------


def test_truncation_sizes():
    g = rose_fg(2)
    data = JacobiData.unit(g)
    assert truncated_universal_cover(g, data, 0, 0).graph.n_vertices == 1
    assert truncated_universal_cover(g, data, 0, 1).graph.n_vertices == 5
    assert truncated_universal_cover(g, data, 0, 2).graph.n_vertices == 17


def test_truncation_is_a_tree_with_full_interior_degree():
    g = rose_fg(3)
    tc = truncated_universal_cover(g, JacobiData.unit(g), 0, 3)
    t = tc.graph
    assert len(t.edges) == t.n_vertices - 1  # acyclic + connected
    # interior vertices have the full lifted degree 2l
    depth1 = (3 * 5**2 - 1) // 2  # vertices of depth <= 2
    for v in range(depth1):
        assert t.degree(v) == 6


def test_truncation_general_graph_lifts_data():
    g = FiniteGraph(3, [(0, 1), (1, 2), (2, 0), (0, 0)])
    data = JacobiData(
        (Fraction(1), Fraction(2), Fraction(3)),
        (Fraction(1), Fraction(2), Fraction(3), Fraction(4)),
    )
    tc = truncated_universal_cover(g, data, 0, 2)
    assert tc.vertex_base[0] == 0
    assert tc.covering.vertex_map == list(tc.vertex_base)
    for node, base in enumerate(tc.vertex_base):
        assert tc.data.b[node] == data.b[base]
    for t_edge, base_e in enumerate(tc.edge_base):
        assert tc.data.a[t_edge] == data.a[base_e]
    # degree upstairs equals degree downstairs (self-loop unfolds to two branches)
    assert tc.graph.degree(0) == g.degree(0) == 4


# -- rose DOS moments ----------------------------------------------------------------


def test_m2_closed_form_random_parameters():
    rng = SplitMix64(77)
    for _ in range(10):
        ell = 2 + rng.randbelow(3)
        b = random_fraction(rng) - 2
        a = [random_fraction(rng) for _ in range(ell)]
        mv = rose_dos_moments(ell, b, a, 2)
        assert mv[2] == b * b + 2 * sum(x * x for x in a)


def test_m4_m6_against_dense_truncated_tree_oracle():
    # independent oracle: dense powers of the depth-2 and depth-3 ball matrices
    g = rose_fg(2)
    data = JacobiData.unit(g)
    t2 = truncated_universal_cover(g, data, 0, 2)
    mat2 = [[int(x) for x in row] for row in assemble_matrix(t2.graph, t2.data)]
    assert dense_power_entry(mat2, 4, 0, 0) == 28
    t3 = truncated_universal_cover(g, data, 0, 3)
    mat3 = [[int(x) for x in row] for row in assemble_matrix(t3.graph, t3.data)]
    assert dense_power_entry(mat3, 6, 0, 0) == 232
    mv = rose_dos_moments(2, 0, [1, 1], 6)
    assert (mv[4], mv[6]) == (28, 232)


def test_trivial_moment_values():
    assert rose_dos_moments(2, 0, [1, 1], 0).m == (Fraction(1),)
    assert rose_dos_moments(3, 5, [1, 2, 3], 1)[1] == 5


def test_dp_agrees_with_truncation_average():
    # 20 random rational parameter sets, l in {2,3}, K <= 12
    rng = SplitMix64(31337)
    for trial in range(20):
        ell = 2 if trial % 2 == 0 else 3
        K = 8 + rng.randbelow(5)  # 8..12
        b = random_fraction(rng) - 1
        a = [random_fraction(rng) for _ in range(ell)]
        g = rose_fg(ell)
        data = JacobiData.rose(rose_graph(ell), b, a)
        assert rose_dos_moments(ell, b, a, K).m == dos_moments(g, data, K).m


def test_odd_moments_vanish_without_diagonal():
    for ell in (2, 3):
        mv = rose_dos_moments(ell, 0, [Fraction(3, 2)] * ell, 9)
        assert all(mv[k] == 0 for k in range(1, 10, 2))


def test_depth_sufficiency():
    g = rose_fg(2)
    data = JacobiData.rose(rose_graph(2), Fraction(1, 2), [1, Fraction(2, 3)])
    base = dos_moments(g, data, 7)
    deeper = dos_moments(g, data, 7, depth=6)
    assert base.m == deeper.m


def test_monotone_in_couplings():
    lo = rose_dos_moments(2, 0, [1, 1], 8)
    hi = rose_dos_moments(2, 0, [1, Fraction(11, 10)], 8)
    for k in (2, 4, 6, 8):
        assert hi[k] > lo[k]


def test_per_vertex_moment_on_truncation_matches_dp():
    g = rose_fg(2)
    data = JacobiData.rose(rose_graph(2), Fraction(1, 3), [Fraction(1), Fraction(2)])
    dp = rose_dos_moments(2, Fraction(1, 3), [1, 2], 8)
    tc = truncated_universal_cover(g, data, 0, 4)
    for k in range(9):
        assert per_vertex_moment(tc.graph, tc.data, 0, k) == dp[k]


# -- general base graphs ----------------------------------------------------------------


def test_dos_moments_general_graph_vs_dense_oracle():
    g = FiniteGraph(3, [(0, 1), (1, 2), (2, 0), (0, 1)])
    data = JacobiData(
        (Fraction(0), Fraction(1, 2), Fraction(0)),
        (Fraction(1), Fraction(2), Fraction(1), Fraction(3, 2)),
    )
    K = 6
    expected = []
    for base in range(3):
        tc = truncated_universal_cover(g, data, base, 3)
        mat = assemble_matrix(tc.graph, tc.data)
        expected.append([dense_power_entry(mat, k, 0, 0) for k in range(K + 1)])
    mv = dos_moments(g, data, K)
    for k in range(K + 1):
        assert mv[k] == sum(col[k] for col in expected) / Fraction(3)


def test_dos_rejects_leafy_base():
    g = FiniteGraph(2, [(0, 1), (0, 0)])
    with pytest.raises(ValueError):
        dos_moments(g, JacobiData.unit(g), 4)
