"""Finite periodic-boundary-condition covers of graphs carrying Jacobi matrices.

The library builds finite covers of rose graphs (balls in the 2l-regular tree
closed by half-edge pairings, Cayley graphs of congruence quotients), expands
them into covers of general finite leafless graphs, and compares the covers'
normalized eigenvalue counting measures against the density of states of the
lifted operator on the universal cover -- exactly, through rational moments,
wherever the combinatorics permit.
"""

from treebc.errors import CapExceeded, ConfigError, InvariantBreach
from treebc.multigraph import (
    ColoredMultigraph,
    CoveringMap,
    FiniteGraph,
    RoseCover,
    cover_from_color_pairs,
    covering_map_check,
    lego_expand,
    parse_cover,
    rose_covering_map,
    rose_graph,
    serialize_cover,
    spanning_tree,
    validate_rose_cover,
)
from treebc.jacobi import (
    JacobiData,
    MomentVector,
    assemble_matrix,
    cdf_distance,
    eigenvalues,
    norm_bound,
    per_vertex_moment,
    trace_power_moments,
)
from treebc.treedos import TruncatedCover, dos_moments, rose_dos_moments, truncated_universal_cover
from treebc.balls import BallGraph, Pairing, antipodal_pairing, build_ball, close_ball, random_pairing
from treebc.groups import (
    GeneratorImages,
    MatMod2n,
    QuotientCover,
    build_Kn,
    congruence_quotient,
    free_generator_images,
    homogeneity_check,
    injectivity_radius,
    sanov_generators,
    schreier_generators,
    tower_covering_map,
)
from treebc.diagnostics import (
    ConvergenceReport,
    bad_fraction,
    ensemble_convergence,
    girth,
    hausdorff_gap,
    moment_gap_report,
    tree_like_radius,
)

__version__ = "0.1.0"
