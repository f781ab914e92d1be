"""Merge trees, barcodes and barcode fibers of PL functions on geometric trees."""

from .confspace import (
    ConfigPath,
    LineMove,
    NoPathError,
    PointMove,
    audit_path,
    chiral_structure,
    connect,
    gather_to_edge,
    is_member,
    line_travel,
    node_hull,
    star_reconfigure,
)
from .fiber import (
    Barcode,
    NotRealizableError,
    UnsupportedDomainError,
    barcode_of,
    circle_count,
    count_components,
    enumerate_merge_trees,
    is_generic_barcode,
    realize_function,
    same_component,
    separation_thresholds,
    verify_fiber_membership,
)
from .geometry import (
    Arc,
    GeometricTree,
    InvalidInputError,
    TreePoint,
    TreeSubset,
    convex_hull,
    diameter,
    distance,
    project,
    shortest_path,
    subsets_disjoint,
)
from .homology import discrete_conf2_betti1, discrete_conf_betti
from .mergetree import (
    AmbiguousElderRuleError,
    CellularMergeTree,
    canonical_form,
    compute_merge_tree,
    induced_matrix,
    is_generic,
    is_isomorphic,
    matrix_distance,
    matrix_distance_min_over_labelings,
)
from .plfunc import PLFunction, evaluate, local_minima, max_on_path, sublevel_components

__version__ = "0.1.0"
