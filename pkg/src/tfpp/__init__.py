"""Bernoulli first-passage percolation on the triangular lattice.

Sites carry i.i.d. 0/1 weights (blue with probability p, yellow otherwise);
passage times count the yellow sites along a path, endpoints included, with
p_c = 1/2.  The package provides exact combinatorial machinery (passage
times, clusters, min-path/max-separator dualities, arm events) and a Monte
Carlo harness for the near-critical asymptotics of the time constant, the
correlation lengths, and the limit shape.
"""

from .config import (
    CapacityError, Configuration, MCEstimate, P_CRITICAL, derive_seed,
    dump_config, from_colors, load_config, recolor, sample,
)
from .lattice import (
    Annulus, AxisBox, DiscreteQuad, Disk, LatticeError, Region, RotatedBox,
    Sector, Site, SiteWindow, Strip, boundary_circuit, closest_site, embed,
    hexagon_contains, hexagon_vertices, neighbors, quad_from_index_box,
    sites_in_region,
)
from .fpp import (
    PassageResult, WindowError, a0n, distance_field, line_to_line,
    passage_time, point_passage, point_to_line, sector_crossing, strip_passage,
)
from .clusters import (
    Circuit, ClusterGraph, ClusterLabeling, build_cluster_graph, chain_distance,
    innermost_yellow_circuit, label_clusters, outermost_surrounding_cluster,
    surrounds,
)
from .duality import (
    PeelOutcome, max_disjoint_separating_circuits, max_disjoint_yellow_crossings,
    quad_passage_time, strip_separator_count_bruteforce, vertex_disjoint_path_count,
)
from .arms import (
    ArmEventSpec, UnsupportedArmSequence, count_crossing_interfaces,
    detect_arm_event, estimate_arm_probability,
)
from .scaling import (
    BoxGraph, BudgetError, Pi4Table, RangeError, box_cover, box_graph,
    build_pi4_table, correlation_length_L, correlation_length_eps,
    crossing_probability, good_subgraphs, has_blue_lr_crossing, load_pi4_table,
    save_pi4_table,
)
from .montecarlo import (
    ResultRecord, ccd_ratio, estimate_mu, fit_correlation_exponent,
    good_bond_fraction, lattice_direction_norm, read_csv, read_json,
    shape_anisotropy, write_csv, write_json,
)

__version__ = "0.1.0"
