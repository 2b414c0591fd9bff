"""q-ary graphs over GF(q): spreads, divisible-design and Deza analogs,
the split Cayley hexagon of order two, and Singer-orbit constructions."""

from .designs import (
    DdgParams,
    DezaCounts,
    DezaParams,
    Spread,
    SrgRecognition,
    classify_ddg,
    classify_deza,
    classify_srg,
    deza_counts,
    deza_parameter_families,
    extend_by_spread,
    field_reduction_spread,
    spread_union_complete,
    symplectic_srg,
    validate_spread,
)
from .gf import (
    GF,
    Subspace,
    Vector,
    enumerate_subspaces,
    gaussian_binomial,
    gaussian_bracket,
    intersect,
    span,
    subspace_id,
)
from .groups import (
    FullGL,
    GMatrix,
    MatrixGroup,
    act,
    generate_group,
    orbit_partition,
    setwise_stabilizer_order,
    singer_generators,
    singer_normalizer,
)
from .hexagon import (
    badex_orbit_z,
    build_badex,
    build_split_cayley_hexagon,
    enumerate_couples,
    extend_and_identify,
    good_lines,
    hyperplane_section,
    is_generalized_hexagon,
    pi_plane,
    regular_embedding_checks,
    section_case,
    solid_census,
)
from .qgraph import (
    QaryGraph,
    collapse,
    common_neighbors,
    complete_graph,
    edge_count_identity,
    empty_graph,
    is_connected,
    neighborhood,
    parse_lineset,
    regularity,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
