"""Spectral gap, volume distribution and metric distortion of graph families."""

from .distortion import (
    DistortionReport,
    Embedding,
    EmbeddingError,
    axial_to_planar,
    bourgain_embedding,
    distortion_lower_bound,
    lattice_distance,
    local_opt_distortion,
    pascal_lattice_embedding,
    pascal_planar_embedding,
    quasi_isometry_constants,
    realized_distortion,
)
from .families import (
    FAMILIES,
    GRIGORCHUK_SPEC,
    HANOI_SPEC,
    SpecError,
    WreathRecursionSpec,
    ball_path_graph,
    build_family,
    grigorchuk_graph,
    hanoi_graph,
    lamplighter_graph,
    parse_spec,
    petersen_graph,
    schreier_graph,
    sierpinski_graph,
    standard_graph,
)
from .graph import (
    DisconnectedGraphError,
    DistanceMatrix,
    GraphError,
    Multigraph,
    all_pairs_distances,
    diameter,
)
from .inequalities import (
    DegenerateError,
    FamilySweepRow,
    TheoremConstants,
    decay_fit,
    eq6_check,
    eq8_check,
    family_sweep,
    theorem3_check,
)
from .reports import InequalityReport
from .spectral import (
    Convention,
    SpectralResult,
    adjacency_alpha,
    eigen_residual,
    lambda1_p2_exact,
    lambda1_variational,
)
from .volume import RhoResult, check_prop6, rho_exact, rho_lower_ballcount, rho_upper_witness

__version__ = "0.1.0"
