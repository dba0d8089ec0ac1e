"""Finite approximations of Noebeling-type inverse limits.

The package builds the towers K_0 <- K_1 <- ... of quasi-simplicial
projections, checks their fibers and star covers, solves the lifting
problems used in the universality argument, and serialises everything
to deterministic files.
"""

from .complex import (
    SimplicialComplex,
    VertexMap,
    barycentric_subdivision,
    beta,
    check_map,
    full_complex,
    is_full,
    make_complex,
    nerve,
    open_star,
    vertex_label,
)
from .construction import (
    CopyVertex,
    FiniteStagePoint,
    Tower,
    build_tower,
    fiber,
    fiber_defects,
    is_n_regular,
    noebeling_step,
    project_point,
    step_f_vector,
    tower_f_vectors,
)
from .covers import (
    MESH_SERIES_BOUND,
    mesh,
    refines_squared,
    small_steps_check,
    star_cover,
    verify_certificate,
)
from .errors import *  # noqa: F401,F403
from .lifting import (
    CarrierFn,
    LiftProblem,
    Projection,
    StageMap,
    SubdivisionLevels,
    canonical_iso,
    carrier_extend,
    lift_clauses,
    solve_lift,
)
from .surd import Surd
from .universality import embedding_certificate, refine_map, universality_run

__version__ = "0.1.0"
