"""Exact cone computations for rational surfaces over Hirzebruch surfaces.

Given an arrowed proximity graph describing a composition of point blowups
over a Hirzebruch surface, this package enumerates the dual of the
effective-side cone, computes the integer thresholds on the surface
parameter past which the cone of curves is finite polyhedral and minimally
generated and past which the surface is a Mori dream space, and certifies
the enumeration against an independent double-description oracle.  All
arithmetic is exact.
"""

from .dual_cone import (
    EnumerationCapError,
    GeneratorEntry,
    GeneratorLabel,
    GeneratorSet,
    enumerate_w,
    generator_set,
    lambda_divisor,
    primitive_z,
)
from .lattice import (
    DeltaLinear,
    PicardClass,
    anticanonical_class,
    anticanonical_product,
    e_star,
    f_star,
    m_star,
    pairing,
    picard_class,
    self_intersection,
    strict_transform_classes,
)
from .multiplicities import (
    ChainIntersections,
    germ_multiplicities,
    intersection_numbers,
    smooth_flag_multiplicities,
)
from .oracle import (
    class_vector,
    dual_rays_dd,
    extremality_flags,
    in_cone,
    inequality_system,
    verify_dual_cone,
)
from .proximity_graph import (
    ArrowedProximityGraph,
    Chain,
    GraphStructure,
    InvalidGraphError,
    PointNode,
    ValidationReport,
    Violation,
    as_structure,
    derive_chains,
    make_graph,
    validate,
)
from .thresholds import (
    ClosedForm,
    HypothesesNotMetError,
    Thresholds,
    Verdict,
    a_of_apg,
    a_of_pg,
    b_of_apg,
    b_prime_of_apg,
    ceil_star,
    closed_form_constellation,
    closed_form_free_points,
    compute_thresholds,
    plus_ceil,
    report,
    strict_pos_threshold,
)
from .valuation_invariants import (
    BlockStructureError,
    ValuationInvariants,
    anticanonical_monotonicity_check,
    maximal_contact_values,
    verify_sum_identity,
)

__version__ = "0.1.0"
