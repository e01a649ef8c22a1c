"""Demazure roots of affine toric varieties and isomorphism reconstruction from them."""
from types import ModuleType as _ModuleType

from .cones import (
    AffineSlab,
    NotStronglyConvexError,
    Polytope,
    RationalCone,
    UnboundedError,
    dual_cone,
    extremal_rays,
    facet_group_generators,
    is_strongly_convex,
    lattice_points,
    orthogonal_sublattice,
    recession_cone,
    relative_interior_point,
)
from .degeneration import (
    ReducedDatum,
    SplitLattice,
    compute_m_x,
    fiber,
    induce_reduced_bijection,
    min_lifted_determinant,
    project_roots,
    reduce_datum,
    split_lattice,
)
from .formats import InputError, load_datum, load_root_table, root_table, save_datum, save_root_table
from .generate import random_datum, random_unimodular
from .oracles import InvalidUpsilonError, LinearUpsilon, SwappedUpsilon, TableUpsilon, UpsilonOracle, image_datum
from .reconstruct import (
    Calibration,
    LinearLatticeMap,
    Report,
    brute_force_iso,
    calibrate,
    glue_and_extend,
    psi_rho,
    validate_upsilon,
    verify_toric_iso,
)
from .roots import (
    AdmissibleSystem,
    DemazureRoot,
    MonomialPolynomial,
    Side,
    ToricDatum,
    bracket,
    build_admissible_system,
    classify_slices,
    derivation_apply,
    enumerate_roots,
    enumerate_s_rho,
    find_point_in_B,
    finiteness_conditions,
    h_set,
    root_family,
    roots_commute,
    weight_monoid_from_roots,
)
from .selftest import run_selftest

__all__ = [name for name, value in dict(globals()).items()
           if not name.startswith("_") and not isinstance(value, _ModuleType)]
