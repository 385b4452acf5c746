"""Filtered K-theory invariants over finite T0-spaces.

Exact integer linear algebra (``zmodule``), finite spaces and their
classification (``space``), the four module categories and their checks
(``invariants``), restriction/reconstruction/lifting functors
(``functors``), realizability verdicts (``classify``), JSON formats
(``serialize``), reusable fixtures (``corpus``) and the acceptance suite
(``selftest``).
"""

from .zmodule import (
    IntMatrix, FgGroup, GroupMap, BlockLayout,
    smith_normal_form, hermite_normal_form,
    kernel, cokernel, image, is_exact_at, is_iso,
    ShapeError, IllFormedMap, QuotientNotFree,
)
from .space import (
    FiniteSpace, SpaceClass, classify_space,
    unique_path_six_conditions, elementary_boundary_pairs,
    DuplicatePoint, UnknownPoint, CycleDetected, NotLocallyClosed,
)
from .invariants import (
    Module, ModuleMap, PointedModule, Report, Receptacle,
    validate_module, is_exact, is_rrz, verify_morphism,
    identity_map, is_slotwise_iso, direct_sum_modules,
    st_point_module, b_extension_module,
    unit_receptacle, check_pointed_map,
    check_open_cover, check_unit_sequence,
    st_boundary_pairs, required_slots, required_maps,
    ShapeIncomplete, SpaceNotUniquePath, SpaceNotEbp,
)
from .functors import (
    restrict, restrict_map, tb_to_r, tb_to_r_map,
    Reconstruction, reconstruct_st, g_on_map, compute_eta,
    verify_delta_decomposition, lift_r_morphism, lift_to_st,
    modules_equal,
    FreenessHypothesisFailed, NotLiftable, ReconstructionFailed,
)
from .classify import (
    Check, Verdict,
    range_check_graph, range_check_ck, range_check_unital,
    phantom_verdict,
)
from .serialize import (
    SerializationError,
    space_to_dict, space_from_dict,
    module_to_dict, module_from_dict,
    morphism_to_dict, morphism_from_dict,
    load_json, dump_json,
)

__version__ = "0.1.0"
