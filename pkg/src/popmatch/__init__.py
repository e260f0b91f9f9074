"""Popular matchings in house allocation (with and without ties) and stable
marriage instances: structural and LP-based popularity tests, integral dual
certificates, and an exhaustive oracle to check them against."""

from .characterize import (
    find_popular,
    find_popular_ha,
    find_popular_hat,
    gale_shapley_smi,
    improve_matching_smi,
    optimization_check,
    structural_check,
    structural_check_ha,
    structural_check_hat,
    structural_check_smi,
    validate_witness,
)
from .graph import BipartiteGraph, Matching, Side, Vertex
from .instance import (
    Instance,
    Variant,
    add_last_resorts,
    parse_instance,
    parse_matching,
    random_instance,
    serialize_instance,
)
from .lp import (
    DualVector,
    Mode,
    build_dual_ha,
    build_dual_hat,
    build_dual_smi,
    check_cs,
    derive_structure_ha,
    derive_structure_hat,
    dual_feasible,
    max_weight_matching,
)
from .oracle import delta, enumerate_matchings, is_popular_bruteforce, max_weight_bruteforce
from .structure import compute_fs_ha, compute_fs_hat
from .verdict import Method, RivalMatching, StructuralWitness, Verdict, WitnessKind
from .weights import labels_smi, weight_ha, weight_hat

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "DualVector",
    "Instance",
    "Matching",
    "Method",
    "Mode",
    "RivalMatching",
    "Side",
    "StructuralWitness",
    "Variant",
    "Verdict",
    "Vertex",
    "WitnessKind",
    "add_last_resorts",
    "build_dual_ha",
    "build_dual_hat",
    "build_dual_smi",
    "check_cs",
    "compute_fs_ha",
    "compute_fs_hat",
    "delta",
    "derive_structure_ha",
    "derive_structure_hat",
    "dual_feasible",
    "enumerate_matchings",
    "find_popular",
    "find_popular_ha",
    "find_popular_hat",
    "gale_shapley_smi",
    "improve_matching_smi",
    "is_popular_bruteforce",
    "labels_smi",
    "max_weight_bruteforce",
    "max_weight_matching",
    "optimization_check",
    "parse_instance",
    "parse_matching",
    "random_instance",
    "serialize_instance",
    "structural_check",
    "structural_check_ha",
    "structural_check_hat",
    "structural_check_smi",
    "validate_witness",
    "weight_ha",
    "weight_hat",
]
