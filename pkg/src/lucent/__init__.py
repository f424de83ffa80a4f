"""Free-choice Petri net analysis toolkit.

Data model and token game live in :mod:`lucent.net`; structural search in
:mod:`lucent.structure`; explicit-state behaviour in :mod:`lucent.reachability`;
CP-subnets and exhaustions in :mod:`lucent.cp`; shutdown dynamics in
:mod:`lucent.shutdown`; the lucency proof replay in :mod:`lucent.verifier`.
"""

from .config import AnalysisConfig
from .cp import (
    CpExhaustion,
    CpSubnet,
    adaptedness_equivalences,
    boundary,
    cp_exhaustion,
    cp_subnet,
    find_cp_subnets,
    is_adapted,
    is_cp_subnet,
)
from .dsl import emit_net, parse_net
from .net import (
    Cluster,
    Marking,
    Net,
    NodeId,
    Path,
    Subnet,
    ValidationReport,
    complement,
    extend,
    place,
    span,
    transition,
    validate_net,
)
from .reachability import (
    LucencyReport,
    ReachabilityGraph,
    bound,
    check_fundamental_property,
    enabling_equivalent_pairs,
    explore,
    is_bounded,
    is_home_marking,
    is_live,
    is_perpetual,
    is_safe,
    lucency_bruteforce,
    regeneration_clusters,
)
from .shutdown import (
    FiringSequence,
    global_shutdown,
    propagate_perpetual,
    restrict,
    shutdown_sequence,
)
from .structure import (
    FeedWitness,
    PComponent,
    elementary_circuits,
    enabled_feeds,
    is_covered_by_p_components,
    is_strongly_connected,
    max_path_token_count,
    p_components,
    token_free_feed,
)
from .verifier import (
    Certificate,
    CheckRecord,
    prove_lucency,
    verify_marking_equality_on_layers,
    verify_propagation,
    verify_tsystem_lucency,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "Certificate",
    "CheckRecord",
    "Cluster",
    "CpExhaustion",
    "CpSubnet",
    "FeedWitness",
    "FiringSequence",
    "LucencyReport",
    "Marking",
    "Net",
    "NodeId",
    "PComponent",
    "Path",
    "ReachabilityGraph",
    "Subnet",
    "ValidationReport",
    "adaptedness_equivalences",
    "bound",
    "boundary",
    "check_fundamental_property",
    "complement",
    "cp_exhaustion",
    "cp_subnet",
    "elementary_circuits",
    "emit_net",
    "enabled_feeds",
    "enabling_equivalent_pairs",
    "explore",
    "extend",
    "find_cp_subnets",
    "global_shutdown",
    "is_adapted",
    "is_bounded",
    "is_covered_by_p_components",
    "is_cp_subnet",
    "is_home_marking",
    "is_live",
    "is_perpetual",
    "is_safe",
    "is_strongly_connected",
    "lucency_bruteforce",
    "max_path_token_count",
    "p_components",
    "parse_net",
    "place",
    "propagate_perpetual",
    "prove_lucency",
    "regeneration_clusters",
    "restrict",
    "shutdown_sequence",
    "span",
    "token_free_feed",
    "transition",
    "validate_net",
    "verify_marking_equality_on_layers",
    "verify_propagation",
    "verify_tsystem_lucency",
]
