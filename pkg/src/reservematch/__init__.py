"""Reserve matching under the threshold model.

The smart pipeline computes a maximum matching, raises its beneficiary
count with positive alternating chains, then runs deferred acceptance
seeded with the result. The final matching complies with eligibility, is
non-wasteful, respects priorities, and has the largest beneficiary count
among all maximum-size matchings.
"""

from .daim import PrecedenceOrder, run_daim
from .generate import RandomSpec, generate, preset, random_instance
from .io import parse_instance, parse_matching, serialize_instance, serialize_matching
from .maxinmax import AlternatingChain, ChainKind, augment_chain, find_positive_chain, max_in_max
from .maxmatch import build_slot_graph, max_resource_size, maximum_matching
from .model import (
    BETA,
    ETA,
    Category,
    Instance,
    InstanceError,
    Matching,
    MatchingStats,
    PriorityOrder,
    check_eligibility,
    check_nonwasteful,
    check_respects_priorities,
    matching_stats,
    validate_instance,
)
from .pipeline import PipelineResult, daim_only, smart_pipeline

__all__ = [
    "BETA",
    "ETA",
    "AlternatingChain",
    "Category",
    "ChainKind",
    "Instance",
    "InstanceError",
    "Matching",
    "MatchingStats",
    "PipelineResult",
    "PrecedenceOrder",
    "PriorityOrder",
    "RandomSpec",
    "augment_chain",
    "build_slot_graph",
    "check_eligibility",
    "check_nonwasteful",
    "check_respects_priorities",
    "daim_only",
    "find_positive_chain",
    "generate",
    "matching_stats",
    "max_in_max",
    "max_resource_size",
    "maximum_matching",
    "parse_instance",
    "parse_matching",
    "preset",
    "random_instance",
    "run_daim",
    "serialize_instance",
    "serialize_matching",
    "smart_pipeline",
    "validate_instance",
]

__version__ = "0.1.0"
