"""The three-stage smart pipeline: maximum matching, Max-in-Max, DAIM."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .daim import PrecedenceOrder, resolve_precedence, run_daim
from .maxinmax import max_in_max
from .maxmatch import build_slot_graph, maximum_matching
from .model import Instance, Matching, MatchingStats, matching_stats

__all__ = ["PipelineResult", "smart_pipeline", "daim_only"]


@dataclass(frozen=True)
class PipelineResult:
    mu1: Matching
    mu2: Matching
    mu3: Matching
    stats: tuple[MatchingStats, MatchingStats, MatchingStats]
    precedence: PrecedenceOrder

    @property
    def matching(self) -> Matching:
        return self.mu3


def smart_pipeline(instance: Instance, precedence: PrecedenceOrder | Sequence[str] | None = None) -> PipelineResult:
    order = resolve_precedence(instance, precedence)
    mu1 = maximum_matching(build_slot_graph(instance))
    mu2 = max_in_max(instance, mu1)
    mu3 = run_daim(instance, mu2, order)
    stats = tuple(matching_stats(instance, m) for m in (mu1, mu2, mu3))
    return PipelineResult(mu1, mu2, mu3, stats, order)


def daim_only(instance: Instance, precedence: PrecedenceOrder | Sequence[str] | None = None) -> Matching:
    """Plain deferred acceptance from the empty matching, for comparison runs."""
    return run_daim(instance, Matching(), resolve_precedence(instance, precedence))
