"""Stage 3: deferred acceptance seeded with an initial matching.

Patients get preferences over categories from a precedence order: a
patient holding a unit ranks that category first, an unmatched patient
ranks a zero-capacity dummy category first, and all remaining categories
follow in precedence order. Categories rank patients by their own priority
order and accept only eligible ones. Patient-proposing deferred acceptance
then runs in simultaneous rounds until no rejection occurs.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .model import DUMMY, Instance, InstanceError, Matching, categories_in_order, check_eligibility

__all__ = ["PrecedenceOrder", "HypotheticalMarket", "resolve_precedence", "build_hypothetical_market", "run_daim"]


@dataclass(frozen=True)
class PrecedenceOrder:
    categories: tuple[str, ...]

    @classmethod
    def for_instance(cls, instance: Instance, ids: Sequence[str] | None = None) -> PrecedenceOrder:
        return cls(categories_in_order(instance, ids))

    def __iter__(self):
        return iter(self.categories)


@dataclass(frozen=True)
class HypotheticalMarket:
    """Two-sided market run by DAIM.

    ``patient_prefs[i]`` may start with :data:`~reservematch.model.DUMMY`.
    ``category_prefs[c]`` lists the acceptable patients, best first.
    """

    patient_prefs: Mapping[str, tuple[str, ...]]
    category_prefs: Mapping[str, tuple[str, ...]]
    capacities: Mapping[str, int]
    dummy: str = DUMMY


def resolve_precedence(instance: Instance, precedence: PrecedenceOrder | Sequence[str] | None) -> PrecedenceOrder:
    if isinstance(precedence, PrecedenceOrder):
        categories_in_order(instance, precedence.categories)
        return precedence
    return PrecedenceOrder.for_instance(instance, precedence)


def build_hypothetical_market(
    instance: Instance,
    initial: Mapping[str, str],
    precedence: PrecedenceOrder | Sequence[str] | None = None,
) -> HypotheticalMarket:
    order = resolve_precedence(instance, precedence).categories
    prefs: dict[str, tuple[str, ...]] = {}
    for p in instance.patients:
        held = initial.get(p)
        if held is None:
            prefs[p] = (DUMMY, *order)
        else:
            prefs[p] = (held, *(c for c in order if c != held))
    cat_prefs = {c.id: c.priority.eligible for c in instance.categories}
    caps = {c.id: c.reserve for c in instance.categories}
    caps[DUMMY] = 0
    cat_prefs[DUMMY] = ()
    return HypotheticalMarket(patient_prefs=prefs, category_prefs=cat_prefs, capacities=caps)


def run_daim(
    instance: Instance,
    initial: Mapping[str, str],
    precedence: PrecedenceOrder | Sequence[str] | None = None,
) -> Matching:
    if check_eligibility(instance, initial):
        raise InstanceError("INELIGIBLE", "initial matching assigns a patient to a category they are not eligible for")
    market = build_hypothetical_market(instance, initial, precedence)
    rank = {c: {p: k for k, p in enumerate(ps)} for c, ps in market.category_prefs.items()}
    caps = market.capacities
    prefs = market.patient_prefs
    cursor = dict.fromkeys(instance.patients, 0)
    held: dict[str, list[str]] = {c: [] for c in caps}

    proposers = list(instance.patients)
    while proposers:
        applications: dict[str, list[str]] = {}
        for p in proposers:
            k = cursor[p]
            if k >= len(prefs[p]):
                continue  # rejected everywhere; stays unassigned
            cursor[p] = k + 1
            applications.setdefault(prefs[p][k], []).append(p)
        rejected: list[str] = []
        for c, apps in applications.items():
            r = rank[c]
            pool = held[c] + [p for p in apps if p in r]
            rejected += [p for p in apps if p not in r]
            pool.sort(key=r.__getitem__)
            held[c] = pool[: caps[c]]
            rejected += pool[caps[c]:]
        order = instance.patient_index
        proposers = sorted(rejected, key=order.__getitem__)

    return Matching({p: c for c in instance.category_ids for p in held[c]})
