"""Threshold-model data types, instance validation and matching-level axiom checks.

A category's priority order is a ranking over patients plus two markers,
:data:`BETA` and :data:`ETA`. Patients ranked above ``BETA`` are the
category's beneficiaries; patients ranked above ``ETA`` are eligible for it.
Patients omitted from a ranking sit below ``ETA`` and are therefore
ineligible.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Any

import numpy as np

BETA = "__BETA__"
ETA = "__ETA__"
DUMMY = "__NULL__"
RESERVED_TOKENS = frozenset({BETA, ETA, DUMMY})

__all__ = [
    "BETA",
    "ETA",
    "DUMMY",
    "InstanceError",
    "PriorityOrder",
    "Category",
    "Instance",
    "Matching",
    "MatchingStats",
    "ViolationKind",
    "Violation",
    "validate_instance",
    "validate_matching",
    "compare",
    "check_eligibility",
    "check_nonwasteful",
    "check_respects_priorities",
    "matching_stats",
]


class InstanceError(ValueError):
    """Raised when an instance, matching or comparison is malformed.

    ``code`` is one of DUPLICATE_ID, MISSING_THRESHOLD, THRESHOLD_ORDER,
    UNKNOWN_PATIENT, UNKNOWN_CATEGORY, BAD_RESERVE, RESERVED_ID,
    OVER_CAPACITY, UNDEFINED_COMPARISON.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class PriorityOrder:
    ranking: tuple[str, ...]
    _rank: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ranking = tuple(self.ranking)
        object.__setattr__(self, "ranking", ranking)
        for marker in (BETA, ETA):
            if ranking.count(marker) != 1:
                raise InstanceError(
                    "MISSING_THRESHOLD", f"{marker} must occur exactly once in {list(ranking)}"
                )
        rank: dict[str, int] = {}
        for pos, token in enumerate(ranking):
            if token in rank:
                raise InstanceError("DUPLICATE_ID", f"token {token!r} repeated in ranking")
            if token == DUMMY:
                raise InstanceError("RESERVED_ID", f"{DUMMY} may not appear in a ranking")
            rank[token] = pos
        if rank[BETA] > rank[ETA]:
            raise InstanceError("THRESHOLD_ORDER", "ETA ranked before BETA")
        object.__setattr__(self, "_rank", MappingProxyType(rank))

    @property
    def beneficiaries(self) -> tuple[str, ...]:
        return self.ranking[: self._rank[BETA]]

    @property
    def eligible(self) -> tuple[str, ...]:
        return tuple(t for t in self.ranking[: self._rank[ETA]] if t != BETA)

    @property
    def patients(self) -> tuple[str, ...]:
        return tuple(t for t in self.ranking if t not in RESERVED_TOKENS)

    def position(self, token: str) -> int | None:
        """Position of ``token`` in the ranking, or ``None`` if omitted."""
        return self._rank.get(token)

    def is_beneficiary(self, patient: str) -> bool:
        pos = self._rank.get(patient)
        return pos is not None and pos < self._rank[BETA]

    def is_eligible(self, patient: str) -> bool:
        pos = self._rank.get(patient)
        return pos is not None and pos < self._rank[ETA]


@dataclass(frozen=True)
class Category:
    id: str
    reserve: int
    priority: PriorityOrder

    def __post_init__(self) -> None:
        if not isinstance(self.priority, PriorityOrder):
            object.__setattr__(self, "priority", PriorityOrder(tuple(self.priority)))
        if isinstance(self.reserve, bool) or not isinstance(self.reserve, (int, np.integer)):
            raise InstanceError("BAD_RESERVE", f"reserve of {self.id!r} must be an integer")
        if self.reserve < 1:
            raise InstanceError("BAD_RESERVE", f"reserve of {self.id!r} is {self.reserve}, must be >= 1")
        object.__setattr__(self, "reserve", int(self.reserve))


@dataclass(frozen=True)
class Instance:
    """A reserve-allocation problem: patients, categories, reserves, priorities.

    Construct through :func:`validate_instance` (or the constructor, which
    runs the same checks). The total supply ``q`` is derived from the
    reserves and never stored separately.
    """

    patients: tuple[str, ...]
    categories: tuple[Category, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "patients", tuple(self.patients))
        object.__setattr__(self, "categories", tuple(self.categories))
        seen: set[str] = set()
        for p in self.patients:
            if p in RESERVED_TOKENS:
                raise InstanceError("RESERVED_ID", f"patient id {p!r} is reserved")
            if p in seen:
                raise InstanceError("DUPLICATE_ID", f"patient {p!r} declared twice")
            seen.add(p)
        cat_ids: set[str] = set()
        for c in self.categories:
            if c.id in RESERVED_TOKENS:
                raise InstanceError("RESERVED_ID", f"category id {c.id!r} is reserved")
            if c.id in cat_ids:
                raise InstanceError("DUPLICATE_ID", f"category {c.id!r} declared twice")
            cat_ids.add(c.id)
            for p in c.priority.patients:
                if p not in seen:
                    raise InstanceError("UNKNOWN_PATIENT", f"{p!r} ranked by {c.id!r} is not a patient")

    @property
    def q(self) -> int:
        return sum(c.reserve for c in self.categories)

    @property
    def category_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.categories)

    @cached_property
    def _by_id(self) -> Mapping[str, Category]:
        return MappingProxyType({c.id: c for c in self.categories})

    @cached_property
    def patient_index(self) -> Mapping[str, int]:
        return MappingProxyType({p: k for k, p in enumerate(self.patients)})

    @cached_property
    def category_index(self) -> Mapping[str, int]:
        return MappingProxyType({c.id: k for k, c in enumerate(self.categories)})

    def category(self, cid: str) -> Category:
        try:
            return self._by_id[cid]
        except KeyError:
            raise InstanceError("UNKNOWN_CATEGORY", f"no category {cid!r}") from None

    def reserve(self, cid: str) -> int:
        return self.category(cid).reserve

    def is_eligible(self, patient: str, cid: str) -> bool:
        return self.category(cid).priority.is_eligible(patient)

    def is_beneficiary(self, patient: str, cid: str) -> bool:
        return self.category(cid).priority.is_beneficiary(patient)

    def beneficiaries(self, cid: str) -> frozenset[str]:
        return frozenset(self.category(cid).priority.beneficiaries)

    def eligible(self, cid: str) -> frozenset[str]:
        return frozenset(self.category(cid).priority.eligible)

    @cached_property
    def eligibility_matrix(self) -> np.ndarray:
        """Boolean array of shape (patients, categories)."""
        out = np.zeros((len(self.patients), len(self.categories)), dtype=bool)
        pidx = self.patient_index
        for k, c in enumerate(self.categories):
            rows = [pidx[p] for p in c.priority.eligible]
            out[rows, k] = True
        out.setflags(write=False)
        return out

    @cached_property
    def beneficiary_matrix(self) -> np.ndarray:
        """Boolean array of shape (patients, categories)."""
        out = np.zeros((len(self.patients), len(self.categories)), dtype=bool)
        pidx = self.patient_index
        for k, c in enumerate(self.categories):
            rows = [pidx[p] for p in c.priority.beneficiaries]
            out[rows, k] = True
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class MatchingStats:
    assigned: int
    beneficiary_assigned: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.assigned, self.beneficiary_assigned)


class Matching(Mapping[str, str]):
    """Immutable patient -> category assignment. Unmatched patients are absent.

    Behaves as a read-only mapping over the matched patients; ``m.get(i)``
    returns ``None`` for an unmatched patient.
    """

    __slots__ = ("_assignment", "_hash")

    def __init__(self, assignment: Mapping[str, str | None] | Iterable[tuple[str, str | None]] = ()):
        items = assignment.items() if isinstance(assignment, Mapping) else assignment
        self._assignment = {p: c for p, c in items if c is not None}
        self._hash: int | None = None

    def __getitem__(self, patient: str) -> str:
        return self._assignment[patient]

    def __iter__(self) -> Iterator[str]:
        return iter(self._assignment)

    def __len__(self) -> int:
        return len(self._assignment)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Matching):
            return self._assignment == other._assignment
        if isinstance(other, Mapping):
            return self._assignment == {p: c for p, c in other.items() if c is not None}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._assignment.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Matching({self._assignment!r})"

    @property
    def matched(self) -> frozenset[str]:
        return frozenset(self._assignment)

    def members(self, cid: str) -> list[str]:
        return [p for p, c in self._assignment.items() if c == cid]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self._assignment.values():
            out[c] = out.get(c, 0) + 1
        return out

    def to_dict(self) -> dict[str, str]:
        return dict(self._assignment)

    def replace(self, moves: Mapping[str, str | None]) -> Matching:
        """Return a copy with the given patients reassigned (``None`` unmatches)."""
        new = dict(self._assignment)
        for p, c in moves.items():
            if c is None:
                new.pop(p, None)
            else:
                new[p] = c
        return Matching(new)


class ViolationKind(str, enum.Enum):
    INELIGIBLE = "INELIGIBLE"
    WASTE = "WASTE"
    PRIORITY = "PRIORITY"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    patient: str
    category: str
    co_patient: str | None = None

    def __str__(self) -> str:
        s = f"kind={self.kind.value} patient={self.patient} category={self.category}"
        if self.co_patient is not None:
            s += f" co_patient={self.co_patient}"
        return s


def _category_doc(raw: Any) -> Category:
    if isinstance(raw, Category):
        return raw
    return Category(id=raw["id"], reserve=raw["reserve"], priority=PriorityOrder(tuple(raw["priority"])))


def validate_instance(raw: Mapping[str, Any] | Instance) -> Instance:
    """Build a validated :class:`Instance` from a parsed instance document."""
    if isinstance(raw, Instance):
        return raw
    cats = tuple(_category_doc(c) for c in raw.get("categories", ()))
    return Instance(patients=tuple(raw.get("patients", ())), categories=cats)


def validate_matching(instance: Instance, matching: Mapping[str, str | None]) -> Matching:
    """Check ids and capacities; returns the matching as a :class:`Matching`."""
    m = matching if isinstance(matching, Matching) else Matching(matching)
    pidx = instance.patient_index
    for p, c in m.items():
        if p not in pidx:
            raise InstanceError("UNKNOWN_PATIENT", f"matching references unknown patient {p!r}")
        instance.category(c)
    for c, n in m.counts().items():
        if n > instance.reserve(c):
            raise InstanceError("OVER_CAPACITY", f"{n} patients assigned to {c!r} (reserve {instance.reserve(c)})")
    return m


def compare(instance: Instance, cid: str, a: str, b: str) -> bool:
    """True iff ``a`` strictly precedes ``b`` in category ``cid``'s priority order.

    Tokens omitted from the ranking rank below every listed token; two
    omitted tokens are incomparable.
    """
    prio = instance.category(cid).priority
    pa, pb = prio.position(a), prio.position(b)
    if pa is None and pb is None:
        raise InstanceError("UNDEFINED_COMPARISON", f"{a!r} and {b!r} are both unranked by {cid!r}")
    if pa is None:
        return False
    if pb is None:
        return True
    return pa < pb


def check_eligibility(instance: Instance, matching: Mapping[str, str]) -> list[Violation]:
    return [
        Violation(ViolationKind.INELIGIBLE, p, c)
        for p, c in matching.items()
        if not instance.is_eligible(p, c)
    ]


def check_nonwasteful(instance: Instance, matching: Mapping[str, str]) -> list[Violation]:
    counts = Matching(matching).counts() if not isinstance(matching, Matching) else matching.counts()
    out = []
    for c in instance.categories:
        if counts.get(c.id, 0) >= c.reserve:
            continue
        for p in c.priority.eligible:
            if p not in matching:
                out.append(Violation(ViolationKind.WASTE, p, c.id))
    order = instance.patient_index
    out.sort(key=lambda v: (order[v.patient], instance.category_index[v.category]))
    return out


def check_respects_priorities(instance: Instance, matching: Mapping[str, str]) -> list[Violation]:
    """Pairs (i, i', c) with i in c, i' unmatched and i' not ranked below i."""
    by_cat: dict[str, list[str]] = {}
    for p, c in matching.items():
        by_cat.setdefault(c, []).append(p)
    out = []
    for c in instance.categories:
        held = by_cat.get(c.id)
        if not held:
            continue
        prio = c.priority
        n = len(prio.ranking)
        pos = {p: prio.position(p) for p in held}
        worst = max(n if v is None else v for v in pos.values())
        # only unmatched patients ranked above the worst held patient can witness
        rivals = [t for t in prio.ranking[:worst] if t not in RESERVED_TOKENS and t not in matching]
        rival_pos = {t: prio.position(t) for t in rivals}
        if worst >= n:
            # an unranked held patient is incomparable with unranked unmatched ones
            omitted = [p for p in instance.patients if p not in matching and prio.position(p) is None]
            rival_pos.update({p: n for p in omitted})
        for i in held:
            pi = n if pos[i] is None else pos[i]
            for j, pj in rival_pos.items():
                if pj <= pi:
                    out.append(Violation(ViolationKind.PRIORITY, i, c.id, j))
    return out


def matching_stats(instance: Instance, matching: Mapping[str, str]) -> MatchingStats:
    ben = sum(1 for p, c in matching.items() if instance.is_beneficiary(p, c))
    return MatchingStats(assigned=len(matching), beneficiary_assigned=ben)


def stats_tuple(instance: Instance, matching: Mapping[str, str]) -> tuple[int, int]:
    return matching_stats(instance, matching).as_tuple()


def categories_in_order(instance: Instance, ids: Sequence[str] | None) -> tuple[str, ...]:
    """Validate a precedence order (a permutation of category ids)."""
    if ids is None:
        return instance.category_ids
    ids = tuple(ids)
    if sorted(ids) != sorted(instance.category_ids) or len(set(ids)) != len(ids):
        raise InstanceError("UNKNOWN_CATEGORY", f"precedence {list(ids)} is not a permutation of the categories")
    return ids
