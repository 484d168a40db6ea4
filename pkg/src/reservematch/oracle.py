"""Brute-force ground truth for small instances.

Everything here enumerates matchings exhaustively (or, for the Hall check,
solves one maximum matching) and is meant for instances of about ten
patients. Nothing in this module is used by the pipeline itself.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .maxmatch import build_slot_graph, maximum_matching
from .model import Instance, Matching

__all__ = [
    "TooLargeError",
    "DEFAULT_GUARD",
    "enumerate_matchings",
    "count_matchings",
    "Optima",
    "oracle_optima",
    "oracle_max_resource",
    "oracle_max_beneficiary",
    "oracle_max_in_max",
    "is_pareto_optimal_bruteforce",
    "check_equivalence_prop2",
    "HallReport",
    "hall_check",
    "ComponentKind",
    "Component",
    "ChainDecomposition",
    "decompose_symmetric_difference",
]

DEFAULT_GUARD = 10


class TooLargeError(ValueError):
    code = "TOO_LARGE"


def enumeration_bound(instance: Instance) -> int:
    return (len(instance.categories) + 1) ** len(instance.patients)


def _guard(instance: Instance, guard: int | None) -> None:
    limit = DEFAULT_GUARD if guard is None else guard
    if limit < 0:
        return
    if len(instance.patients) > limit or instance.q > limit:
        raise TooLargeError(
            f"TOO_LARGE: |I|={len(instance.patients)}, q={instance.q} exceed guard {limit}; "
            f"enumeration bound (|C|+1)^|I| = {enumeration_bound(instance)}"
        )


def _options(instance: Instance) -> list[list[int]]:
    return [list(np.flatnonzero(row)) for row in instance.eligibility_matrix]


def _enumerate_raw(instance: Instance) -> Iterator[tuple[int, ...]]:
    opts = _options(instance)
    free = [c.reserve for c in instance.categories]
    n = len(opts)
    chosen = [-1] * n

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == n:
            yield tuple(chosen)
            return
        chosen[k] = -1
        yield from rec(k + 1)
        for c in opts[k]:
            if free[c]:
                free[c] -= 1
                chosen[k] = c
                yield from rec(k + 1)
                free[c] += 1
        chosen[k] = -1

    yield from rec(0)


def _to_matching(instance: Instance, raw: tuple[int, ...]) -> Matching:
    cats = instance.category_ids
    return Matching({p: cats[c] for p, c in zip(instance.patients, raw) if c >= 0})


def enumerate_matchings(instance: Instance, guard: int | None = None) -> Iterator[Matching]:
    """Every eligibility-compliant, capacity-feasible matching, once each.

    ``guard`` caps both |I| and q (default 10); pass a negative value to
    disable it.
    """
    _guard(instance, guard)
    for raw in _enumerate_raw(instance):
        yield _to_matching(instance, raw)


def count_matchings(instance: Instance) -> int:
    """Number of feasible matchings, by a capacity-state recursion."""
    opts = _options(instance)

    @lru_cache(maxsize=None)
    def count(k: int, free: tuple[int, ...]) -> int:
        if k == len(opts):
            return 1
        total = count(k + 1, free)
        for c in opts[k]:
            if free[c] > 0:
                total += count(k + 1, free[:c] + (free[c] - 1,) + free[c + 1 :])
        return total

    return count(0, tuple(c.reserve for c in instance.categories))


@dataclass(frozen=True)
class Optima:
    max_resource: int
    max_beneficiary: int
    max_in_max: tuple[int, int]
    joint_achievable: bool
    n_matchings: int


def _scores(instance: Instance, raw: tuple[int, ...], ben: np.ndarray) -> tuple[int, int]:
    size = 0
    b = 0
    for k, c in enumerate(raw):
        if c >= 0:
            size += 1
            b += int(ben[k, c])
    return size, b


def oracle_optima(instance: Instance, guard: int | None = None) -> Optima:
    _guard(instance, guard)
    ben = instance.beneficiary_matrix
    scores = [_scores(instance, raw, ben) for raw in _enumerate_raw(instance)]
    max_r = max(s for s, _ in scores)
    max_b = max(b for _, b in scores)
    return Optima(
        max_resource=max_r,
        max_beneficiary=max_b,
        max_in_max=max(scores),
        joint_achievable=(max_r, max_b) in set(scores),
        n_matchings=len(scores),
    )


def oracle_max_resource(instance: Instance, guard: int | None = None) -> int:
    return oracle_optima(instance, guard).max_resource


def oracle_max_beneficiary(instance: Instance, guard: int | None = None) -> int:
    return oracle_optima(instance, guard).max_beneficiary


def oracle_max_in_max(instance: Instance, guard: int | None = None) -> tuple[int, int]:
    return oracle_optima(instance, guard).max_in_max


def _mask(raw: tuple[int, ...]) -> int:
    return sum(1 << k for k, c in enumerate(raw) if c >= 0)


def is_pareto_optimal_bruteforce(instance: Instance, matching: Mapping[str, str], guard: int | None = None) -> bool:
    """No feasible matching serves a strict superset of ``matching``'s patients."""
    _guard(instance, guard)
    pidx = instance.patient_index
    mine = sum(1 << pidx[p] for p in matching)
    for raw in _enumerate_raw(instance):
        other = _mask(raw)
        if other != mine and other & mine == mine:
            return False
    return True


def check_equivalence_prop2(instance: Instance, guard: int | None = None) -> bool:
    """Pareto optimality coincides with maximum size on every feasible matching."""
    _guard(instance, guard)
    masks = {_mask(raw) for raw in _enumerate_raw(instance)}
    best = max(m.bit_count() for m in masks)
    for m in masks:
        dominated = any(o != m and o & m == m for o in masks)
        if (not dominated) != (m.bit_count() == best):
            return False
    return True


@dataclass(frozen=True)
class HallReport:
    b: int
    sparse: frozenset[str]
    premise_holds: bool
    all_beneficiary_exists: bool


def hall_check(instance: Instance) -> HallReport:
    """Premise and conclusion of the all-units-to-beneficiaries result.

    The conclusion is decided directly: a maximum matching over beneficiary
    edges only must fill all q units.
    """
    q = instance.q
    ben = instance.beneficiary_matrix
    sizes = ben.sum(axis=0)
    sparse_mask = sizes < q
    sparse = frozenset(c for c, s in zip(instance.category_ids, sparse_mask) if s)
    b = int(ben[:, sparse_mask].sum(axis=1).max()) if ben.size else 0
    premise = all(int(sizes[k]) >= min(q, b * c.reserve) for k, c in enumerate(instance.categories))
    filled = len(maximum_matching(build_slot_graph(instance, relation="beneficiary")))
    return HallReport(b=b, sparse=sparse, premise_holds=premise, all_beneficiary_exists=filled == q)


class ComponentKind(str, enum.Enum):
    ISOLATED = "ISOLATED"
    NEUTRAL = "NEUTRAL"
    INCREMENTAL = "INCREMENTAL"
    DECREMENTAL = "DECREMENTAL"


@dataclass(frozen=True)
class Component:
    """A connected piece of the symmetric difference.

    Kinds are relative to the first matching: INCREMENTAL has more edges
    from ``mu1`` than from ``mu2`` (so it is an augmenting path for
    ``mu2``), DECREMENTAL the reverse. ``potential`` is the beneficiary
    gain of switching this piece from ``mu1``'s edges to ``mu2``'s.
    """

    kind: ComponentKind
    patients: tuple[str, ...]
    slots: tuple[tuple[str, int], ...]
    mu1_edges: int
    mu2_edges: int
    potential: int


@dataclass(frozen=True)
class ChainDecomposition:
    components: tuple[Component, ...]

    def of_kind(self, kind: ComponentKind | str) -> list[Component]:
        kind = ComponentKind(kind)
        return [c for c in self.components if c.kind is kind]

    def kinds(self) -> set[ComponentKind]:
        return {c.kind for c in self.components}


def _slot_edges(instance: Instance, mu1: Mapping[str, str], mu2: Mapping[str, str]):
    e1: set[tuple[str, tuple[str, int]]] = set()
    e2: set[tuple[str, tuple[str, int]]] = set()
    for c in instance.categories:
        h1 = [p for p in instance.patients if mu1.get(p) == c.id]
        h2 = [p for p in instance.patients if mu2.get(p) == c.id]
        common = [p for p in h1 if p in set(h2)]
        for j, p in enumerate(common, start=1):
            e1.add((p, (c.id, j)))
            e2.add((p, (c.id, j)))
        base = len(common) + 1
        for j, p in enumerate((p for p in h1 if p not in common), start=base):
            e1.add((p, (c.id, j)))
        for j, p in enumerate((p for p in h2 if p not in common), start=base):
            e2.add((p, (c.id, j)))
    return e1, e2


def decompose_symmetric_difference(
    instance: Instance, mu1: Mapping[str, str], mu2: Mapping[str, str]
) -> ChainDecomposition:
    """Split ``mu1 (+) mu2`` on the slot-expanded graph into components.

    Slots are labelled so that patients held by the same category in both
    matchings share a slot; shared edges then cancel.
    """
    e1, e2 = _slot_edges(instance, mu1, mu2)
    only1, only2 = e1 - e2, e2 - e1
    adj: dict[tuple, list[tuple[tuple, int]]] = {}
    for tag, edges in ((1, only1), (2, only2)):
        for p, s in edges:
            adj.setdefault(("i", p), []).append((("s", s), tag))
            adj.setdefault(("s", s), []).append((("i", p), tag))

    vertices = [("i", p) for p in instance.patients]
    vertices += [("s", (c.id, j)) for c in instance.categories for j in range(1, c.reserve + 1)]
    seen: set[tuple] = set()
    comps = []
    for v in vertices:
        if v in seen:
            continue
        seen.add(v)
        members = [v]
        queue = deque([v])
        n1 = n2 = pot = 0
        while queue:
            x = queue.popleft()
            for y, tag in adj.get(x, ()):
                if x[0] == "i":
                    p, (c, _) = x[1], y[1]
                    gain = 1 if instance.is_beneficiary(p, c) else 0
                    if tag == 1:
                        n1 += 1
                        pot -= gain
                    else:
                        n2 += 1
                        pot += gain
                if y not in seen:
                    seen.add(y)
                    members.append(y)
                    queue.append(y)
        if n1 == n2 == 0:
            kind = ComponentKind.ISOLATED
        elif n1 == n2:
            kind = ComponentKind.NEUTRAL
        elif n1 > n2:
            kind = ComponentKind.INCREMENTAL
        else:
            kind = ComponentKind.DECREMENTAL
        comps.append(
            Component(
                kind=kind,
                patients=tuple(m[1] for m in members if m[0] == "i"),
                slots=tuple(m[1] for m in members if m[0] == "s"),
                mu1_edges=n1,
                mu2_edges=n2,
                potential=pot,
            )
        )
    return ChainDecomposition(tuple(comps))
