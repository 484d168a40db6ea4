"""Preset instances and seeded random instance generators."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .model import BETA, ETA, Category, Instance, PriorityOrder

__all__ = [
    "BadSpecError",
    "RandomSpec",
    "random_instance",
    "small_instance",
    "premise_instance",
    "PRESETS",
    "preset",
    "generate",
]


class BadSpecError(ValueError):
    code = "BAD_SPEC"


def _category(cid: str, reserve: int, ranking: list[str]) -> Category:
    return Category(cid, reserve, PriorityOrder(tuple(ranking)))


def example1() -> Instance:
    return Instance(
        ("i1", "i2"),
        (
            _category("c1", 1, ["i1", BETA, "i2", ETA]),
            _category("c2", 1, [BETA, "i1", ETA, "i2"]),
        ),
    )


def example2() -> Instance:
    return Instance(
        ("i1", "i2"),
        (
            _category("c1", 1, ["i1", BETA, "i2", ETA]),
            _category("c2", 1, ["i2", BETA, "i1", ETA]),
        ),
    )


def example3() -> Instance:
    return Instance(("i1", "i2"), (_category("c", 1, ["i1", "i2", BETA, ETA]),))


def pandemic(population: int = 330) -> Instance:
    """Three-category vaccine rollout at one patient per million people.

    Healthcare (22 beneficiaries, 5 units), elderly (54 beneficiaries,
    5 units) and general public (everyone else, 40 units). Everybody is
    eligible for every category.
    """
    health = [f"h{k}" for k in range(1, 23)]
    elderly = [f"e{k}" for k in range(1, 55)]
    if population < len(health) + len(elderly):
        raise BadSpecError("BAD_SPEC: population smaller than the two targeted groups")
    general = [f"g{k}" for k in range(1, population - len(health) - len(elderly) + 1)]
    everyone = health + elderly + general

    def ranking(targets: list[str]) -> list[str]:
        rest = [p for p in everyone if p not in set(targets)]
        return [*targets, BETA, *rest, ETA]

    return Instance(
        tuple(everyone),
        (
            _category("c_h", 5, ranking(health)),
            _category("c_e", 5, ranking(elderly)),
            _category("c_g", 40, ranking(general)),
        ),
    )


PRESETS: dict[str, Callable[[], Instance]] = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "pandemic": pandemic,
}


def preset(name: str) -> Instance:
    try:
        return PRESETS[name]()
    except KeyError:
        raise BadSpecError(f"BAD_SPEC: unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class RandomSpec:
    """Shape of a random instance.

    Each patient is eligible for a category with probability
    ``p_eligible``; an eligible patient is a beneficiary with probability
    ``p_beneficiary``; an ineligible patient is still listed below the
    eligibility threshold with probability ``p_listed``. Reserves either
    split ``supply`` exactly (each at least 1) or are drawn uniformly from
    ``[reserve_min, reserve_max]``.
    """

    n_patients: int
    n_categories: int
    supply: int | None = None
    reserve_min: int = 1
    reserve_max: int = 3
    p_eligible: float = 0.6
    p_beneficiary: float = 0.5
    p_listed: float = 0.5

    def __post_init__(self) -> None:
        if self.n_patients < 0 or self.n_categories < 0:
            raise BadSpecError("BAD_SPEC: counts must be non-negative")
        if self.supply is not None and self.supply < self.n_categories:
            raise BadSpecError("BAD_SPEC: supply must give every category at least one unit")
        if self.supply is not None and self.n_categories == 0 and self.supply:
            raise BadSpecError("BAD_SPEC: supply without categories")
        if not 1 <= self.reserve_min <= self.reserve_max:
            raise BadSpecError("BAD_SPEC: need 1 <= reserve_min <= reserve_max")
        for name in ("p_eligible", "p_beneficiary", "p_listed"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise BadSpecError(f"BAD_SPEC: {name} must lie in [0, 1]")


def random_instance(spec: RandomSpec, seed: int | np.random.Generator | None = None) -> Instance:
    rng = np.random.default_rng(seed)
    n, C = spec.n_patients, spec.n_categories
    patients = [f"i{k}" for k in range(1, n + 1)]
    if spec.supply is not None and C:
        reserves = 1 + rng.multinomial(spec.supply - C, np.full(C, 1.0 / C))
    else:
        reserves = rng.integers(spec.reserve_min, spec.reserve_max + 1, size=C)
    pats = np.array(patients, dtype=object)
    cats = []
    for k in range(C):
        elig = rng.random(n) < spec.p_eligible
        ben = elig & (rng.random(n) < spec.p_beneficiary)
        listed = ~elig & (rng.random(n) < spec.p_listed)
        ranking = [
            *rng.permutation(pats[ben]),
            BETA,
            *rng.permutation(pats[elig & ~ben]),
            ETA,
            *rng.permutation(pats[listed]),
        ]
        cats.append(_category(f"c{k + 1}", int(reserves[k]), ranking))
    return Instance(tuple(patients), tuple(cats))


def small_instance(rng: np.random.Generator, max_patients: int = 7, max_categories: int = 4, max_supply: int = 6) -> Instance:
    """Random desk-scale instance with varied density, for oracle comparisons."""
    C = int(rng.integers(1, min(max_categories, max_supply) + 1))
    spec = RandomSpec(
        n_patients=int(rng.integers(0, max_patients + 1)),
        n_categories=C,
        supply=int(rng.integers(C, max_supply + 1)),
        p_eligible=float(rng.uniform(0.2, 1.0)),
        p_beneficiary=float(rng.uniform(0.0, 1.0)),
        p_listed=0.5,
    )
    return random_instance(spec, rng)


def premise_instance(rng: np.random.Generator, max_tries: int = 10_000) -> Instance:
    """Random instance meeting the sparse-category premise, by rejection sampling.

    Reserves are drawn first, then beneficiary sets are grown until every
    category has at least ``min(q, b * r_c)`` beneficiaries, with ``b`` the
    largest number of sparse categories any patient benefits from.
    """
    from .oracle import hall_check

    for _ in range(max_tries):
        C = int(rng.integers(1, 5))
        reserves = rng.integers(1, 4, size=C)
        q = int(reserves.sum())
        n = int(rng.integers(q, 3 * q + 3))
        patients = [f"i{k}" for k in range(1, n + 1)]
        b_target = int(rng.integers(1, C + 1))
        cats = []
        for k in range(C):
            need = min(q, b_target * int(reserves[k]))
            size = int(rng.integers(need, n + 1)) if need <= n else n
            ben = list(rng.choice(patients, size=size, replace=False))
            others = [p for p in patients if p not in set(ben)]
            elig_extra = [p for p in others if rng.random() < 0.5]
            rest = [p for p in others if p not in set(elig_extra)]
            cats.append(_category(f"c{k + 1}", int(reserves[k]), [*ben, BETA, *elig_extra, ETA, *rest]))
        inst = Instance(tuple(patients), tuple(cats))
        if hall_check(inst).premise_holds:
            return inst
    raise BadSpecError("BAD_SPEC: could not sample a premise-satisfying instance")


def generate(source: str | RandomSpec, seed: int | None = None) -> Instance:
    """A named preset, or a random instance drawn from ``source`` with ``seed``."""
    if isinstance(source, str):
        return preset(source)
    return random_instance(source, seed)
