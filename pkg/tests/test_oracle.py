import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reservematch.generate import RandomSpec, pandemic, premise_instance, random_instance, small_instance
from reservematch.model import BETA, ETA, Category, Instance, Matching, PriorityOrder, matching_stats
from reservematch.oracle import (
    ComponentKind,
    TooLargeError,
    check_equivalence_prop2,
    count_matchings,
    decompose_symmetric_difference,
    enumerate_matchings,
    hall_check,
    is_pareto_optimal_bruteforce,
    oracle_max_beneficiary,
    oracle_max_in_max,
    oracle_max_resource,
    oracle_optima,
)

MU_B = {"i1": "c1"}
MU_E = {"i1": "c2", "i2": "c1"}


class TestEnumeration:
    def test_ex1(self, ex1):
        got = set(enumerate_matchings(ex1))
        want = {Matching(m) for m in ({}, {"i1": "c1"}, {"i1": "c2"}, {"i2": "c1"}, MU_E)}
        assert got == want
        assert len(list(enumerate_matchings(ex1))) == 5

    def test_ex3(self, ex3):
        assert len(list(enumerate_matchings(ex3))) == 3
        assert count_matchings(ex3) == 3

    def test_empty(self, empty):
        assert list(enumerate_matchings(empty)) == [Matching()]

    def test_guard(self):
        inst = random_instance(RandomSpec(11, 2), 0)
        with pytest.raises(TooLargeError) as exc:
            next(enumerate_matchings(inst))
        assert exc.value.code == "TOO_LARGE"
        assert str(3**11) in str(exc.value)

    def test_supply_guard(self):
        inst = Instance(("a",), (Category("c", 11, PriorityOrder(("a", BETA, ETA))),))
        with pytest.raises(TooLargeError):
            oracle_optima(inst)
        assert oracle_optima(inst, guard=-1).max_resource == 1

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_count_cross_check(self, seed):
        inst = small_instance(np.random.default_rng(seed))
        ms = list(enumerate_matchings(inst))
        assert len(ms) == len(set(ms)) == count_matchings(inst)
        for m in ms:
            assert all(inst.is_eligible(p, c) for p, c in m.items())
            assert all(n <= inst.reserve(c) for c, n in m.counts().items())


class TestOptima:
    def test_ex1(self, ex1):
        assert oracle_max_resource(ex1) == 2
        assert oracle_max_beneficiary(ex1) == 1
        assert oracle_max_in_max(ex1) == (2, 0)

    def test_ex2(self, ex2):
        assert oracle_max_in_max(ex2) == (2, 2)

    def test_empty(self, empty):
        assert (oracle_max_resource(empty), oracle_max_beneficiary(empty), oracle_max_in_max(empty)) == (0, 0, (0, 0))

    def test_ex1_no_joint_optimum(self, ex1):
        stats = [matching_stats(ex1, m).as_tuple() for m in enumerate_matchings(ex1)]
        assert (2, 1) not in stats
        assert not oracle_optima(ex1).joint_achievable


class TestPareto:
    def test_ex1(self, ex1):
        assert not is_pareto_optimal_bruteforce(ex1, MU_B)
        assert is_pareto_optimal_bruteforce(ex1, MU_E)

    def test_empty_matching_dominated(self, ex3):
        assert not is_pareto_optimal_bruteforce(ex3, {})

    def test_equivalence_examples(self, ex1, ex2):
        assert check_equivalence_prop2(ex1)
        assert check_equivalence_prop2(ex2)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_literal_dominance(self, seed):
        # literal domination by matched-set containment, pairwise over everything
        inst = small_instance(np.random.default_rng(seed), max_patients=5)
        ms = list(enumerate_matchings(inst))
        for m in ms:
            dominated = any(m.matched < other.matched for other in ms)
            assert is_pareto_optimal_bruteforce(inst, m) == (not dominated)


class TestHall:
    def test_pandemic(self):
        h = hall_check(pandemic())
        assert h.premise_holds and h.all_beneficiary_exists
        assert h.sparse == {"c_h"} and h.b == 1

    def test_ex1(self, ex1):
        h = hall_check(ex1)
        assert not h.premise_holds and not h.all_beneficiary_exists

    def test_single_beneficiary(self):
        inst = Instance(("a",), (Category("c", 1, PriorityOrder(("a", BETA, ETA))),))
        h = hall_check(inst)
        assert h.premise_holds and h.all_beneficiary_exists

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_conclusion_matches_enumeration(self, seed):
        inst = small_instance(np.random.default_rng(seed))
        exists = any(
            len(m) == inst.q and all(inst.is_beneficiary(p, c) for p, c in m.items())
            for m in enumerate_matchings(inst)
        )
        assert hall_check(inst).all_beneficiary_exists == exists

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_premise_instances(self, seed):
        inst = premise_instance(np.random.default_rng(seed))
        h = hall_check(inst)
        assert h.premise_holds and h.all_beneficiary_exists
        # b and the premise, recomputed literally
        sparse = {c.id for c in inst.categories if len(inst.beneficiaries(c.id)) < inst.q}
        b = max((sum(p in inst.beneficiaries(c) for c in sparse) for p in inst.patients), default=0)
        assert h.sparse == sparse and h.b == b
        assert all(len(inst.beneficiaries(c.id)) >= min(inst.q, b * c.reserve) for c in inst.categories)


class TestDecomposition:
    def test_ex2_neutral_cycle(self, ex2):
        d = decompose_symmetric_difference(ex2, {"i1": "c2", "i2": "c1"}, {"i1": "c1", "i2": "c2"})
        (comp,) = [c for c in d.components if c.kind is not ComponentKind.ISOLATED]
        assert comp.kind is ComponentKind.NEUTRAL
        assert set(comp.patients) == {"i1", "i2"} and len(comp.slots) == 2
        assert comp.potential == 2

    def test_identical_all_isolated(self, ex2):
        d = decompose_symmetric_difference(ex2, MU_E, MU_E)
        assert d.kinds() == {ComponentKind.ISOLATED}
        assert len(d.components) == 4

    def test_ex1_chain_is_incremental_of_mu_e(self, ex1):
        # more mu_e edges than mu_b edges: decremental for mu_b, incremental for mu_e
        (comp,) = decompose_symmetric_difference(ex1, MU_B, MU_E).of_kind("DECREMENTAL")
        assert (comp.mu1_edges, comp.mu2_edges) == (1, 2)
        (rev,) = decompose_symmetric_difference(ex1, MU_E, MU_B).of_kind("INCREMENTAL")
        assert (rev.mu1_edges, rev.mu2_edges) == (2, 1)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_edge_accounting(self, seed):
        rng = np.random.default_rng(seed)
        inst = small_instance(rng)
        ms = list(enumerate_matchings(inst))
        m1, m2 = (ms[int(k)] for k in rng.integers(len(ms), size=2))
        d = decompose_symmetric_difference(inst, m1, m2)
        diff = sum(c.mu2_edges - c.mu1_edges for c in d.components)
        assert diff == len(m2) - len(m1)
        gain = sum(c.potential for c in d.components)
        assert gain == matching_stats(inst, m2).beneficiary_assigned - matching_stats(inst, m1).beneficiary_assigned
        for c in d.components:
            assert abs(c.mu1_edges - c.mu2_edges) <= 1
        covered = [p for c in d.components for p in c.patients]
        assert sorted(covered) == sorted(inst.patients)


def test_every_pair_of_maximum_matchings_is_neutral():
    rng = np.random.default_rng(2)
    for _ in range(40):
        inst = small_instance(rng)
        ms = list(enumerate_matchings(inst))
        top = max(len(m) for m in ms)
        best = [m for m in ms if len(m) == top][:6]
        for m1, m2 in itertools.product(best, repeat=2):
            d = decompose_symmetric_difference(inst, m1, m2)
            assert d.kinds() <= {ComponentKind.ISOLATED, ComponentKind.NEUTRAL}
