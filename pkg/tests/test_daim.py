import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_compliant_matching
from reservematch.daim import PrecedenceOrder, build_hypothetical_market, run_daim
from reservematch.generate import small_instance
from reservematch.model import BETA, DUMMY, ETA, Category, Instance, PriorityOrder, InstanceError, Matching, check_eligibility, check_respects_priorities


def test_market_ex1_matched(ex1):
    market = build_hypothetical_market(ex1, {"i1": "c2", "i2": "c1"}, ["c1", "c2"])
    assert market.patient_prefs["i1"] == ("c2", "c1")
    assert market.patient_prefs["i2"] == ("c1", "c2")


def test_market_ex1_unmatched(ex1):
    market = build_hypothetical_market(ex1, {})
    assert market.patient_prefs["i1"] == (DUMMY, "c1", "c2")
    assert market.patient_prefs["i2"] == (DUMMY, "c1", "c2")
    assert market.capacities[DUMMY] == 0


def test_market_acceptability(ex1):
    market = build_hypothetical_market(ex1, {})
    assert market.category_prefs["c2"] == ("i1",)
    assert market.category_prefs["c1"] == ("i1", "i2")


def test_ex1_seeded_with_forced_matching(ex1):
    mu = {"i1": "c2", "i2": "c1"}
    assert dict(run_daim(ex1, mu, ["c1", "c2"])) == mu


def test_ex3_displacement(ex3):
    assert dict(run_daim(ex3, {"i2": "c"})) == {"i1": "c"}


def test_precedence_must_be_permutation(ex1):
    with pytest.raises(InstanceError):
        run_daim(ex1, {}, ["c1"])
    with pytest.raises(InstanceError):
        PrecedenceOrder.for_instance(ex1, ["c1", "c1"])


def test_ineligible_initial_rejected(ex1):
    with pytest.raises(InstanceError) as exc:
        run_daim(ex1, {"i2": "c2"})
    assert exc.value.code == "INELIGIBLE"


def test_precedence_changes_outcome():
    both = PriorityOrder(("a", BETA, ETA))
    inst = Instance(("a",), (Category("x", 1, both), Category("y", 1, both)))
    assert dict(run_daim(inst, {}, ["x", "y"])) == {"a": "x"}
    assert dict(run_daim(inst, {}, ["y", "x"])) == {"a": "y"}
    # a held unit is kept whatever the precedence
    assert dict(run_daim(inst, {"a": "y"}, ["x", "y"])) == {"a": "y"}


def prefix_counts(instance, matching, cid):
    """Number of c-holders in each prefix of c's ranked patients."""
    ranked = instance.category(cid).priority.patients
    held = {p for p, c in matching.items() if c == cid}
    return np.cumsum([p in held for p in ranked])


def daim_case(seed):
    rng = np.random.default_rng(seed)
    inst = small_instance(rng)
    mu = random_compliant_matching(inst, rng)
    order = list(rng.permutation(list(inst.category_ids)))
    return inst, mu, order


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_daim_guarantees(seed):
    inst, mu, order = daim_case(seed)
    out = run_daim(inst, mu, order)
    assert check_eligibility(inst, out) == []
    assert check_respects_priorities(inst, out) == []
    before, after = mu.counts(), out.counts()
    for c in inst.category_ids:
        assert after.get(c, 0) >= before.get(c, 0)
        assert after.get(c, 0) <= inst.reserve(c)
        assert np.all(prefix_counts(inst, out, c) >= prefix_counts(inst, mu, c))
        ben = inst.beneficiaries(c)
        assert sum(p in ben for p in out.members(c)) >= sum(p in ben for p in mu.members(c))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fixed_point_and_determinism(seed):
    inst, mu, order = daim_case(seed)
    out = run_daim(inst, mu, order)
    assert run_daim(inst, out, order) == out
    assert run_daim(inst, mu, order) == out


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_proposal_bound(seed):
    inst, mu, order = daim_case(seed)
    market = build_hypothetical_market(inst, mu, order)
    assert all(len(prefs) <= len(inst.categories) + 1 for prefs in market.patient_prefs.values())


def test_empty_initial_gives_stable_outcome():
    rng = np.random.default_rng(8)
    for _ in range(50):
        inst = small_instance(rng)
        out = run_daim(inst, Matching())
        assert check_respects_priorities(inst, out) == []
