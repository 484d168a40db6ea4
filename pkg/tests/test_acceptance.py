"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line; under pytest the lines
are repeated in the terminal summary. Run standalone with
``python tests/test_acceptance.py`` for just the summary lines.
"""

import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import corpus, random_compliant_matching  # noqa: E402
from reservematch.cli import main  # noqa: E402
from reservematch.daim import run_daim  # noqa: E402
from reservematch.generate import RandomSpec, pandemic, premise_instance, random_instance, small_instance  # noqa: E402
from reservematch.maxinmax import augment_chain, chain_potential, find_positive_chain, max_in_max  # noqa: E402
from reservematch.maxmatch import build_slot_graph, maximum_matching  # noqa: E402
from reservematch.model import (  # noqa: E402
    check_eligibility,
    check_nonwasteful,
    check_respects_priorities,
    matching_stats,
)
from reservematch.oracle import (  # noqa: E402
    ComponentKind,
    check_equivalence_prop2,
    decompose_symmetric_difference,
    enumerate_matchings,
    hall_check,
    oracle_optima,
)
from reservematch.pipeline import smart_pipeline  # noqa: E402


@lru_cache(maxsize=1)
def shared_corpus():
    return corpus(1000)


def clean(inst, m):
    return not (check_eligibility(inst, m) or check_nonwasteful(inst, m) or check_respects_priorities(inst, m))


SUMMARY: list[str] = []


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    SUMMARY.append(line)
    print(line, flush=True)
    return ok


def criterion_1():
    t = time.perf_counter()
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["solve", "preset:example1"])
    lines = buf.getvalue().splitlines()
    from reservematch.generate import example1

    inst = example1()
    mu = smart_pipeline(inst).mu3
    elapsed = time.perf_counter() - t
    ok = (
        code == 0
        and {"match.i1=c2", "match.i2=c1", "assigned=2", "beneficiary_assigned=0"} <= set(lines)
        and len([x for x in lines if x.startswith("match.")]) == 2
        and dict(mu) == {"i1": "c2", "i2": "c1"}
        and clean(inst, mu)
        and elapsed < 1.0
    )
    return report(1, "golden solve of preset example1", ok, f"{elapsed:.3f}s")


def criterion_2():
    from reservematch.generate import example1

    t = time.perf_counter()
    inst = example1()
    opt = oracle_optima(inst)
    both = any(
        matching_stats(inst, m).as_tuple() == (opt.max_resource, opt.max_beneficiary) for m in enumerate_matchings(inst)
    )
    elapsed = time.perf_counter() - t
    ok = opt.max_resource == 2 and opt.max_beneficiary == 1 and not both and not opt.joint_achievable and elapsed < 1.0
    return report(2, "no joint optimum on preset example1", ok, f"{elapsed:.3f}s")


def criterion_3():
    insts = shared_corpus()
    t = time.perf_counter()
    passed = sum(check_equivalence_prop2(inst) for inst in insts)
    elapsed = time.perf_counter() - t
    ok = passed == len(insts) and elapsed < 120
    return report(3, "Pareto optimal iff maximum size", ok, f"{passed}/{len(insts)} in {elapsed:.1f}s")


def criterion_4():
    insts = shared_corpus()
    passed = 0
    for inst in insts:
        mu3 = smart_pipeline(inst).mu3
        passed += matching_stats(inst, mu3).as_tuple() == oracle_optima(inst).max_in_max and clean(inst, mu3)
    return report(4, "pipeline reaches the max-in-max optimum", passed == len(insts), f"{passed}/{len(insts)}")


def criterion_5():
    insts = shared_corpus()
    passed = injected = 0
    for inst in insts:
        mu2 = max_in_max(inst, maximum_matching(build_slot_graph(inst)))
        ok = find_positive_chain(inst, mu2) is None
        best = matching_stats(inst, mu2).beneficiary_assigned
        size = len(mu2)
        worse = [m for m in enumerate_matchings(inst) if len(m) == size]
        worse = [m for m in worse if matching_stats(inst, m).beneficiary_assigned < best]
        if worse:
            injected += 1
            mu = min(worse, key=lambda m: matching_stats(inst, m).beneficiary_assigned)
            chain = find_positive_chain(inst, mu)
            if chain is None:
                ok = False
            else:
                before = matching_stats(inst, mu).beneficiary_assigned
                after = augment_chain(inst, mu, chain)
                ok = ok and len(after) == size and matching_stats(inst, after).beneficiary_assigned > before
                ok = ok and chain_potential(inst, mu, chain) > 0
        passed += ok
    detail = f"{passed}/{len(insts)}, {injected} with an injected suboptimal matching"
    return report(5, "no positive chain at the fixed point", passed == len(insts), detail)


def prefix_dominates(inst, new, old, cid):
    ranked = inst.category(cid).priority.patients
    a = np.cumsum([new.get(p) == cid for p in ranked])
    b = np.cumsum([old.get(p) == cid for p in ranked])
    return bool(np.all(a >= b))


def criterion_6():
    rng = np.random.default_rng(4242)
    n = 1000
    passed = 0
    for _ in range(n):
        inst = small_instance(rng)
        mu = random_compliant_matching(inst, rng)
        order = list(rng.permutation(list(inst.category_ids)))
        out = run_daim(inst, mu, order)
        before, after = mu.counts(), out.counts()
        counts_ok = all(after.get(c, 0) >= before.get(c, 0) for c in inst.category_ids)
        dom_ok = all(prefix_dominates(inst, out, mu, c) for c in inst.category_ids)
        passed += counts_ok and dom_ok and not check_respects_priorities(inst, out)
    return report(6, "deferred acceptance with initial matching", passed == n, f"{passed}/{n}")


def criterion_7():
    rng = np.random.default_rng(7)
    n = 200
    passed = sum(hall_check(premise_instance(rng)).all_beneficiary_exists for _ in range(n))
    h = hall_check(pandemic())
    ok = passed == n and h.premise_holds and h.all_beneficiary_exists
    return report(7, "all units to beneficiaries", ok, f"{passed}/{n}, pandemic premise={h.premise_holds}")


def criterion_8():
    rng = np.random.default_rng(88)
    insts = shared_corpus()
    n = 500
    passed = 0
    for _ in range(n):
        inst = insts[int(rng.integers(len(insts)))]
        ms = list(enumerate_matchings(inst))
        top = max(len(m) for m in ms)
        best = [m for m in ms if len(m) == top]
        m1, m2 = (best[int(k)] for k in rng.integers(len(best), size=2))
        d = decompose_symmetric_difference(inst, m1, m2)
        neutral_only = d.kinds() <= {ComponentKind.ISOLATED, ComponentKind.NEUTRAL}
        total = sum(c.potential for c in d.of_kind(ComponentKind.NEUTRAL))
        gain = matching_stats(inst, m2).beneficiary_assigned - matching_stats(inst, m1).beneficiary_assigned
        passed += neutral_only and total == gain
    return report(8, "symmetric difference of maximum matchings", passed == n, f"{passed}/{n}")


def criterion_9():
    spec = RandomSpec(10_000, 50, supply=5_000, p_eligible=0.3, p_beneficiary=0.3)
    inst = random_instance(spec, 1)
    t = time.perf_counter()
    res = smart_pipeline(inst)
    elapsed = time.perf_counter() - t
    ok = elapsed < 10.0 and clean(inst, res.mu3)
    s = res.stats[2]
    detail = f"{elapsed:.2f}s, assigned={s.assigned} beneficiary_assigned={s.beneficiary_assigned}"
    return report(9, "10,000 patients, 50 categories, 5,000 units", ok, detail)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 10)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
