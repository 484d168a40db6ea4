import numpy as np
import pytest

from reservematch import Instance, Matching
from reservematch.generate import example1, example2, example3, small_instance


@pytest.fixture
def ex1() -> Instance:
    return example1()


@pytest.fixture
def ex2() -> Instance:
    return example2()


@pytest.fixture
def ex3() -> Instance:
    return example3()


@pytest.fixture
def empty() -> Instance:
    return Instance((), ())


def random_compliant_matching(instance: Instance, rng: np.random.Generator) -> Matching:
    """Random eligibility-compliant, capacity-feasible matching."""
    free = {c.id: c.reserve for c in instance.categories}
    out = {}
    for p in rng.permutation(list(instance.patients)):
        options = [c for c in instance.category_ids if free[c] and instance.is_eligible(p, c)]
        if options and rng.random() < 0.8:
            c = options[int(rng.integers(len(options)))]
            free[c] -= 1
            out[str(p)] = c
    return Matching(out)


def corpus(n: int = 1000, seed: int = 20240601):
    """Seeded small instances: |I| <= 7, |C| <= 4, q <= 6."""
    rng = np.random.default_rng(seed)
    return [small_instance(rng) for _ in range(n)]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in mod.SUMMARY:
            terminalreporter.write_line(line)
