"""
Timing the pipeline on a large random instance
==============================================
"""

import time

from reservematch import RandomSpec, random_instance
from reservematch.maxinmax import max_in_max
from reservematch.maxmatch import build_slot_graph, maximum_matching
from reservematch.daim import run_daim
from reservematch.model import check_eligibility, check_nonwasteful, check_respects_priorities, matching_stats

spec = RandomSpec(10_000, 50, supply=5_000, p_eligible=0.3, p_beneficiary=0.3)
t = time.perf_counter()
inst = random_instance(spec, seed=1)
print(f"generate   {time.perf_counter() - t:6.2f}s")

# %% the three stages, timed separately
t = time.perf_counter()
mu1 = maximum_matching(build_slot_graph(inst))
print(f"stage 1    {time.perf_counter() - t:6.2f}s", matching_stats(inst, mu1).as_tuple())
t = time.perf_counter()
mu2 = max_in_max(inst, mu1)
print(f"stage 2    {time.perf_counter() - t:6.2f}s", matching_stats(inst, mu2).as_tuple())
t = time.perf_counter()
mu3 = run_daim(inst, mu2)
print(f"stage 3    {time.perf_counter() - t:6.2f}s", matching_stats(inst, mu3).as_tuple())

# %%
for check in (check_eligibility, check_nonwasteful, check_respects_priorities):
    print(check.__name__, len(check(inst, mu3)))
