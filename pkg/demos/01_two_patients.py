"""
Two patients, two categories
============================

Patient i1 benefits from c1 and is eligible for c2; i2 is eligible only for
c1. Serving both patients and serving a beneficiary cannot both be done.
"""

from reservematch import matching_stats, preset, smart_pipeline
from reservematch.oracle import enumerate_matchings, oracle_optima

inst = preset("example1")
for c in inst.categories:
    print(c.id, "r =", c.reserve, "ranking:", " ".join(c.priority.ranking))

# %% every feasible matching and its (assigned, beneficiary_assigned) score
for m in enumerate_matchings(inst):
    print(dict(m), matching_stats(inst, m).as_tuple())

opt = oracle_optima(inst)
print("most units:", opt.max_resource, " most beneficiaries:", opt.max_beneficiary)
print("both at once:", opt.joint_achievable)

# %% the pipeline keeps every unit in use and gives up the beneficiary
res = smart_pipeline(inst)
for name, m, s in zip(("stage 1", "stage 2", "stage 3"), (res.mu1, res.mu2, res.mu3), res.stats):
    print(name, dict(m), s.as_tuple())
