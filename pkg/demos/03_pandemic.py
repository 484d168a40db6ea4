"""
A three-category vaccine rollout
================================

One patient stands for a million people: 5 units for 22 healthcare workers,
5 for 54 elderly patients, 40 for everyone else. Everybody is eligible for
every category.
"""

from reservematch import daim_only, matching_stats, preset, smart_pipeline
from reservematch.oracle import hall_check

inst = preset("pandemic")
print("patients:", len(inst.patients), " units:", inst.q)
for c in inst.categories:
    print(f"  {c.id}: r={c.reserve} beneficiaries={len(inst.beneficiaries(c.id))}")

h = hall_check(inst)
print("sparse categories:", sorted(h.sparse), " b =", h.b)
print("premise holds:", h.premise_holds, " all units can reach beneficiaries:", h.all_beneficiary_exists)

# %% pipeline against plain deferred acceptance, general category first
# every ranking puts its beneficiaries on top, so both end up serving 50
order = ["c_g", "c_h", "c_e"]
res = smart_pipeline(inst, order)
plain = daim_only(inst, order)
print("pipeline:     ", res.stats[2].as_tuple())
print("deferred acc.:", matching_stats(inst, plain).as_tuple())
for c in inst.category_ids:
    ben = inst.beneficiaries(c)
    print(c, sum(p in ben for p in res.mu3.members(c)), "vs", sum(p in ben for p in plain.members(c)))

# %% on the two-patient instance plain deferred acceptance wastes a unit
small = preset("example1")
print("pipeline:     ", smart_pipeline(small).stats[2].as_tuple())
print("deferred acc.:", matching_stats(small, daim_only(small)).as_tuple())
