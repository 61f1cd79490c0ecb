"""
Equivalent models
=================

Splitting a group into identical subgroups, or relabelling groups, changes
nothing: reproduction numbers, equilibria, costs and frontiers all agree.
"""

# %%
import numpy as np

from vaccpareto import blow_up, effective_R, lift_strategy, project_strategy, reduce, verify_equivalence, zoo

coarse = zoo()["sbm2"]
fine, mapping = blow_up(coarse, [5, 5])
print("fine model has", fine.n, "sites; classes:", mapping.fine_to_coarse)

# %%
# Lifting copies a group value to every subgroup; projecting averages.
eta = np.array([0.3, 0.9])
lifted = lift_strategy(eta, mapping)
print("R_e coarse", effective_R(coarse, eta), " R_e fine", effective_R(fine, lifted))
mixed = np.random.default_rng(0).uniform(size=fine.n)
print("R_e fine", effective_R(fine, mixed), " R_e of projection", effective_R(coarse, project_strategy(mixed, mapping)))

# %%
# Reduction recovers the original two groups.
back, _ = reduce(fine)
print(back.k.entries, back.weights)

# %%
print(verify_equivalence(fine, coarse, mapping).to_dict())
