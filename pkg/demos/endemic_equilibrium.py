"""
Endemic equilibrium of the SIS dynamics
=======================================

The maximal equilibrium g is the long-time limit of the epidemic started
from everybody infected.
"""

# %%
import numpy as np

from vaccpareto import effective_R, equilibrium_strategy, integrate_sis, maximal_equilibrium, zoo

m = zoo()["sbm2_asym"]
eta = np.array([0.8, 0.7])
eq = maximal_equilibrium(m, eta)
print("g =", eq.g, " I =", eq.infected_fraction)
print("maximality certificate R_e(eta (1 - g)) =", eq.maximality_certificate)

# %%
# The ODE started from u = 1 decreases to the same point.
traj = integrate_sis(m, eta, np.ones(2), t_end=200.0, samples=5)
for t, u in zip(traj.times, traj.states):
    print(f"t={t:6.1f}  u={u}")

# %%
# Vaccinating exactly the equilibrium infected share of each group is critical.
eta_equi = equilibrium_strategy(m)
print("eta_equi =", eta_equi, " R_e =", effective_R(m, eta_equi))

# %%
# Below the threshold there is no endemic state.
print("I at eta = 0.3:", maximal_equilibrium(m, np.full(2, 0.3)).infected_fraction)
