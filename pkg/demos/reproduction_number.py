"""
Reproduction numbers of heterogeneous populations
=================================================

R_e(eta) is the spectral radius of the vaccinated next-generation operator.
"""

# %%
# The multipartite population: groups of sizes 1/2, 1/4, 1/8, ... where nobody
# infects their own group.  Truncating after N groups, R_0 settles quickly.
import numpy as np

from vaccpareto import basic_R, build_multipartite, effective_R, zoo
from vaccpareto.spectral import gradient_Re

for n in (4, 8, 12, 16, 20):
    print(f"N={n:2d}  R_0 = {basic_R(build_multipartite(n, 1.0)):.6f}")

# %%
# R_e is homogeneous: halving the non-vaccinated share halves R_e.
m = zoo()["sbm2"]
eta = np.array([0.9, 0.6])
print("R_e(eta)     =", effective_R(m, eta))
print("R_e(eta / 2) =", effective_R(m, eta / 2))

# %%
# Uniform vaccination at 1 - 1/R_0 is exactly critical.
r0 = basic_R(m)
print("R_e(1/R_0)   =", effective_R(m, np.full(2, 1 / r0)))

# %%
# The gradient tells which group is worth vaccinating first.
print("dR_e/deta at eta = 1:", gradient_Re(m, np.ones(2)))
