"""
Best and worst vaccination strategies
=====================================

For every budget c the Pareto frontier gives the smallest reachable loss and
the anti-Pareto frontier the largest.  Everything feasible lies in between.
"""

# %%
import numpy as np

from vaccpareto import (
    CostFunction,
    anti_pareto_frontier,
    build_multipartite,
    effective_R,
    eradication_cost,
    multipartite_prefix_strategy,
    pareto_frontier,
    zoo,
)

m = build_multipartite(8, 1.0)
cf = CostFunction.uniform(m)
front = pareto_frontier(m, "re", cf, grid_size=11)
anti = anti_pareto_frontier(m, "re", cf, grid_size=11)

# %%
# On this population vaccinating the largest-degree groups first is optimal:
# compare with the strategy that keeps only [0, 1 - c] unvaccinated.
for p in front.points:
    shape = effective_R(m, multipartite_prefix_strategy(m, p.cost))
    print(f"c={p.cost:.3f}  L*={p.loss:.5f}  high-degree-first={shape:.5f}")

# %%
print("worst strategies:")
for p in anti.points:
    print(f"c={p.cost:.3f}  L_sup={p.loss:.5f}  uniform={(1 - p.cost) * effective_R(m, np.ones(m.n)):.5f}")

# %%
# A population with R_0 > 1: the cheapest way to stop the epidemic.
sbm = zoo()["sbm2"]
rep = eradication_cost(sbm, CostFunction.uniform(sbm))
print("eradication cost", rep.value, "strategy", rep.strategy, "bound", rep.bound)
