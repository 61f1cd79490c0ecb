import numpy as np
import pytest

from vaccpareto.errors import DegenerateLoss, TooManySites
from vaccpareto.model import build_block_model, build_homogeneous, build_multipartite, multipartite_prefix_strategy
from vaccpareto.pareto import (
    CostFunction,
    Frontier,
    FrontierPoint,
    anti_pareto_frontier,
    chord_and_convexity_report,
    cost,
    envelope_violation,
    eradication_cost,
    feasible_region_sample,
    grid_oracle,
    loss_value,
    maximize_loss_at_cost,
    min_cost_at_loss,
    minimize_loss_at_cost,
    pareto_frontier,
    read_frontier_csv,
    write_frontier_csv,
)
from vaccpareto.spectral import effective_R

HOM2 = build_homogeneous(2.0)


def test_cost_values(models):
    m = models["sbm2"]
    cf = CostFunction.uniform(m)
    assert cost(cf, np.ones(2)) == 0.0
    assert cost(cf, np.zeros(2)) == 1.0
    assert cost(cf, [1.0, 0.5]) == 0.25
    aff = CostFunction.affine(m, [2.0, 1.0])
    assert aff.c_max == 1.5 and cost(aff, [0.0, 1.0]) == 1.0
    with pytest.raises(ValueError):
        CostFunction.affine(m, [0.0, 1.0])


def test_minimize_homogeneous():
    p = minimize_loss_at_cost(HOM2, "re", CostFunction.uniform(HOM2), 0.25)
    assert abs(p.loss - 1.5) < 1e-9 and abs(p.strategy[0] - 0.75) < 1e-9


@pytest.mark.parametrize("c", [0.1, 0.3, 0.5])
def test_minimize_multipartite_matches_prefix(c):
    m = build_multipartite(8, 1.0)
    p = minimize_loss_at_cost(m, "re", CostFunction.uniform(m), c)
    assert p.loss <= effective_R(m, multipartite_prefix_strategy(m, c)) + 1e-4
    assert abs(p.cost - c) < 1e-6


def test_minimize_sbm2_against_oracle(models):
    m = models["sbm2"]
    cf = CostFunction.uniform(m)
    orc = grid_oracle(m, "re", cf, 400)
    p = minimize_loss_at_cost(m, "re", cf, 0.25)
    assert abs(p.loss - orc.lower(0.25)) < 1e-3


def test_maximize_is_above_minimize(models):
    m = models["sbm2"]
    cf = CostFunction.uniform(m)
    lo = minimize_loss_at_cost(m, "re", cf, 0.25).loss
    hi = maximize_loss_at_cost(m, "re", cf, 0.25).loss
    assert hi > lo + 1e-3


def test_min_cost_at_loss():
    cf = CostFunction.uniform(HOM2)
    top = min_cost_at_loss(HOM2, "re", cf, 2.0)
    assert top.cost < 1e-9 and np.allclose(top.strategy, 1.0)
    assert abs(min_cost_at_loss(HOM2, "re", cf, 1.0).cost - 0.5) < 1e-6
    assert abs(min_cost_at_loss(HOM2, "i", cf, 0.0).cost - 0.5) < 1e-6


def test_homogeneous_frontiers_coincide():
    cf = CostFunction.uniform(HOM2)
    front = pareto_frontier(HOM2, "re", cf, 11)
    assert abs(front.costs[-1] - 1.0) < 1e-6
    assert np.allclose(front.losses, 2 * (1 - front.costs), atol=1e-8)
    anti = anti_pareto_frontier(HOM2, "re", cf, 11)
    assert np.allclose(anti.losses, 2 * (1 - anti.costs), atol=1e-8)


def test_sbm2_frontiers_against_oracle(models):
    m = models["sbm2"]
    cf = CostFunction.uniform(m)
    orc = grid_oracle(m, "re", cf, 200)
    front = pareto_frontier(m, "re", cf, 11)
    anti = anti_pareto_frontier(m, "re", cf, 11)
    assert np.all(np.abs(front.losses - orc.lower(front.costs)) <= 2e-3)
    assert np.all(np.abs(anti.losses - orc.upper(anti.costs)) <= 2e-3)
    assert np.all(anti.losses >= front.losses[: anti.losses.size] - 1e-9)


def test_multipartite_frontier_matches_prefix():
    m = build_multipartite(8, 1.0)
    cf = CostFunction.uniform(m)
    front = pareto_frontier(m, "re", cf, 11, c_end=0.5)
    prefix = [effective_R(m, multipartite_prefix_strategy(m, c)) for c in front.costs]
    assert np.all(np.abs(front.losses - prefix) <= 1e-3)


def test_degenerate_loss_rejected():
    z = build_block_model([0.5, 0.5], np.zeros((2, 2)))
    with pytest.raises(DegenerateLoss):
        pareto_frontier(z, "re", CostFunction.uniform(z))
    with pytest.raises(DegenerateLoss):
        pareto_frontier(build_homogeneous(0.8), "i", CostFunction.uniform(build_homogeneous(0.8)))


def test_grid_oracle_homogeneous():
    orc = grid_oracle(HOM2, "re", CostFunction.uniform(HOM2), 10)
    assert orc.costs.size == 11
    assert np.allclose(orc.losses, 2 * (1 - orc.costs))


def test_grid_oracle_zero_kernel():
    z = build_block_model([0.5, 0.5], np.zeros((2, 2)))
    orc = grid_oracle(z, "re", CostFunction.uniform(z), 10)
    assert len(orc.pareto.points) == 1
    assert orc.pareto.points[0].cost == 0 and orc.pareto.points[0].loss == 0


def test_grid_oracle_size_limit(models):
    m = models["multipartite"]
    with pytest.raises(TooManySites):
        grid_oracle(m, "re", CostFunction.uniform(m))


def test_feasible_sample_homogeneous():
    s = feasible_region_sample(HOM2, "re", CostFunction.uniform(HOM2), 200, seed=3)
    assert np.allclose(s.losses, 2 * (1 - s.costs), atol=1e-12)


def test_feasible_uniform_family(models):
    m = models["multipartite"]
    s = feasible_region_sample(m, "re", CostFunction.uniform(m), 300)
    uni = np.all(s.strategies == s.strategies[:, :1], axis=1)
    r0 = effective_R(m, np.ones(m.n))
    assert np.allclose(s.losses[uni], (1 - s.costs[uni]) * r0, atol=1e-10)


def test_feasible_inside_oracle(models):
    m = models["sbm2"]
    cf = CostFunction.uniform(m)
    res = 200
    orc = grid_oracle(m, "re", cf, res)
    s = feasible_region_sample(m, "re", cf, 1000)
    # off-lattice points may beat the staircase by at most one lattice step of the loss
    slack = np.max(m.ngk.sum(axis=0) * m.weights) / res
    assert envelope_violation(s, orc.pareto, orc.anti, cf.c_max) <= slack


def test_eradication_cost(models):
    cf = CostFunction.uniform(HOM2)
    rep = eradication_cost(HOM2, cf)
    assert abs(rep.value - 0.5) < 1e-5 and abs(rep.bound - 0.5) < 1e-12
    sub = build_homogeneous(0.8)
    assert eradication_cost(sub, CostFunction.uniform(sub)).value == 0.0
    m = models["sbm2"]
    rep = eradication_cost(m, CostFunction.uniform(m))
    assert rep.consistent and rep.within_bound
    assert abs(rep.value - rep.value_via_i) < 1e-5


def test_chord_report():
    cf = CostFunction.uniform(HOM2)
    rep = chord_and_convexity_report(pareto_frontier(HOM2, "re", cf, 11), cf)
    assert rep.holds and rep.worst_excess < 1e-8


def test_chord_detects_violation():
    pts = [FrontierPoint(c, l, None, "converged") for c, l in [(0.0, 1.0), (0.5, 0.9), (1.0, 0.0)]]
    rep = chord_and_convexity_report(Frontier(pts, "re", "pareto"), CostFunction("uniform", np.ones(1), np.ones(1)))
    assert not rep.holds


def test_csv_round_trip(tmp_path, models):
    m = models["sbm2"]
    front = pareto_frontier(m, "re", CostFunction.uniform(m), 5)
    path = tmp_path / "f.csv"
    side = write_frontier_csv(front, path)
    assert path.read_bytes().startswith(b"cost,loss,status\n")
    back = read_frontier_csv(path)
    assert np.array_equal(back.costs, front.costs) and np.array_equal(back.losses, front.losses)
    assert np.array_equal(back.strategies, front.strategies)
    assert side.endswith(".strategies.json")


def test_frontier_is_deterministic(models):
    m = models["sbm2_asym"]
    cf = CostFunction.uniform(m)
    a = pareto_frontier(m, "i", cf, 5)
    b = pareto_frontier(m, "i", cf, 5)
    assert np.array_equal(a.losses, b.losses) and np.array_equal(a.strategies, b.strategies)


def test_loss_value_rejects_unknown():
    with pytest.raises(ValueError):
        loss_value(HOM2, "x", np.ones(1))
