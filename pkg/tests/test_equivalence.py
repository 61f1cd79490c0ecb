import numpy as np
import pytest

from vaccpareto.errors import DimensionMismatch, MappingInconsistent, WeightMismatch
from vaccpareto.equivalence import (
    SiteMapping,
    blow_up,
    check_mapping,
    lift_strategy,
    permutation_mapping,
    project_strategy,
    reduce,
    verify_equivalence,
)
from vaccpareto.model import build_block_model, build_homogeneous, build_multipartite, make_model, permuted
from vaccpareto.pareto import CostFunction, cost
from vaccpareto.spectral import basic_R, effective_R


def test_reduce_homogeneous_split():
    m = make_model([0.25] * 4, np.full((4, 4), 3.0))
    c, mp = reduce(m)
    assert c.n == 1 and c.k.entries[0, 0] == 3.0
    assert np.array_equal(mp.fine_to_coarse, [0, 0, 0, 0])


def test_reduce_keeps_distinct_gamma():
    m = make_model([0.5, 0.5], np.ones((2, 2)), [1.0, 2.0])
    assert reduce(m)[0].n == 2


def test_reduce_does_not_merge_near_equal_rows():
    m = make_model([0.5, 0.5], [[1.0, 1.0], [1.0, 1.0 + 1e-9]])
    assert reduce(m)[0].n == 2


def test_blow_up_then_reduce_is_identity(models):
    for m in models.values():
        fine, _ = blow_up(m, [3] * m.n)
        back, _ = reduce(fine)
        assert back.n == m.n
        assert np.allclose(back.k.entries, m.k.entries, rtol=0, atol=0)
        assert np.allclose(back.weights, m.weights, rtol=0, atol=1e-15)
        assert np.array_equal(back.gamma, m.gamma)


def test_sbm2_step_graphon_reduces(models):
    m = models["sbm2"]
    fine = make_model([0.1] * 10, np.kron(m.k.entries, np.ones((5, 5))))
    c, _ = reduce(fine)
    assert np.array_equal(c.k.entries, m.k.entries)
    assert np.allclose(c.weights, m.weights, atol=1e-15)


def test_blow_up_values(models):
    hom = build_homogeneous(2.0)
    fine, _ = blow_up(hom, [[0.5, 0.5]])
    assert np.all(fine.k.entries == 2.0) and abs(basic_R(fine) - 2.0) < 1e-12
    sbm = models["sbm2"]
    fine, mp = blow_up(sbm, [5, 5])
    assert fine.n == 10 and abs(basic_R(fine) - basic_R(sbm)) < 1e-10
    assert np.allclose(fine.space.labels[:, 1] - fine.space.labels[:, 0], 0.1)
    same, _ = blow_up(sbm, [1, 1])
    assert same == sbm


def test_blow_up_weight_mismatch(models):
    with pytest.raises(WeightMismatch):
        blow_up(models["sbm2"], [[0.2, 0.2], 2])
    with pytest.raises(WeightMismatch):
        blow_up(models["sbm2"], [0, 2])
    with pytest.raises(DimensionMismatch):
        blow_up(models["sbm2"], [2])


def test_project_and_lift(models):
    mp = SiteMapping([0, 0], [0.25, 0.75], [1.0])
    assert abs(project_strategy([1.0, 0.0], mp)[0] - 0.25) < 1e-15
    fine, mp = blow_up(models["sbm2"], [5, 5])
    lifted = lift_strategy([0.3, 0.9], mp)
    assert np.array_equal(lifted, [0.3] * 5 + [0.9] * 5)
    assert np.allclose(project_strategy(lifted, mp), [0.3, 0.9])
    assert np.array_equal(project_strategy(np.ones(10), mp), [1.0, 1.0])
    cf_f, cf_c = CostFunction.uniform(fine), CostFunction.uniform(models["sbm2"])
    assert abs(cost(cf_f, lifted) - cost(cf_c, [0.3, 0.9])) < 1e-15
    assert abs(effective_R(fine, lifted) - effective_R(models["sbm2"], [0.3, 0.9])) < 1e-10
    with pytest.raises(DimensionMismatch):
        lift_strategy([0.3], mp)
    with pytest.raises(DimensionMismatch):
        project_strategy(np.ones(3), mp)


def test_projection_preserves_losses_of_any_fine_strategy(models, rng):
    m = models["sbm2_asym"]
    fine, mp = blow_up(m, [[0.1, 0.2], [0.3, 0.3, 0.1]])
    for eta in rng.uniform(size=(20, fine.n)):
        assert abs(effective_R(fine, eta) - effective_R(m, project_strategy(eta, mp))) < 1e-10


def test_verify_sbm2_blow_up(models):
    fine, mp = blow_up(models["sbm2"], [5, 5])
    assert verify_equivalence(fine, models["sbm2"], mp, sample_count=10).passed


def test_verify_permuted_multipartite():
    m = build_multipartite(4, 1.5)
    perm = [3, 0, 4, 2, 1]
    p = permuted(m, perm)
    assert verify_equivalence(p, m, permutation_mapping(p, perm), sample_count=10).passed


def test_corrupted_mapping():
    m = build_block_model([0.5, 0.5], [[1.0, 2.0], [2.0, 1.0]], [1.0, 3.0])
    fine, mp = blow_up(m, [2, 2])
    bad = SiteMapping(mp.fine_to_coarse[::-1], mp.fine_weights, mp.coarse_weights)
    with pytest.raises(MappingInconsistent):
        check_mapping(fine, m, bad)
    with pytest.raises(MappingInconsistent):
        verify_equivalence(fine, m, bad)
    with pytest.raises(MappingInconsistent):
        SiteMapping([0, 2], [0.5, 0.5], [0.5, 0.5])


def test_mapping_json(models):
    fine, mp = blow_up(models["sbm2"], [2, 3])
    back = SiteMapping.from_json(mp.to_json(), fine, models["sbm2"])
    assert np.array_equal(back.fine_to_coarse, mp.fine_to_coarse)
    with pytest.raises(MappingInconsistent):
        SiteMapping.from_json("{}", fine, models["sbm2"])
