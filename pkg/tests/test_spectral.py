import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import radius
from vaccpareto.errors import DegenerateEigenpair, DimensionMismatch, SpaceMismatch
from vaccpareto.model import (
    FeatureSpace,
    Kernel,
    build_block_model,
    build_homogeneous,
    build_multipartite,
    build_perturbed_multipartite,
    make_model,
    next_gen_kernel,
)
from vaccpareto.spectral import (
    apply_T,
    basic_R,
    effective_R,
    gradient_Re,
    perron_triple,
    re_stability_gap,
)

HALF = FeatureSpace([0.5, 0.5])
BIPARTITE = Kernel([[0.0, 2.0], [2.0, 0.0]], HALF)


def closed_form_2x2(k, mu, eta):
    """Largest root of the characteristic polynomial of a 2x2 operator matrix."""
    m = np.asarray(k) * (np.asarray(eta) * np.asarray(mu))[None, :]
    tr, det = np.trace(m), np.linalg.det(m)
    return (tr + np.sqrt(tr * tr - 4 * det)) / 2


def test_apply_T():
    const = Kernel(np.full((3, 3), 2.5), FeatureSpace([0.2, 0.3, 0.5]))
    assert np.allclose(apply_T(const, np.ones(3), np.ones(3)), 2.5)
    assert np.all(apply_T(const, np.zeros(3), np.ones(3)) == 0)
    assert np.allclose(apply_T(BIPARTITE, np.ones(2), [1.0, 0.0]), [0.0, 1.0])
    with pytest.raises(DimensionMismatch):
        apply_T(BIPARTITE, np.ones(2), np.ones(3))


def test_perron_triple_homogeneous():
    t = perron_triple(Kernel([[3.0]], FeatureSpace([1.0])), np.ones(1))
    assert abs(t.rho - 3.0) < 1e-12
    assert np.allclose(t.v_right, 1) and np.allclose(t.v_left, 1)


def test_perron_triple_bipartite_period_two():
    t = perron_triple(BIPARTITE, np.ones(2))
    assert abs(t.rho - 1.0) < 1e-12
    assert np.allclose(t.v_right, 1.0)


def test_perron_triple_zero_kernel():
    t = perron_triple(Kernel(np.zeros((2, 2)), HALF), np.ones(2))
    assert t.rho == 0.0 and t.residual == 0.0


def test_perron_normalisation(models):
    m = models["sbm2_asym"]
    t = perron_triple(next_gen_kernel(m), np.array([0.7, 0.4]))
    mu = m.weights
    assert abs((t.v_right ** 2) @ mu - 1) < 1e-12
    assert abs((t.v_left * t.v_right) @ mu - 1) < 1e-12
    assert np.all(t.v_right > 0) and np.all(t.v_left > 0)


def test_effective_R_basic_values(models):
    for m in models.values():
        assert effective_R(m, np.zeros(m.n)) == 0.0
    hom = build_homogeneous(2.0)
    for lam in (0.0, 0.3, 0.75, 1.0):
        assert abs(effective_R(hom, lam) - 2 * lam) < 1e-12


def test_multipartite_r0():
    r0 = basic_R(build_multipartite(12, 1.0))
    assert abs(r0 - 0.697) <= 0.007


@pytest.mark.parametrize("name", ["sbm2", "sbm2_asym"])
def test_effective_R_closed_form(models, name, rng):
    m = models[name]
    for eta in rng.uniform(size=(50, 2)):
        assert abs(effective_R(m, eta) - closed_form_2x2(m.ngk, m.weights, eta)) < 1e-10


def test_effective_R_against_eigvals(models, rng):
    for m in models.values():
        for eta in rng.uniform(size=(20, m.n)):
            assert abs(effective_R(m, eta) - radius(m.ngk, m.weights, eta)) < 1e-10


def test_effective_R_large_space_uses_matvec(rng):
    n = 600
    k = rng.uniform(size=(n, n))
    m = make_model(np.full(n, 1 / n), k)
    eta = rng.uniform(size=n)
    assert abs(effective_R(m, eta) - radius(k, m.weights, eta)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2),
    st.floats(0.0, 1.0),
)
def test_homogeneity_and_monotonicity(eta, lam):
    m = build_block_model([0.3, 0.7], [[4.0, 1.0], [0.5, 2.0]], [1.0, 2.0])
    eta = np.array(eta)
    assert abs(effective_R(m, lam * eta) - lam * effective_R(m, eta)) <= 1e-10
    assert effective_R(m, lam * eta) <= effective_R(m, eta) + 1e-12


def test_gradient_homogeneous():
    g = gradient_Re(build_homogeneous(2.0), np.full(1, 0.6))
    assert abs(g[0] - 2.0) < 1e-10


def fd(m, eta, h=1e-6):
    out = np.empty(m.n)
    for j in range(m.n):
        lo, hi = eta.copy(), eta.copy()
        lo[j] -= h
        hi[j] += h
        out[j] = (radius(m.ngk, m.weights, hi) - radius(m.ngk, m.weights, lo)) / (2 * h)
    return out


def test_gradient_sbm2_at_one(models):
    m = models["sbm2"]
    g = gradient_Re(m, np.ones(2))
    ref = fd(m, np.ones(2))
    assert np.all(np.abs(g - ref) <= 1e-4 * np.abs(ref))


def test_gradient_interior(models, rng):
    for name in ("sbm2_asym", "multipartite"):
        m = models[name]
        for eta in rng.uniform(0.05, 0.95, size=(10, m.n)):
            g, ref = gradient_Re(m, eta), fd(m, eta)
            assert np.max(np.abs(g - ref)) <= 1e-4 * np.max(np.abs(ref))


def test_gradient_degenerate():
    m = build_block_model([0.5, 0.5], [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(DegenerateEigenpair):
        gradient_Re(m, np.zeros(2))
    reducible = build_block_model([0.5, 0.5], [[2.0, 0.0], [0.0, 2.0]])
    with pytest.raises(DegenerateEigenpair):
        gradient_Re(reducible, np.ones(2))


def test_stability_gap():
    a = build_multipartite(6, 1.0)
    assert re_stability_gap(a, a, 20) == 0.0
    assert abs(re_stability_gap(build_homogeneous(2.0), build_homogeneous(2.5), 20) - 0.5) < 1e-12
    gaps = [re_stability_gap(a, build_perturbed_multipartite(6, 1.0, e), 50) for e in (0.1, 0.01, 0.001)]
    assert gaps[0] > gaps[1] > gaps[2]
    with pytest.raises(SpaceMismatch):
        re_stability_gap(a, build_homogeneous(1.0))
