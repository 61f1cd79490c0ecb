"""Spectral radius and Perron vectors of the vaccinated next-generation operator.

On a discretized space the operator ``T_{k eta}`` acts on per-site vectors as
``(T v)_i = sum_j k_ij eta_j v_j mu_j``, i.e. it is the matrix
``M = k * (eta * mu)[None, :]``.  Its adjoint for the inner product
``<u, v>_mu = sum_i u_i v_i mu_i`` is ``(T* u)_j = eta_j sum_i k_ij u_i mu_i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEigenpair, DimensionMismatch, NoConvergence, SpaceMismatch
from .model import Kernel, SisModel, check_strategy, support_components

# Above this size a sweep is a single matrix-vector product instead of a squaring.
SQUARING_MAX_SITES = 512
SHIFT_FRACTION = 1e-2
# at unit scale a quotient this small is zero for practical purposes (nilpotent operators)
QUOTIENT_FLOOR = 1e-3


@dataclass(frozen=True)
class PowerOptions:
    tol_rel: float = 1e-12
    tol_residual: float = 1e-10
    max_iter: int = 100_000


@dataclass(frozen=True)
class PerronTriple:
    """Spectral radius with right and left Perron vectors.

    ``v_right`` is normalized by ``sum v_right**2 mu = 1`` and ``v_left`` by
    ``<v_left, v_right>_mu = 1`` whenever that product is positive.
    ``residual`` is the larger of the two relative sup-norm residuals.
    """

    rho: float
    v_right: np.ndarray
    v_left: np.ndarray
    iterations: int
    residual: float


def operator_matrix(entries, weights, eta) -> np.ndarray:
    return entries * (eta * weights)[None, :]


def adjoint_matrix(entries, weights, eta) -> np.ndarray:
    return (entries * weights[:, None]).T * eta[:, None]


def apply_T(kernel: Kernel, eta, v) -> np.ndarray:
    eta = check_strategy(eta, kernel.n)
    v = np.asarray(v, dtype=float)
    if v.shape != (kernel.n,):
        raise DimensionMismatch(f"vector must have shape ({kernel.n},), got {v.shape}")
    return kernel.entries @ (eta * v * kernel.weights)


def _power(m, weights, opts):
    """Shifted power iteration on the non-negative matrix ``m``.

    Returns ``(rho, v, sweeps, residual, converged)``.  For small matrices each
    sweep squares the iteration matrix, so that sweep ``s`` yields the plain
    power iterate of index ``2**s - 1``: the same sequence, sampled sparsely.
    """
    n = m.shape[0]
    v = np.ones(n)
    row_max = m.sum(axis=1).max()
    if row_max <= 0:
        return 0.0, v, 0, 0.0, True
    # work at unit scale so squaring neither underflows nor overflows
    m = m / row_max
    p = m + SHIFT_FRACTION * np.eye(n)
    squaring = n <= SQUARING_MAX_SITES
    max_sweeps = min(opts.max_iter, 200) if squaring else opts.max_iter
    q_prev = np.nan
    q, resid = 0.0, np.inf
    for sweep in range(1, max_sweeps + 1):
        v = p @ v
        v /= v.max()
        mv = m @ v
        q = (v * weights) @ mv / ((v * weights) @ v)
        resid = np.abs(mv - q * v).max() * row_max
        rho = q * row_max
        if abs(q - q_prev) <= opts.tol_rel * max(abs(q), QUOTIENT_FLOOR) and resid <= opts.tol_residual * max(rho, 1.0):
            return max(rho, 0.0), v, sweep, resid, True
        q_prev = q
        if squaring:
            p = p @ p
            p /= p.max()
    return max(q * row_max, 0.0), v, max_sweeps, resid, False


def perron_triple(kernel: Kernel, eta, opts: PowerOptions = PowerOptions()) -> PerronTriple:
    eta = check_strategy(eta, kernel.n)
    return _perron(kernel.entries, kernel.weights, eta, opts)


def _perron(entries, weights, eta, opts=PowerOptions()) -> PerronTriple:
    m = operator_matrix(entries, weights, eta)
    rho, vd, it_d, res_d, ok_d = _power(m, weights, opts)
    _, vg, it_g, res_g, ok_g = _power(adjoint_matrix(entries, weights, eta), weights, opts)
    vd = vd / np.sqrt((vd * vd) @ weights)
    pairing = (vg * vd) @ weights
    if rho > 0 and pairing > 0:
        vg = vg / pairing
    else:
        vg = vg / np.sqrt((vg * vg) @ weights)
    triple = PerronTriple(float(rho), vd, vg, max(it_d, it_g), float(max(res_d, res_g)))
    if not (ok_d and ok_g):
        raise NoConvergence(
            f"power iteration stalled after {triple.iterations} sweeps "
            f"(residual {triple.residual:.3e})",
            partial=triple,
        )
    return triple


def spectral_radius(entries, weights, eta, opts=PowerOptions()) -> float:
    return _power(operator_matrix(entries, weights, eta), weights, opts)[0]


def effective_R(model: SisModel, eta, opts: PowerOptions = PowerOptions()) -> float:
    """Effective reproduction number ``R_e(eta)``; ``eta = 1`` gives ``R_0``."""
    eta = check_strategy(eta, model.n)
    rho, _, sweeps, resid, ok = _power(operator_matrix(model.ngk, model.weights, eta), model.weights, opts)
    if not ok:
        raise NoConvergence(f"power iteration stalled (residual {resid:.3e})", partial=rho)
    return float(rho)


def basic_R(model: SisModel, opts: PowerOptions = PowerOptions()) -> float:
    return effective_R(model, np.ones(model.n), opts)


def _simple_root(m, rho, weights, rel=1e-9):
    """True when exactly one strongly connected block of ``m`` attains ``rho``."""
    labels = support_components(m)
    hits = 0
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        block = m[np.ix_(idx, idx)]
        r = _power(block, weights[idx], PowerOptions())[0] if idx.size > 1 else block[0, 0]
        if r >= rho * (1 - rel):
            hits += 1
    return hits == 1


def gradient_Re(model: SisModel, eta, opts: PowerOptions = PowerOptions()) -> np.ndarray:
    """Gradient of ``R_e`` from the Perron pair of ``T_{k eta}``.

    ``d R_e / d eta_j = (sum_i v_left_i k_ij mu_i) v_right_j mu_j``.

    Raises
    ------
    DegenerateEigenpair
        If ``R_e(eta) = 0``, the Perron root is not simple, or either
        eigenvector failed its residual check.  Fall back to finite
        differences in that case.
    """
    eta = check_strategy(eta, model.n)
    k, mu = model.ngk, model.weights
    try:
        t = _perron(k, mu, eta, opts)
    except NoConvergence as exc:
        raise DegenerateEigenpair(str(exc), partial=exc.partial) from None
    if t.rho <= 0:
        raise DegenerateEigenpair("R_e vanishes; no Perron direction", partial=t)
    if t.residual > opts.tol_residual * max(t.rho, 1.0):
        raise DegenerateEigenpair(f"eigenvector residual {t.residual:.3e} too large", partial=t)
    if not _simple_root(operator_matrix(k, mu, eta), t.rho, mu):
        raise DegenerateEigenpair("Perron root is not simple (reducible operator)", partial=t)
    return ((t.v_left * mu) @ k) * t.v_right * mu


def re_stability_gap(model_a: SisModel, model_b: SisModel, sample_count: int = 200, seed=0) -> float:
    """Largest sampled ``|R_e[a](eta) - R_e[b](eta)|``.

    The strategies are ``0``, ``1/2``, ``1`` and ``sample_count`` uniform
    random ones.  This is a lower bound on the supremum over all strategies.
    """
    if model_a.n != model_b.n or not np.allclose(model_a.weights, model_b.weights, rtol=0, atol=1e-15):
        raise SpaceMismatch("models live on different feature spaces")
    n = model_a.n
    rng = np.random.default_rng(seed)
    etas = [np.zeros(n), np.full(n, 0.5), np.ones(n)]
    etas += list(rng.uniform(size=(sample_count, n)))
    return max(abs(effective_R(model_a, e) - effective_R(model_b, e)) for e in etas)
