"""Endemic equilibria of the vaccinated SIS dynamics.

The vector field is ``F(g)_i = (1 - g_i) sum_j k_ij eta_j g_j mu_j - gamma_i g_i``.
The maximal equilibrium is the limit of a non-increasing sequence started at
``g = 1``; its maximality is certified by ``R_e(eta (1 - g)) <= 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    MaximalityUncertified,
    MonotonicityViolation,
    NoConvergence,
    NotAnEquilibrium,
    OutOfRangeState,
    StepTooLarge,
)
from .model import SisModel, check_strategy
from .spectral import spectral_radius

CLAMP_LIMIT = 1e-10
CERTIFICATE_SLACK = 1e-8


@dataclass(frozen=True)
class EquilibriumOptions:
    tol_fix: float = 1e-12
    max_iter: int = 1_000_000
    newton: bool = True
    certify: bool = True


@dataclass(frozen=True)
class Equilibrium:
    g: np.ndarray
    infected_fraction: float
    residual: float
    iterations: int
    maximality_certificate: float


def _transmission(model, eta):
    # (1 - g) * (A @ g) is the infection term; A carries eta and the site masses.
    return model.k.entries * (eta * model.weights)[None, :]


def vector_field(model: SisModel, eta, g) -> np.ndarray:
    eta = check_strategy(eta, model.n)
    g = np.asarray(g, dtype=float)
    if g.shape != (model.n,):
        raise OutOfRangeState(f"state must have shape ({model.n},)")
    if np.any(g < 0) or np.any(g > 1):
        raise OutOfRangeState("state values must lie in [0, 1]")
    return (1 - g) * (_transmission(model, eta) @ g) - model.gamma * g


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    max_clamp: float

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def default_dt(model: SisModel) -> float:
    return 0.05 / np.max(model.gamma + model.k.entries @ model.weights)


def integrate_sis(model: SisModel, eta, u0, t_end: float, dt: float = None, samples: int = 101) -> Trajectory:
    """Fixed-step RK4 integration of ``du/dt = F_eta(u)``.

    ``eta`` and ``u0`` may be 2-D, one row per independent run; the returned
    states then have shape ``(samples, runs, n)``.  States are clamped to
    ``[0, 1]`` after each step; a clamp larger than ``1e-10`` means ``dt`` is
    too large and raises :class:`StepTooLarge`.
    """
    eta = np.asarray(eta, dtype=float)
    u = np.array(u0, dtype=float)
    batch = eta.ndim == 2
    if not batch:
        eta = check_strategy(eta, model.n)
    elif eta.shape[1] != model.n or np.any(eta < 0) or np.any(eta > 1):
        raise OutOfRangeState("batched strategies must have shape (runs, n) with values in [0, 1]")
    u = np.broadcast_to(u, eta.shape).copy()
    if np.any(u < 0) or np.any(u > 1):
        raise OutOfRangeState("initial state must lie in [0, 1]")
    if dt is None:
        dt = default_dt(model)
    if dt <= 0:
        raise ValueError("dt must be positive")

    kt = model.k.entries.T
    emu = eta * model.weights
    gamma = model.gamma

    def f(x):
        return (1 - x) * ((x * emu) @ kt) - gamma * x

    steps = int(np.ceil(t_end / dt))
    h = t_end / steps if steps else 0.0
    keep = np.unique(np.linspace(0, steps, max(samples, 2)).round().astype(int))
    times, states = [0.0], [u.copy()]
    worst = 0.0
    for s in range(1, steps + 1):
        k1 = f(u)
        k2 = f(u + 0.5 * h * k1)
        k3 = f(u + 0.5 * h * k2)
        k4 = f(u + h * k3)
        u = u + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        clipped = np.clip(u, 0.0, 1.0)
        worst = max(worst, float(np.abs(clipped - u).max()))
        u = clipped
        if worst > CLAMP_LIMIT:
            raise StepTooLarge(f"state left [0, 1] by {worst:.3e} at t={s * h:g}; reduce dt", partial=u)
        if s in keep:
            times.append(s * h)
            states.append(u.copy())
    return Trajectory(np.array(times), np.array(states), worst)


def maximal_equilibrium(model: SisModel, eta, opts: EquilibriumOptions = EquilibriumOptions()) -> Equilibrium:
    """Maximal equilibrium by a monotone scheme started from ``g = 1``.

    Each step takes ``Phi(g)_i = T_i / (gamma_i + T_i)`` with ``T = A g``.
    When ``opts.newton`` is set, the Newton iterate of ``F`` from ``g`` is also
    computed and the entry-wise minimum of both is kept, provided the Newton
    iterate is itself a super-solution (``Phi(x) <= x``) below ``g``.  Minima of
    super-solutions are super-solutions, so the sequence stays above the
    maximal equilibrium while converging quadratically away from criticality.
    """
    eta = check_strategy(eta, model.n)
    a = _transmission(model, eta)
    gamma = model.gamma
    scale = max(1.0, float(np.max(gamma + a.sum(axis=1))))
    g = np.ones(model.n)
    change = np.inf
    it = 0
    while it < opts.max_iter:
        it += 1
        t = a @ g
        new = t / (gamma + t)
        if opts.newton:
            fg = (1 - g) * t - gamma * g
            jac = (1 - g)[:, None] * a - np.diag(t + gamma)
            try:
                cand = g - np.linalg.solve(jac, fg)
            except np.linalg.LinAlgError:
                cand = None
            if cand is not None and np.all(np.isfinite(cand)):
                cand = np.maximum(cand, 0.0)
                tc = a @ cand
                if np.all(cand <= g + 1e-15) and np.all(tc / (gamma + tc) <= cand + 1e-15):
                    new = np.minimum(new, cand)
        if np.any(new > g + 1e-14):
            raise MonotonicityViolation(
                f"iterate increased by {np.max(new - g):.3e} at step {it}", partial=g
            )
        new = np.minimum(new, g)
        change = float(np.max(g - new))
        g = new
        if change < opts.tol_fix:
            break
    residual = float(np.max(np.abs((1 - g) * (a @ g) - gamma * g)))
    if change >= opts.tol_fix or residual > opts.tol_fix * scale:
        raise NoConvergence(
            f"equilibrium iteration stopped after {it} steps (change {change:.3e}, residual {residual:.3e})",
            partial=g,
        )
    cert = np.nan
    if opts.certify:
        cert = spectral_radius(model.ngk, model.weights, eta * (1 - g))
        if cert > 1 + CERTIFICATE_SLACK:
            raise MaximalityUncertified(f"R_e(1 - g) = {cert!r} > 1", partial=g)
    return Equilibrium(g, float((g * eta) @ model.weights), residual, it, float(cert))


def infected_fraction(model: SisModel, eta, opts: EquilibriumOptions = EquilibriumOptions()) -> float:
    return maximal_equilibrium(model, eta, opts).infected_fraction


def equilibrium_strategy(model: SisModel) -> np.ndarray:
    """Vaccinate exactly the equilibrium infected proportion of each feature."""
    return 1.0 - maximal_equilibrium(model, np.ones(model.n)).g


class Stability(Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class StabilityReport:
    verdict: Stability
    certificate: float


def linear_stability(model: SisModel, eta, h, tol: float = 1e-8) -> StabilityReport:
    """Linear stability of the equilibrium ``h`` via ``R_e(eta (1 - h)**2) <= 1``."""
    eta = check_strategy(eta, model.n)
    h = np.asarray(h, dtype=float)
    res = np.max(np.abs(vector_field(model, eta, h)))
    if res > tol:
        raise NotAnEquilibrium(f"|F(h)| = {res:.3e} exceeds {tol:g}")
    cert = spectral_radius(model.ngk, model.weights, eta * (1 - h) ** 2)
    verdict = Stability.STABLE if cert <= 1 + tol else Stability.UNSTABLE
    return StabilityReport(verdict, float(cert))


def gradient_I(model: SisModel, eta, eq: Equilibrium = None) -> np.ndarray:
    """Gradient of ``I(eta)`` by implicit differentiation of ``F_eta(g) = 0``.

    With ``J = dF/dg`` at the maximal equilibrium and ``J^T lam = eta mu``::

        dI/deta_j = g_j mu_j - mu_j g_j sum_i lam_i (1 - g_i) k_ij

    Raises :class:`NumericalError` when ``J`` is singular (critical strategies).
    """
    from .errors import NumericalError

    eta = check_strategy(eta, model.n)
    if eq is None:
        eq = maximal_equilibrium(model, eta, EquilibriumOptions(certify=False))
    g, mu, k = eq.g, model.weights, model.k.entries
    a = _transmission(model, eta)
    jac = (1 - g)[:, None] * a - np.diag(a @ g + model.gamma)
    try:
        lam = np.linalg.solve(jac.T, eta * mu)
    except np.linalg.LinAlgError:
        raise NumericalError("singular Jacobian at the equilibrium", partial=g) from None
    if np.linalg.cond(jac) > 1e12:
        raise NumericalError("ill-conditioned Jacobian at the equilibrium", partial=g)
    return mu * g * (1.0 - (lam * (1 - g)) @ k)
