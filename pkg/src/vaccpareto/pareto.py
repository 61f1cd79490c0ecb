"""Bi-objective (cost, loss) vaccination problems.

The Pareto frontier is traced by the epsilon-constraint sweep: for each budget
``c`` minimize the loss over strategies of cost at most ``c``.  The
anti-Pareto frontier maximizes the loss over strategies of cost at least
``c``.  Both subproblems are solved by projected gradient with multi-start.

Losses are ``"re"`` (effective reproduction number) and ``"i"`` (equilibrium
infected fraction).
"""
from __future__ import annotations

import csv
import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np

from .equilibrium import EquilibriumOptions, gradient_I, maximal_equilibrium
from .errors import (
    BudgetOutOfRange,
    DegenerateLoss,
    LossOutOfRange,
    NumericalError,
    ReducibleKernelWarning,
    TooManySites,
)
from .model import Irreducibility, SisModel, check_strategy, irreducibility_class, next_gen_kernel
from .spectral import gradient_Re, spectral_radius

LOSSES = ("re", "i")
PARETO = "pareto"
ANTI = "anti"

CONVERGED = "converged"
MULTI_START_BEST = "multi-start-best"
ORACLE = "oracle"
FLAGGED = "flagged"
# losses at or below this count as zero (no endemic state, no spread)
LOSS_ZERO = 1e-10

_FAST_EQ = EquilibriumOptions(certify=False)


# -- cost ---------------------------------------------------------------------

@dataclass(frozen=True)
class CostFunction:
    """Affine vaccination cost ``sum_i (1 - eta_i) density_i mu_i``.

    The uniform cost has ``density = 1`` and measures the vaccinated proportion.
    """

    kind: str
    density: np.ndarray
    weights: np.ndarray

    @classmethod
    def uniform(cls, model: SisModel) -> "CostFunction":
        return cls("uniform", np.ones(model.n), model.weights)

    @classmethod
    def affine(cls, model: SisModel, density) -> "CostFunction":
        density = np.asarray(density, dtype=float)
        if density.shape != (model.n,) or np.any(density <= 0) or not np.all(np.isfinite(density)):
            raise ValueError("cost density must be finite and > 0 on every site")
        return cls("affine", density, model.weights)

    @property
    def unit(self) -> np.ndarray:
        """Cost of vaccinating all of site ``i``."""
        return self.density * self.weights

    @property
    def c_max(self) -> float:
        return float(self.unit.sum())


def cost(costfn: CostFunction, eta) -> float:
    eta = check_strategy(eta, costfn.unit.size)
    return float((1.0 - eta) @ costfn.unit)


# -- loss ---------------------------------------------------------------------

def loss_value(model: SisModel, loss_kind: str, eta, certify: bool = False) -> float:
    if loss_kind == "re":
        return float(spectral_radius(model.ngk, model.weights, eta))
    if loss_kind == "i":
        opts = EquilibriumOptions() if certify else _FAST_EQ
        return maximal_equilibrium(model, eta, opts).infected_fraction
    raise ValueError(f"unknown loss {loss_kind!r}; expected one of {LOSSES}")


def _fd_gradient(f, eta, h):
    grad = np.empty_like(eta)
    for j in range(eta.size):
        lo, hi = max(eta[j] - h, 0.0), min(eta[j] + h, 1.0)
        e_lo, e_hi = eta.copy(), eta.copy()
        e_lo[j], e_hi[j] = lo, hi
        grad[j] = (f(e_hi) - f(e_lo)) / (hi - lo)
    return grad


def loss_gradient(model: SisModel, loss_kind: str, eta, i_gradient: str = "adjoint", h: float = None) -> np.ndarray:
    """Gradient of the loss; finite differences where the analytic one fails.

    ``i_gradient="fd"`` forces central differences with step ``1e-5`` for the
    infected fraction.
    """
    if loss_kind == "re":
        try:
            return gradient_Re(model, eta)
        except NumericalError:
            return _fd_gradient(lambda e: loss_value(model, "re", e), eta, h or 1e-6)
    if loss_kind == "i":
        if i_gradient == "adjoint":
            try:
                return gradient_I(model, eta)
            except NumericalError:
                pass
        return _fd_gradient(lambda e: loss_value(model, "i", e), eta, h or 1e-5)
    raise ValueError(f"unknown loss {loss_kind!r}")


# -- frontier types -----------------------------------------------------------

@dataclass(frozen=True)
class FrontierPoint:
    cost: float
    loss: float
    strategy: np.ndarray
    solver_status: str


@dataclass
class Frontier:
    points: List[FrontierPoint]
    loss_kind: str
    orientation: str
    certified: bool = True
    notes: List[str] = field(default_factory=list)

    @property
    def costs(self) -> np.ndarray:
        return np.array([p.cost for p in self.points])

    @property
    def losses(self) -> np.ndarray:
        return np.array([p.loss for p in self.points])

    @property
    def strategies(self) -> np.ndarray:
        return np.array([p.strategy for p in self.points])


@dataclass(frozen=True)
class OptimizerOptions:
    """Settings of the projected-gradient multi-start solver."""

    n_random: int = 8
    max_iter: int = 5000
    pg_tol: float = 1e-9
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 40
    i_gradient: str = "adjoint"
    tol_c: float = 1e-6
    tol_loss: float = 1e-9
    seed: int = 0
    workers: int = 1


def point_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, index])


# -- projection and local solver ------------------------------------------------

def _project(y, unit, mu, bound, side):
    """Project ``y`` onto ``[0, 1]^n`` intersected with a half-space.

    The half-space is ``unit . eta >= bound`` (``side=+1``) or
    ``unit . eta <= bound`` (``side=-1``).  The projection is taken in the
    ``mu``-weighted norm, so ``eta = clip(y + lam * unit / mu)`` and the single
    multiplier ``lam`` is found by bisection.
    """
    x = np.clip(y, 0.0, 1.0)
    s = unit @ x
    if side * (s - bound) >= 0:
        return x
    step = unit / mu
    # the constrained sum is monotone in lam; bracket the root then bisect
    lo, hi = 0.0, side * 1.0
    while side * (unit @ np.clip(y + hi * step, 0.0, 1.0) - bound) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if side * (unit @ np.clip(y + mid * step, 0.0, 1.0) - bound) < 0:
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) <= 1e-16 * max(1.0, abs(hi)):
            break
    return np.clip(y + hi * step, 0.0, 1.0)


@dataclass
class _Problem:
    model: SisModel
    loss_kind: str
    costfn: CostFunction
    budget: float
    orientation: str
    opts: OptimizerOptions

    def __post_init__(self):
        self.sign = 1.0 if self.orientation == PARETO else -1.0
        self.unit = self.costfn.unit
        # cost <= c  <=>  unit.eta >= c_max - c ; cost >= c  <=>  unit.eta <= c_max - c
        self.bound = self.costfn.c_max - self.budget
        self.side = 1 if self.orientation == PARETO else -1

    def f(self, eta):
        return self.sign * loss_value(self.model, self.loss_kind, eta)

    def grad(self, eta):
        return self.sign * loss_gradient(self.model, self.loss_kind, eta, self.opts.i_gradient)

    def project(self, y):
        return _project(y, self.unit, self.model.weights, self.bound, self.side)

    def solve(self, start):
        """Projected gradient with Armijo backtracking; returns (eta, value, converged)."""
        o = self.opts
        mu = self.model.weights
        x = self.project(start)
        fx = self.f(x)
        t = 1.0
        flat = 0
        x_old = d_old = None
        for _ in range(o.max_iter):
            g = self.grad(x)
            d = g / mu
            if np.max(np.abs(x - self.project(x - d))) < o.pg_tol:
                return x, fx, True
            if x_old is not None:
                # Barzilai-Borwein step in the mu-weighted metric
                s, y = x - x_old, d - d_old
                sy = (s * y) @ mu
                t = float(np.clip((s * s) @ mu / sy, 1e-10, 1e6)) if sy > 0 else 1e6
            x_old, d_old = x, d
            for _ in range(o.max_backtracks):
                xn = self.project(x - t * d)
                fn = self.f(xn)
                if fn <= fx - o.armijo * (g @ (x - xn)):
                    break
                t *= o.shrink
            else:
                return x, fx, False
            if np.max(np.abs(xn - x)) < 1e-15:
                return x, fx, True
            # near a smooth extremum the objective flattens below rounding
            # long before the projected gradient reaches pg_tol
            flat = flat + 1 if abs(fx - fn) <= 1e-15 * max(1.0, abs(fx)) else 0
            x, fx = xn, fn
            if flat >= 20:
                return x, fx, True
        return x, fx, False


def _starts(prob: _Problem, rng, n_random, extra=()):
    n = prob.model.n
    unit, c, c_max = prob.unit, prob.budget, prob.costfn.c_max
    starts = [np.full(n, 1.0 - c / c_max)]
    # greedy fill: vaccinate sites by gradient per unit cost, best first
    try:
        g = loss_gradient(prob.model, prob.loss_kind, np.ones(n), prob.opts.i_gradient)
    except NumericalError:
        g = np.ones(n)
    order = np.argsort(-g / unit if prob.orientation == PARETO else g / unit, kind="stable")
    eta = np.ones(n)
    left = c
    for j in order:
        take = min(unit[j], left)
        eta[j] = 1.0 - take / unit[j]
        left -= take
        if left <= 0:
            break
    starts.append(eta)
    starts.extend(np.asarray(e, dtype=float) for e in extra)
    starts.extend(rng.uniform(size=(n_random, n)))
    return starts


def _optimize(model, loss_kind, costfn, c, orientation, opts, rng=None, extra=(), n_random=None):
    c_max = costfn.c_max
    if not -1e-12 <= c <= c_max + 1e-12:
        raise BudgetOutOfRange(f"budget {c} outside [0, {c_max}]")
    c = min(max(c, 0.0), c_max)
    n = model.n
    fixed = None
    if orientation == PARETO and c == 0:
        fixed = np.ones(n)
    elif orientation == ANTI and c == c_max:
        fixed = np.zeros(n)
    if fixed is not None:
        return FrontierPoint(cost(costfn, fixed), loss_value(model, loss_kind, fixed, certify=True), fixed, CONVERGED)
    if rng is None:
        rng = np.random.default_rng(opts.seed)
    prob = _Problem(model, loss_kind, costfn, c, orientation, opts)
    best = None
    for s in _starts(prob, rng, opts.n_random if n_random is None else n_random, extra):
        x, fx, ok = prob.solve(s)
        if best is None or fx < best[1] - 1e-15:
            best = (x, fx, ok)
    x, _, ok = best
    return FrontierPoint(
        cost(costfn, x),
        loss_value(model, loss_kind, x, certify=True),
        x,
        CONVERGED if ok else MULTI_START_BEST,
    )


def minimize_loss_at_cost(model, loss_kind, costfn, c, opts: OptimizerOptions = OptimizerOptions(), rng=None, extra=()):
    """Smallest loss over strategies of cost at most ``c``."""
    return _optimize(model, loss_kind, costfn, c, PARETO, opts, rng, extra)


def maximize_loss_at_cost(model, loss_kind, costfn, c, opts: OptimizerOptions = OptimizerOptions(), rng=None, extra=()):
    """Largest loss over strategies of cost at least ``c``."""
    return _optimize(model, loss_kind, costfn, c, ANTI, opts, rng, extra)


def min_cost_at_loss(model, loss_kind, costfn, ell, opts: OptimizerOptions = OptimizerOptions()) -> FrontierPoint:
    """Smallest cost reaching loss at most ``ell``, by bisection on the budget.

    Relies on the optimal loss being non-increasing in the budget.  The
    returned strategy has loss at most ``ell + opts.tol_loss`` and cost within
    ``opts.tol_c`` of the optimum.
    """
    n = model.n
    ell_max = loss_value(model, loss_kind, np.ones(n), certify=True)
    if not -1e-12 <= ell <= ell_max + 1e-12:
        raise LossOutOfRange(f"target loss {ell} outside [0, {ell_max}]")
    if ell >= ell_max:
        return FrontierPoint(0.0, ell_max, np.ones(n), CONVERGED)
    c_max = costfn.c_max
    rng = np.random.default_rng(opts.seed)
    lo, hi = 0.0, c_max
    best = FrontierPoint(c_max, loss_value(model, loss_kind, np.zeros(n), certify=True), np.zeros(n), CONVERGED)
    # uniform scaling gives a cheap feasible upper bracket
    if ell_max > 0 and ell > 0:
        eta = np.full(n, ell / ell_max)
        val = loss_value(model, loss_kind, eta)
        if val <= ell + opts.tol_loss:
            hi = cost(costfn, eta)
            best = FrontierPoint(hi, val, eta, CONVERGED)
    while hi - lo > opts.tol_c:
        mid = 0.5 * (lo + hi)
        scaled = 1.0 - (1.0 - best.strategy) * min(1.0, mid / max(best.cost, 1e-300))
        p = minimize_loss_at_cost(model, loss_kind, costfn, mid, opts, rng, extra=[scaled])
        if p.loss <= ell + opts.tol_loss:
            hi, best = mid, p
        else:
            lo = mid
    return best


# -- frontiers ------------------------------------------------------------------

def _solve_grid_point(args):
    model, loss_kind, costfn, c, orientation, opts, index, n_random, extra = args
    rng = np.random.default_rng(point_seed(opts.seed, index))
    return _optimize(model, loss_kind, costfn, c, orientation, opts, rng, extra, n_random)


def worker_count(opts: OptimizerOptions) -> int:
    w = opts.workers
    if w == 0:
        w = os.cpu_count() or 1
    return max(1, w)


def _solve_grid(model, loss_kind, costfn, grid, orientation, opts):
    tasks = [(model, loss_kind, costfn, float(c), orientation, opts, i, None, ()) for i, c in enumerate(grid)]
    workers = worker_count(opts)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_solve_grid_point, tasks))
    else:
        points = [_solve_grid_point(t) for t in tasks]
    # Both optimal losses are non-increasing in c.  A rise between i-1 and i
    # means point i was under-minimized (Pareto) or point i-1 under-maximized
    # (anti).  Re-solve the culprit once with doubled random starts and its
    # neighbours' strategies as extra starts, then flag what is still off.
    for i in range(1, len(points)):
        if points[i].loss - points[i - 1].loss <= 1e-6:
            continue
        j = i if orientation == PARETO else i - 1
        neighbours = [points[m].strategy for m in (j - 1, j + 1) if 0 <= m < len(points)]
        p = _solve_grid_point(tasks[j][:7] + (2 * opts.n_random, neighbours))
        better = p.loss < points[j].loss if orientation == PARETO else p.loss > points[j].loss
        if better:
            points[j] = p
        if points[i].loss - points[i - 1].loss > 1e-6:
            points[j] = replace(points[j], solver_status=FLAGGED)
    return points


def loss_max(model, loss_kind) -> float:
    return loss_value(model, loss_kind, np.ones(model.n), certify=True)


def pareto_frontier(model, loss_kind, costfn, grid_size=21, opts: OptimizerOptions = OptimizerOptions(), c_end=None) -> Frontier:
    """Pareto frontier as the graph of the optimal loss on ``[0, C*(0)]``.

    ``C*(0)`` is the cheapest cost bringing the loss to zero; for the infected
    fraction it is the eradication cost.  Pass ``c_end`` to sweep a different
    range.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if loss_max(model, loss_kind) <= LOSS_ZERO:
        raise DegenerateLoss(f"loss {loss_kind!r} vanishes identically on this model")
    if c_end is None:
        c_end = min_cost_at_loss(model, loss_kind, costfn, 0.0, opts).cost
    grid = np.linspace(0.0, c_end, grid_size)
    points = _solve_grid(model, loss_kind, costfn, grid, PARETO, opts)
    front = Frontier(points, loss_kind, PARETO)
    if any(p.solver_status == FLAGGED for p in points):
        front.notes.append("non-monotone points remain after re-solve")
    return front


def anti_pareto_frontier(model, loss_kind, costfn, grid_size=21, opts: OptimizerOptions = OptimizerOptions()) -> Frontier:
    """Anti-Pareto frontier as the graph of the worst loss on ``[C^sup(l_max), c_max]``."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if loss_max(model, loss_kind) <= LOSS_ZERO:
        raise DegenerateLoss(f"loss {loss_kind!r} vanishes identically on this model")
    cls = irreducibility_class(next_gen_kernel(model))
    certified = cls.tag is not Irreducibility.REDUCIBLE
    c_start = 0.0
    if cls.zero_set and certified:
        c_start = float(costfn.unit[list(cls.zero_set)].sum())
    grid = np.linspace(c_start, costfn.c_max, grid_size)
    points = _solve_grid(model, loss_kind, costfn, grid, ANTI, opts)
    front = Frontier(points, loss_kind, ANTI, certified=certified)
    if not certified:
        msg = "kernel is reducible: the anti-Pareto frontier is computed but not certified"
        front.notes.append(msg)
        warnings.warn(msg, ReducibleKernelWarning, stacklevel=2)
    if any(p.solver_status == FLAGGED for p in points):
        front.notes.append("non-monotone points remain after re-solve")
    return front


# -- brute force oracle -----------------------------------------------------------

@dataclass
class OracleResult:
    """Lattice enumeration of the feasible region with its two staircases."""

    costs: np.ndarray
    losses: np.ndarray
    strategies: np.ndarray
    pareto: Frontier
    anti: Frontier

    def __post_init__(self):
        order = np.argsort(self.costs, kind="stable")
        self._c_sorted = self.costs[order]
        self._low = np.minimum.accumulate(self.losses[order])
        self._high = np.maximum.accumulate(self.losses[order][::-1])[::-1]

    def lower(self, c, slack=1e-12):
        """Smallest enumerated loss with cost at most ``c``."""
        idx = np.searchsorted(self._c_sorted, np.asarray(c) + slack, side="right") - 1
        return self._low[np.clip(idx, 0, None)]

    def upper(self, c, slack=1e-12):
        """Largest enumerated loss with cost at least ``c``."""
        idx = np.searchsorted(self._c_sorted, np.asarray(c) - slack, side="left")
        return self._high[np.clip(idx, None, self._c_sorted.size - 1)]


def _oracle_re(k, mu, etas):
    mats = k[None, :, :] * (etas * mu)[:, None, :]
    return np.abs(np.linalg.eigvals(mats)).max(axis=1)


def _oracle_i(k, mu, gamma, etas, tol=1e-12, max_iter=200_000):
    """Plain fixed-point iteration from ``g = 1``, batched over strategies."""
    a = k[None, :, :] * (etas * mu)[:, None, :]
    g = np.ones(etas.shape)
    active = np.arange(etas.shape[0])
    for _ in range(max_iter):
        t = np.einsum("bij,bj->bi", a[active], g[active])
        new = t / (gamma + t)
        change = np.abs(new - g[active]).max(axis=1)
        g[active] = new
        active = active[change >= tol]
        if active.size == 0:
            break
    return (g * etas) @ mu


def grid_oracle(model, loss_kind, costfn, resolution=100) -> OracleResult:
    """Enumerate ``{0, 1/m, ..., 1}^n`` and extract both staircase envelopes.

    Independent of the optimizer: ``R_e`` comes from dense eigenvalues and
    ``I`` from plain fixed-point iteration.
    """
    n = model.n
    if n > 3:
        raise TooManySites(f"lattice enumeration is limited to 3 sites, got {n}")
    axis = np.linspace(0.0, 1.0, resolution + 1)
    etas = np.array(np.meshgrid(*([axis] * n), indexing="ij")).reshape(n, -1).T
    costs = (1.0 - etas) @ costfn.unit
    if loss_kind == "re":
        losses = _oracle_re(model.ngk, model.weights, etas)
    elif loss_kind == "i":
        losses = _oracle_i(model.k.entries, model.weights, model.gamma, etas)
    else:
        raise ValueError(f"unknown loss {loss_kind!r}")
    order = np.lexsort((losses, costs))
    lo_pts, hi_pts = [], []
    best = np.inf
    for i in order:
        if losses[i] < best - 1e-15:
            best = losses[i]
            lo_pts.append(FrontierPoint(float(costs[i]), float(losses[i]), etas[i], ORACLE))
    best = -np.inf
    for i in np.lexsort((-losses, -costs)):
        if losses[i] > best + 1e-15:
            best = losses[i]
            hi_pts.append(FrontierPoint(float(costs[i]), float(losses[i]), etas[i], ORACLE))
    hi_pts.reverse()
    return OracleResult(
        costs, losses, etas, Frontier(lo_pts, loss_kind, PARETO), Frontier(hi_pts, loss_kind, ANTI)
    )


# -- feasible region ------------------------------------------------------------

@dataclass
class FeasibleSample:
    costs: np.ndarray
    losses: np.ndarray
    strategies: np.ndarray


def feasible_region_sample(model, loss_kind, costfn, samples=1000, seed=0) -> FeasibleSample:
    """(cost, loss) of random strategies and of the scaled families.

    Half of the budget goes to uniform random strategies; the rest to
    ``lam * eta`` and ``(1 - lam) + lam * eta`` for random ``eta`` and ``lam``,
    plus the uniform strategies ``eta = lam``.
    """
    rng = np.random.default_rng(seed)
    n = model.n
    n_rand = samples // 2
    n_fam = (samples - n_rand) // 3
    n_uni = samples - n_rand - 2 * n_fam
    base = rng.uniform(size=(n_fam, n))
    lam = rng.uniform(size=(n_fam, 1))
    etas = np.vstack(
        [
            rng.uniform(size=(n_rand, n)),
            lam * base,
            (1 - lam) + lam * base,
            np.repeat(np.linspace(0, 1, n_uni)[:, None], n, axis=1),
        ]
    )
    costs = (1.0 - etas) @ costfn.unit
    losses = np.array([loss_value(model, loss_kind, e) for e in etas])
    return FeasibleSample(costs, losses, etas)


def envelope_violation(sample: FeasibleSample, pareto: Frontier, anti: Frontier, c_max: float) -> float:
    """Largest amount by which sampled points leave the computed envelopes.

    The optimal loss is non-increasing in the budget, so a point of cost ``c``
    between grid costs ``c_a <= c <= c_b`` must satisfy
    ``L*(c_b) <= loss <= L^sup(c_a)``.  Past the last Pareto grid cost the
    optimal loss is the last grid loss (zero at ``C*(0)``).
    """
    pc, pl = pareto.costs, pareto.losses
    ac, al = anti.costs, anti.losses
    worst = 0.0
    for c, ell in zip(sample.costs, sample.losses):
        j = np.searchsorted(pc, c - 1e-12, side="left")
        lower = pl[min(j, pl.size - 1)]
        i = np.searchsorted(ac, c + 1e-12, side="right") - 1
        upper = al[i] if i >= 0 else np.inf
        worst = max(worst, lower - ell, ell - upper)
    return float(worst)


# -- eradication -----------------------------------------------------------------

@dataclass(frozen=True)
class EradicationReport:
    value: float
    value_via_i: float
    bound: float
    strategy: np.ndarray
    consistent: bool
    within_bound: bool


def eradication_cost(model, costfn, opts: OptimizerOptions = OptimizerOptions()) -> EradicationReport:
    """Cheapest cost bringing ``R_e`` to 1, cross-checked against ``I = 0``.

    The bound is the cheaper of the two critical strategies ``eta = 1/R_0``
    and ``eta = 1 - g`` (``g`` the endemic equilibrium without vaccination).
    """
    n = model.n
    r0 = loss_value(model, "re", np.ones(n))
    if r0 <= 1:
        return EradicationReport(0.0, 0.0, 0.0, np.ones(n), True, True)
    via_re = min_cost_at_loss(model, "re", costfn, 1.0, opts)
    via_i = min_cost_at_loss(model, "i", costfn, 0.0, opts)
    g = maximal_equilibrium(model, np.ones(n)).g
    bound = min(cost(costfn, np.full(n, 1.0 / r0)), cost(costfn, 1.0 - g))
    return EradicationReport(
        via_re.cost,
        via_i.cost,
        bound,
        via_re.strategy,
        abs(via_re.cost - via_i.cost) <= 2 * opts.tol_c,
        via_re.cost <= bound + opts.tol_c,
    )


# -- geometry ---------------------------------------------------------------------

@dataclass(frozen=True)
class ChordReport:
    holds: bool
    worst_excess: float
    pairs_checked: int
    convex: bool
    worst_convexity_defect: float


def chord_and_convexity_report(frontier: Frontier, costfn: CostFunction, slack=1e-6) -> ChordReport:
    """Check ``L*(theta c + (1 - theta) c_max) <= theta L*(c)`` on grid pairs.

    Any two grid costs ``c_a < c_b`` define ``theta = (c_max - c_b) / (c_max - c_a)``.
    Convexity of the grid values is reported, not required.
    """
    c, ell = frontier.costs, frontier.losses
    c_max = costfn.c_max
    worst, pairs = -np.inf, 0
    for a in range(c.size):
        for b in range(a + 1, c.size):
            if c_max - c[a] <= 0:
                continue
            theta = (c_max - c[b]) / (c_max - c[a])
            worst = max(worst, ell[b] - theta * ell[a])
            pairs += 1
    defect = 0.0
    for i in range(1, c.size - 1):
        # second divided difference on a possibly uneven grid
        left = (ell[i] - ell[i - 1]) / max(c[i] - c[i - 1], 1e-300)
        right = (ell[i + 1] - ell[i]) / max(c[i + 1] - c[i], 1e-300)
        defect = max(defect, left - right)
    worst = max(worst, 0.0) if pairs else 0.0
    return ChordReport(worst <= slack, float(worst), pairs, defect <= slack, float(defect))


# -- CSV --------------------------------------------------------------------------

def write_frontier_csv(frontier: Frontier, path, strategies_path=None):
    """Write ``cost,loss,status`` rows and a JSON sidecar of strategies."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cost", "loss", "status"])
        for p in frontier.points:
            w.writerow([repr(float(p.cost)), repr(float(p.loss)), p.solver_status])
    if strategies_path is None:
        strategies_path = sidecar_path(path)
    with open(strategies_path, "w") as fh:
        json.dump([p.strategy.tolist() for p in frontier.points], fh)
        fh.write("\n")
    return strategies_path


def sidecar_path(path) -> str:
    root, _ = os.path.splitext(str(path))
    return root + ".strategies.json"


def read_frontier_csv(path, loss_kind="re", orientation=PARETO, strategies_path=None) -> Frontier:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if strategies_path is None and os.path.exists(sidecar_path(path)):
        strategies_path = sidecar_path(path)
    strategies = [None] * len(rows)
    if strategies_path is not None:
        with open(strategies_path) as fh:
            strategies = [np.array(s) for s in json.load(fh)]
    points = [
        FrontierPoint(float(r["cost"]), float(r["loss"]), s, r["status"]) for r, s in zip(rows, strategies)
    ]
    return Frontier(points, loss_kind, orientation)
