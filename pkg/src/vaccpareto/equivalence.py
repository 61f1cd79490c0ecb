"""Deterministic couplings between models.

A :class:`SiteMapping` sends every fine site to a coarse class.  Two models
are equivalent under it when the fine kernel and recovery rates are the coarse
ones copied block-constant.  Strategies move between them by conditional
expectation (``project_strategy``) and by class-constant extension
(``lift_strategy``); both preserve cost, ``R_e`` and ``I``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import infected_fraction
from .errors import DimensionMismatch, MappingInconsistent, WeightMismatch
from .model import SisModel, make_model
from .pareto import CostFunction, OptimizerOptions, cost, eradication_cost
from .spectral import basic_R, effective_R

MATCH_TOL = 1e-12


@dataclass(frozen=True)
class SiteMapping:
    fine_to_coarse: np.ndarray
    fine_weights: np.ndarray
    coarse_weights: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.fine_to_coarse, dtype=int).reshape(-1)
        fw = np.asarray(self.fine_weights, dtype=float).reshape(-1)
        cw = np.asarray(self.coarse_weights, dtype=float).reshape(-1)
        if p.size != fw.size:
            raise MappingInconsistent(f"{p.size} class indices for {fw.size} fine sites")
        if p.size and (p.min() < 0 or p.max() >= cw.size):
            raise MappingInconsistent("class index out of range")
        if np.unique(p).size != cw.size:
            raise MappingInconsistent("mapping is not onto the coarse sites")
        sums = np.bincount(p, weights=fw, minlength=cw.size)
        if np.any(np.abs(sums - cw) > MATCH_TOL):
            raise MappingInconsistent("coarse weights are not the sums of their fine sites")
        object.__setattr__(self, "fine_to_coarse", p)
        object.__setattr__(self, "fine_weights", fw)
        object.__setattr__(self, "coarse_weights", cw)

    @property
    def n_fine(self) -> int:
        return self.fine_to_coarse.size

    @property
    def n_coarse(self) -> int:
        return self.coarse_weights.size

    def to_json(self) -> str:
        return json.dumps({"fine_to_coarse": self.fine_to_coarse.tolist()})

    @classmethod
    def from_json(cls, text: str, fine: SisModel, coarse: SisModel) -> "SiteMapping":
        try:
            p = json.loads(text)["fine_to_coarse"]
        except (KeyError, TypeError, ValueError) as exc:
            raise MappingInconsistent(f"malformed mapping: {exc}") from None
        return cls(p, fine.weights, coarse.weights)


def _close(a, b):
    return np.all(np.abs(np.asarray(a) - np.asarray(b)) <= MATCH_TOL)


def reduce(model: SisModel):
    """Merge sites with identical rows, columns and recovery rate.

    Block constancy of the kernel on a partition forces equal rows and equal
    columns within each class, so this is the coarsest admissible partition.
    Returns ``(coarse_model, mapping)``; classes are numbered by first site.
    """
    k, gamma = model.k.entries, model.gamma
    reps: list[int] = []
    p = np.empty(model.n, dtype=int)
    for i in range(model.n):
        for c, r in enumerate(reps):
            if abs(gamma[i] - gamma[r]) <= MATCH_TOL and _close(k[i], k[r]) and _close(k[:, i], k[:, r]):
                p[i] = c
                break
        else:
            p[i] = len(reps)
            reps.append(i)
    reps = np.array(reps)
    w = np.bincount(p, weights=model.weights)
    w = w / w.sum()
    labels = None
    lab = model.space.labels
    if lab is not None and np.all(np.diff(p) >= 0):
        # classes made of adjacent intervals keep their union as label
        labels = np.column_stack([
            [lab[p == c, 0].min() for c in range(reps.size)],
            [lab[p == c, 1].max() for c in range(reps.size)],
        ])
        labels[-1, 1] = 1.0
        w = labels[:, 1] - labels[:, 0]
    coarse = make_model(w, k[np.ix_(reps, reps)], gamma[reps], labels, name=f"{model.name}[reduced]")
    return coarse, SiteMapping(p, model.weights, coarse.weights)


def blow_up(model: SisModel, splits):
    """Split every site into parts carrying the kernel block-constant.

    ``splits[i]`` is either a number of equal parts or a list of positive
    sub-weights summing to ``weights[i]``.
    """
    if len(splits) != model.n:
        raise DimensionMismatch(f"need one split per site ({model.n}), got {len(splits)}")
    parts, owner = [], []
    for i, s in enumerate(splits):
        wi = model.weights[i]
        if np.ndim(s) == 0:
            if int(s) != s or s < 1:
                raise WeightMismatch(f"site {i}: part count must be a positive integer, got {s}")
            sub = np.full(int(s), wi / int(s))
        else:
            sub = np.asarray(s, dtype=float).reshape(-1)
            if sub.size == 0 or np.any(sub <= 0):
                raise WeightMismatch(f"site {i}: sub-weights must be positive")
            if abs(sub.sum() - wi) > MATCH_TOL:
                raise WeightMismatch(f"site {i}: sub-weights sum to {sub.sum()!r}, not {wi!r}")
        parts.append(sub)
        owner += [i] * sub.size
    p = np.array(owner)
    w = np.concatenate(parts)
    labels = None
    if model.space.labels is not None:
        # subdivide each interval in proportion to its parts
        left = [model.space.labels[i, 0] + np.concatenate([[0.0], np.cumsum(sub)[:-1]]) for i, sub in enumerate(parts)]
        left = np.concatenate(left)
        right = np.append(left[1:], 1.0)
        labels = np.column_stack([left, right])
        w = right - left
    fine = make_model(w, model.k.entries[np.ix_(p, p)], model.gamma[p], labels, name=f"{model.name}[blow-up]")
    return fine, SiteMapping(p, fine.weights, model.weights)


def permutation_mapping(fine: SisModel, perm) -> SiteMapping:
    """Mapping for ``fine = permuted(coarse, perm)``: fine site ``a`` is coarse ``perm[a]``."""
    perm = np.asarray(perm, dtype=int)
    w = np.empty(perm.size)
    w[perm] = fine.weights
    return SiteMapping(perm, fine.weights, w)


def project_strategy(fine_eta, mapping: SiteMapping) -> np.ndarray:
    """Conditional expectation of ``fine_eta`` on the coarse classes."""
    eta = np.asarray(fine_eta, dtype=float)
    if eta.shape != (mapping.n_fine,):
        raise DimensionMismatch(f"strategy must have shape ({mapping.n_fine},), got {eta.shape}")
    p, mu = mapping.fine_to_coarse, mapping.fine_weights
    num = np.bincount(p, weights=eta * mu, minlength=mapping.n_coarse)
    den = np.bincount(p, weights=mu, minlength=mapping.n_coarse)
    return np.clip(num / den, 0.0, 1.0)


def lift_strategy(coarse_eta, mapping: SiteMapping) -> np.ndarray:
    eta = np.asarray(coarse_eta, dtype=float)
    if eta.shape != (mapping.n_coarse,):
        raise DimensionMismatch(f"strategy must have shape ({mapping.n_coarse},), got {eta.shape}")
    return eta[mapping.fine_to_coarse]


def check_mapping(fine: SisModel, coarse: SisModel, mapping: SiteMapping):
    """Raise :class:`MappingInconsistent` unless ``fine`` is ``coarse`` copied block-constant."""
    if mapping.n_fine != fine.n or mapping.n_coarse != coarse.n:
        raise MappingInconsistent("mapping dimensions do not match the models")
    if not _close(mapping.fine_weights, fine.weights) or not _close(mapping.coarse_weights, coarse.weights):
        raise MappingInconsistent("mapping weights differ from the model weights")
    p = mapping.fine_to_coarse
    sums = np.bincount(p, weights=fine.weights, minlength=coarse.n)
    if not _close(sums, coarse.weights):
        raise MappingInconsistent("coarse weights are not the sums of their fine sites")
    if not _close(fine.gamma, coarse.gamma[p]):
        raise MappingInconsistent("recovery rates are not constant on classes")
    if not _close(fine.k.entries, coarse.k.entries[np.ix_(p, p)]):
        raise MappingInconsistent("fine kernel is not the block-constant copy of the coarse kernel")


@dataclass(frozen=True)
class EquivalenceReport:
    checks: dict = field(default_factory=dict)
    gaps: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": dict(self.checks), "gaps": dict(self.gaps)}


def verify_equivalence(
    fine: SisModel,
    coarse: SisModel,
    mapping: SiteMapping,
    sample_count: int = 20,
    seed: int = 0,
    tol: float = 1e-8,
    erad_tol: float = 1e-5,
    opts: OptimizerOptions = OptimizerOptions(),
) -> EquivalenceReport:
    """Compare cost, ``R_e`` and ``I`` on lifted and projected strategies.

    Coarse samples are lifted; fine samples are projected.  Both directions
    must give gaps below ``tol``.  ``R_0`` and the eradication cost (uniform
    cost) must also agree.
    """
    check_mapping(fine, coarse, mapping)
    rng = np.random.default_rng(seed)
    cf_fine, cf_coarse = CostFunction.uniform(fine), CostFunction.uniform(coarse)
    pairs = []
    for eta in [np.ones(coarse.n), np.full(coarse.n, 0.5)] + list(rng.uniform(size=(sample_count, coarse.n))):
        pairs.append((lift_strategy(eta, mapping), eta))
    for eta in rng.uniform(size=(sample_count, fine.n)):
        pairs.append((eta, project_strategy(eta, mapping)))
    gaps = {"cost": 0.0, "re": 0.0, "i": 0.0}
    for ef, ec in pairs:
        gaps["cost"] = max(gaps["cost"], abs(cost(cf_fine, ef) - cost(cf_coarse, ec)))
        gaps["re"] = max(gaps["re"], abs(effective_R(fine, ef) - effective_R(coarse, ec)))
        gaps["i"] = max(gaps["i"], abs(infected_fraction(fine, ef) - infected_fraction(coarse, ec)))
    gaps["r0"] = abs(basic_R(fine) - basic_R(coarse))
    gaps["eradication_cost"] = abs(
        eradication_cost(fine, cf_fine, opts).value - eradication_cost(coarse, cf_coarse, opts).value
    )
    checks = {name: gaps[name] <= tol for name in ("cost", "re", "i", "r0")}
    checks["eradication_cost"] = gaps["eradication_cost"] <= erad_tol
    return EquivalenceReport(checks, gaps)
