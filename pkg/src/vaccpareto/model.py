"""Discretized kernel / SIS models.

A model lives on a finite set of sites ``0..n-1`` carrying probability masses
``weights``.  Continuous models are step functions: each site may carry a
half-open interval label ``[a, b)`` of ``[0, 1)`` whose length is its mass.

The transmission kernel ``k[i, j]`` is the rate at which individuals of
feature ``j`` infect individuals of feature ``i``; ``gamma[i]`` is the recovery
rate.  The next-generation kernel divides each column by the recovery rate of
the infector: ``k[i, j] / gamma[j]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionMismatch,
    InvalidExponent,
    InvalidGroupCount,
    InvalidStrategy,
    ModelError,
    NegativeEpsilon,
    NegativeKernelEntry,
    NonPositiveGamma,
    NonPositiveWeight,
)

WEIGHT_SUM_TOL = 1e-12


def _same(a, b):
    if a is None or b is None:
        return a is b
    return a.shape == b.shape and bool(np.array_equal(a, b))


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FeatureSpace:
    """Finite probability space of features.

    Parameters
    ----------
    weights : array_like, shape (n,)
        Strictly positive masses summing to one.
    labels : array_like, shape (n, 2), optional
        Interval ``[a_i, b_i)`` of ``[0, 1)`` represented by each site.
    """

    weights: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        w = _frozen(self.weights).reshape(-1)
        object.__setattr__(self, "weights", w)
        if w.size == 0:
            raise NonPositiveWeight("feature space needs at least one site")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise NonPositiveWeight(f"site weights must be finite and > 0, got {w}")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise NonPositiveWeight(f"site weights sum to {w.sum()!r}, expected 1")
        if self.labels is not None:
            lab = _frozen(self.labels)
            if lab.shape != (w.size, 2):
                raise DimensionMismatch(f"labels must have shape ({w.size}, 2), got {lab.shape}")
            object.__setattr__(self, "labels", lab)
            _check_labels(lab, w)

    @property
    def n(self) -> int:
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, FeatureSpace):
            return NotImplemented
        return _same(self.weights, other.weights) and _same(self.labels, other.labels)

    __hash__ = None


def _check_labels(labels, weights, tol=1e-12):
    if abs(labels[0, 0]) > tol or abs(labels[-1, 1] - 1.0) > tol:
        raise ModelError("interval labels must cover [0, 1)")
    if np.any(np.abs(labels[1:, 0] - labels[:-1, 1]) > tol):
        raise ModelError("interval labels must be consecutive and disjoint")
    if np.any(np.abs((labels[:, 1] - labels[:, 0]) - weights) > tol):
        raise ModelError("interval lengths must equal site weights")


def consecutive_labels(weights) -> np.ndarray:
    """Intervals ``[a_i, b_i)`` laid end to end in site order."""
    w = np.asarray(weights, dtype=float)
    right = np.cumsum(w)
    right[-1] = 1.0
    left = np.concatenate([[0.0], right[:-1]])
    return np.column_stack([left, right])


@dataclass(frozen=True, eq=False)
class Kernel:
    """Dense non-negative kernel ``entries[i, j] = k(x_i, x_j)`` on ``space``."""

    entries: np.ndarray
    space: FeatureSpace

    def __post_init__(self):
        k = _frozen(self.entries)
        n = self.space.n
        if k.shape != (n, n):
            raise DimensionMismatch(f"kernel must be {n}x{n}, got shape {k.shape}")
        if not np.all(np.isfinite(k)):
            raise NegativeKernelEntry("kernel entries must be finite")
        if np.any(k < 0):
            raise NegativeKernelEntry("kernel entries must be >= 0")
        object.__setattr__(self, "entries", k)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def weights(self) -> np.ndarray:
        return self.space.weights

    def __eq__(self, other):
        if not isinstance(other, Kernel):
            return NotImplemented
        return self.space == other.space and _same(self.entries, other.entries)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SisModel:
    """SIS model: transmission kernel ``k`` and recovery rates ``gamma``.

    A pure kernel model (no epidemic dynamics) is represented with
    ``gamma = 1`` so that the kernel equals its next-generation kernel.
    """

    space: FeatureSpace
    k: Kernel
    gamma: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        g = _frozen(self.gamma).reshape(-1)
        if g.size != self.space.n:
            raise DimensionMismatch(f"gamma must have {self.space.n} entries, got {g.size}")
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise NonPositiveGamma(f"recovery rates must be finite and > 0, got {g}")
        if self.k.space is not self.space and self.k.space != self.space:
            raise DimensionMismatch("kernel and model live on different feature spaces")
        object.__setattr__(self, "gamma", g)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def weights(self) -> np.ndarray:
        return self.space.weights

    def __eq__(self, other):
        if not isinstance(other, SisModel):
            return NotImplemented
        return self.space == other.space and self.k == other.k and _same(self.gamma, other.gamma)

    __hash__ = None

    @cached_property
    def ngk(self) -> np.ndarray:
        """Next-generation kernel entries ``k[i, j] / gamma[j]``."""
        return next_gen_kernel(self).entries


def make_model(weights, kernel, gamma=None, labels=None, name="") -> SisModel:
    """Build and validate a model from plain arrays (``gamma`` defaults to 1)."""
    space = FeatureSpace(weights, labels)
    k = Kernel(kernel, space)
    if gamma is None:
        gamma = np.ones(space.n)
    return SisModel(space, k, gamma, name=name)


def next_gen_kernel(model: SisModel) -> Kernel:
    return Kernel(model.k.entries / model.gamma[None, :], model.space)


def check_strategy(eta, n: int) -> np.ndarray:
    """Return ``eta`` as a float array after checking shape and range."""
    eta = np.asarray(eta, dtype=float)
    if eta.ndim == 0:
        eta = np.full(n, float(eta))
    if eta.shape != (n,):
        raise DimensionMismatch(f"strategy must have shape ({n},), got {eta.shape}")
    if not np.all(np.isfinite(eta)) or np.any(eta < 0) or np.any(eta > 1):
        raise InvalidStrategy("strategy values must lie in [0, 1]")
    return eta


# -- builders -----------------------------------------------------------------

def build_block_model(block_weights, block_kernel, block_gamma=None, name="block") -> SisModel:
    """One site per block; labels are consecutive intervals of ``[0, 1)``.

    >>> m = build_block_model([0.5, 0.5], [[1, 2], [2, 1]], [1, 1])
    >>> m.n
    2
    """
    w = np.asarray(block_weights, dtype=float).reshape(-1)
    if w.size and np.all(w > 0):
        labels = consecutive_labels(w)
    else:
        labels = None
    return make_model(w, block_kernel, block_gamma, labels=labels, name=name)


def build_homogeneous(kappa: float, gamma: float = 1.0) -> SisModel:
    """Single-site model with contact rate ``kappa``."""
    return build_block_model([1.0], [[kappa]], [gamma], name=f"homogeneous(kappa={kappa:g})")


def _multipartite_weights(groups):
    return np.array([2.0 ** -n for n in range(1, groups + 1)] + [2.0 ** -groups])


def build_perturbed_multipartite(groups: int, kappa: float, eps: float) -> SisModel:
    """Multipartite kernel with ``eps`` on the intra-group blocks.

    Group ``n`` (``1 <= n <= groups``) has mass ``2**-n``; the tail mass
    ``2**-groups`` is gathered in a last remainder group.  ``gamma = 1``.
    """
    if int(groups) != groups or groups < 2:
        raise InvalidGroupCount(f"need at least 2 groups, got {groups}")
    if eps < 0:
        raise NegativeEpsilon(f"eps must be >= 0, got {eps}")
    if kappa < 0:
        raise NegativeKernelEntry(f"kappa must be >= 0, got {kappa}")
    groups = int(groups)
    w = _multipartite_weights(groups)
    m = w.size
    k = np.full((m, m), float(kappa))
    np.fill_diagonal(k, float(eps))
    name = f"multipartite(N={groups}, kappa={kappa:g}" + (f", eps={eps:g})" if eps else ")")
    return build_block_model(w, k, np.ones(m), name=name)


def build_multipartite(groups: int, kappa: float) -> SisModel:
    return build_perturbed_multipartite(groups, kappa, 0.0)


def multipartite_prefix_strategy(model: SisModel, c: float) -> np.ndarray:
    """Site-level version of the indicator of ``[0, 1 - c]``.

    Vaccinates everything to the right of ``1 - c``: sites whose interval lies
    past the cut get 0, the straddling site gets the fraction left of the cut.
    """
    lab = model.space.labels
    if lab is None:
        raise ModelError("model has no interval labels")
    cut = 1.0 - c
    covered = np.clip(cut - lab[:, 0], 0.0, lab[:, 1] - lab[:, 0])
    return np.clip(covered / model.weights, 0.0, 1.0)


def zoo() -> dict:
    """Small fixed collection of models exercised by the property suites."""
    return {
        "homogeneous": build_homogeneous(2.0),
        "homogeneous_sub": build_homogeneous(0.8),
        "sbm2": build_block_model([0.5, 0.5], [[1.0, 2.0], [2.0, 1.0]], [1.0, 1.0], name="sbm2"),
        "sbm2_asym": build_block_model(
            [0.3, 0.7], [[4.0, 1.0], [0.5, 2.0]], [1.0, 2.0], name="sbm2_asym"
        ),
        "multipartite": build_multipartite(6, 2.0),
    }


# -- structure ------------------------------------------------------------------

def double_norm(kernel: Kernel, p: float) -> float:
    """``(sum_i mu_i (sum_j |k_ij|^q mu_j)^(p/q))^(1/p)`` with ``q = p/(p-1)``."""
    if not p > 1 or not np.isfinite(p):
        raise InvalidExponent(f"p must be in (1, inf), got {p}")
    q = p / (p - 1.0)
    mu = kernel.weights
    inner = (np.abs(kernel.entries) ** q) @ mu
    return float((mu @ inner ** (p / q)) ** (1.0 / p))


class Irreducibility(Enum):
    IRREDUCIBLE = "Irreducible"
    QUASI_IRREDUCIBLE = "QuasiIrreducible"
    REDUCIBLE = "Reducible"


@dataclass(frozen=True)
class IrreducibilityClass:
    tag: Irreducibility
    zero_set: tuple


def support_components(entries) -> np.ndarray:
    """Strongly connected component label of each site of the support graph."""
    _, labels = connected_components(np.asarray(entries) > 0, directed=True, connection="strong")
    return labels


def irreducibility_class(kernel: Kernel) -> IrreducibilityClass:
    k = kernel.entries
    dead = (k.sum(axis=0) + k.sum(axis=1)) == 0
    zero_set = tuple(int(i) for i in np.flatnonzero(dead))
    alive = np.flatnonzero(~dead)
    if alive.size == 0:
        return IrreducibilityClass(Irreducibility.QUASI_IRREDUCIBLE, zero_set)
    labels = support_components(k[np.ix_(alive, alive)])
    connected = np.unique(labels).size == 1
    if connected and not zero_set:
        tag = Irreducibility.IRREDUCIBLE
    elif connected:
        tag = Irreducibility.QUASI_IRREDUCIBLE
    else:
        tag = Irreducibility.REDUCIBLE
    return IrreducibilityClass(tag, zero_set)


# -- JSON ---------------------------------------------------------------------

def model_to_dict(model: SisModel) -> dict:
    d = {
        "weights": model.weights.tolist(),
        "kernel": model.k.entries.tolist(),
        "gamma": model.gamma.tolist(),
    }
    if model.space.labels is not None:
        d["labels"] = model.space.labels.tolist()
    return d


def model_from_dict(d: dict, name="") -> SisModel:
    try:
        return make_model(d["weights"], d["kernel"], d.get("gamma"), d.get("labels"), name=name)
    except KeyError as exc:
        raise ModelError(f"model file lacks required field {exc}") from None


def load_model(path) -> SisModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh), name=str(path))


def save_model(model: SisModel, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh)
        fh.write("\n")


def permuted(model: SisModel, perm: Sequence[int]) -> SisModel:
    """Relabel sites: new site ``a`` is old site ``perm[a]``.

    Interval labels are reassigned end to end in the new order, which is a
    measure-preserving rearrangement of ``[0, 1)``.
    """
    perm = np.asarray(perm, dtype=int)
    if sorted(perm.tolist()) != list(range(model.n)):
        raise DimensionMismatch("perm must be a permutation of the sites")
    w = model.weights[perm]
    k = model.k.entries[np.ix_(perm, perm)]
    labels = consecutive_labels(w) if model.space.labels is not None else None
    return make_model(w, k, model.gamma[perm], labels, name=f"{model.name}[permuted]")
