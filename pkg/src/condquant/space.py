"""Finite probability spaces, partitions, random variables and filtrations.

Everything here is an immutable value object; operations are pure functions.
A partition plays the role of a sub-sigma-algebra: a random variable is
measurable w.r.t. a partition iff it is constant on each atom.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NonPositiveProbability,
    ProbabilitiesDoNotSumToOne,
    SpaceMismatch,
    UnknownAtom,
)

PROB_TOL = 1e-12


def _frozen(arr, dtype=float):
    out = np.array(arr, dtype=dtype)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class ProbabilitySpace:
    """Finite outcome set with strictly positive weights summing to one."""

    probs: np.ndarray

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 1 or probs.size == 0:
            raise NonPositiveProbability("probs must be a nonempty 1-d sequence")
        if np.any(probs <= 0.0) or not np.all(np.isfinite(probs)):
            raise NonPositiveProbability("all probabilities must be strictly positive")
        if abs(float(probs.sum()) - 1.0) > PROB_TOL:
            raise ProbabilitiesDoNotSumToOne(
                f"probabilities sum to {float(probs.sum())!r}, not 1"
            )
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return self.probs.size


def make_space(probs) -> ProbabilitySpace:
    """Validate and build a finite probability space."""
    return ProbabilitySpace(np.asarray(probs, dtype=float))


def uniform_space(n: int) -> ProbabilitySpace:
    return make_space(np.full(n, 1.0 / n))


def same_space(a: ProbabilitySpace, b: ProbabilitySpace) -> bool:
    return a is b or (a.n == b.n and bool(np.array_equal(a.probs, b.probs)))


def _require_same_space(a: ProbabilitySpace, b: ProbabilitySpace):
    if not same_space(a, b):
        raise SpaceMismatch("objects live on different probability spaces")


@dataclass(frozen=True, eq=False)
class RandomVariable:
    """A real value per outcome. Positive values are losses."""

    space: ProbabilitySpace
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.space.n,):
            raise SpaceMismatch(
                f"expected {self.space.n} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("random variable values must be finite")
        object.__setattr__(self, "values", values)

    def expectation(self) -> float:
        return float(np.dot(self.space.probs, self.values))

    def __add__(self, other):
        if isinstance(other, RandomVariable):
            _require_same_space(self.space, other.space)
            return RandomVariable(self.space, self.values + other.values)
        return RandomVariable(self.space, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RandomVariable):
            _require_same_space(self.space, other.space)
            return RandomVariable(self.space, self.values - other.values)
        return RandomVariable(self.space, self.values - other)

    def __rsub__(self, other):
        return RandomVariable(self.space, other - self.values)

    def __mul__(self, other):
        if isinstance(other, RandomVariable):
            _require_same_space(self.space, other.space)
            return RandomVariable(self.space, self.values * other.values)
        return RandomVariable(self.space, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return RandomVariable(self.space, -self.values)


def rv(space: ProbabilitySpace, values) -> RandomVariable:
    return RandomVariable(space, np.asarray(values, dtype=float))


def constant_rv(space: ProbabilitySpace, c: float) -> RandomVariable:
    return RandomVariable(space, np.full(space.n, float(c)))


@dataclass(frozen=True, eq=False)
class Partition:
    """Labeled partition of the outcome set; atoms are canonical.

    Atoms are sorted by their smallest outcome index, so atom ids are
    deterministic across runs.
    """

    space: ProbabilitySpace
    atoms: tuple
    atom_of: np.ndarray

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def atom_indices(self, atom_id: int) -> np.ndarray:
        if not 0 <= atom_id < len(self.atoms):
            raise UnknownAtom(f"no atom with id {atom_id}")
        return np.asarray(self.atoms[atom_id], dtype=int)

    def atom_prob(self, atom_id: int) -> float:
        return float(self.space.probs[self.atom_indices(atom_id)].sum())


def partition_from_atoms(space: ProbabilitySpace, atoms) -> Partition:
    """Build a partition from an iterable of outcome-index collections."""
    canon = sorted((tuple(sorted(int(i) for i in atom)) for atom in atoms),
                   key=lambda a: a[0] if a else -1)
    seen = set()
    for atom in canon:
        if not atom:
            raise ValueError("partition atoms must be nonempty")
        for i in atom:
            if i < 0 or i >= space.n:
                raise ValueError(f"outcome index {i} out of range")
            if i in seen:
                raise ValueError(f"outcome {i} appears in more than one atom")
            seen.add(i)
    if len(seen) != space.n:
        raise ValueError("atoms do not cover the outcome set")
    atom_of = np.empty(space.n, dtype=int)
    for k, atom in enumerate(canon):
        atom_of[list(atom)] = k
    return Partition(space, tuple(canon), _frozen(atom_of, dtype=int))


def partition_from_labels(space: ProbabilitySpace, labels) -> Partition:
    """Group outcomes sharing a label into atoms."""
    labels = list(labels)
    if len(labels) != space.n:
        raise SpaceMismatch("one label per outcome required")
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    return partition_from_atoms(space, groups.values())


def trivial_partition(space: ProbabilitySpace) -> Partition:
    return partition_from_atoms(space, [range(space.n)])


def discrete_partition(space: ProbabilitySpace) -> Partition:
    return partition_from_atoms(space, [[i] for i in range(space.n)])


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every atom of `fine` lies inside a single atom of `coarse`."""
    _require_same_space(fine.space, coarse.space)
    for atom in fine.atoms:
        ids = coarse.atom_of[list(atom)]
        if np.any(ids != ids[0]):
            return False
    return True


def is_measurable(Z: RandomVariable, G: Partition) -> bool:
    """True iff Z is constant on every atom of G."""
    _require_same_space(Z.space, G.space)
    for atom in G.atoms:
        vals = Z.values[list(atom)]
        if np.any(vals != vals[0]):
            return False
    return True


@dataclass(frozen=True, eq=False)
class Distribution:
    """Canonical finite distribution: strictly increasing support."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", _frozen(self.support))
        object.__setattr__(self, "weights", _frozen(self.weights))

    @property
    def is_point_mass(self) -> bool:
        return self.support.size == 1

    def mean(self) -> float:
        return float(np.dot(self.weights, self.support))


def distribution(support, weights) -> Distribution:
    """Canonicalize: sort support, merge duplicates, validate weights."""
    support = np.asarray(support, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if support.shape != weights.shape or support.ndim != 1 or support.size == 0:
        raise ValueError("support and weights must be matching nonempty 1-d arrays")
    if np.any(weights <= 0.0):
        raise NonPositiveProbability("distribution weights must be positive")
    if abs(float(weights.sum()) - 1.0) > PROB_TOL:
        raise ProbabilitiesDoNotSumToOne("distribution weights must sum to 1")
    uniq, inverse = np.unique(support, return_inverse=True)
    merged = np.zeros_like(uniq)
    np.add.at(merged, inverse, weights)
    return Distribution(uniq, merged)


def conditional_distribution(X: RandomVariable, G: Partition, atom_id: int) -> Distribution:
    """Distribution of X given the atom, weights renormalized by P(atom)."""
    _require_same_space(X.space, G.space)
    idx = G.atom_indices(atom_id)
    w = X.space.probs[idx]
    return distribution(X.values[idx], w / w.sum())


def _per_atom(X: RandomVariable, G: Partition, fn) -> RandomVariable:
    _require_same_space(X.space, G.space)
    out = np.empty(X.space.n)
    for k, atom in enumerate(G.atoms):
        idx = list(atom)
        out[idx] = fn(X.values[idx], X.space.probs[idx])
    return RandomVariable(X.space, out)


def conditional_expectation(X: RandomVariable, G: Partition) -> RandomVariable:
    """Probability-weighted atom averages, broadcast over each atom."""
    return _per_atom(X, G, lambda v, p: float(np.dot(p, v) / p.sum()))


def ess_sup_conditional(X: RandomVariable, G: Partition) -> RandomVariable:
    """Per-atom maximum of X (no null outcomes, so esssup is max)."""
    return _per_atom(X, G, lambda v, p: float(v.max()))


@dataclass(frozen=True, eq=False)
class Filtration:
    """Refining sequence of partitions, trivial at stage 0, discrete at the end."""

    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        if len(stages) < 2:
            raise ValueError("a filtration needs at least two stages")
        if stages[0].n_atoms != 1:
            raise ValueError("stage 0 must be the trivial partition")
        if stages[-1].n_atoms != stages[-1].space.n:
            raise ValueError("the final stage must be the discrete partition")
        for prev, cur in zip(stages, stages[1:]):
            if not refines(cur, prev):
                raise ValueError("each stage must refine the previous one")
        object.__setattr__(self, "stages", stages)

    @property
    def space(self) -> ProbabilitySpace:
        return self.stages[0].space

    @property
    def n_stages(self) -> int:
        return len(self.stages)


def filtration(stages) -> Filtration:
    return Filtration(tuple(stages))
