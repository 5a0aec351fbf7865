"""
Support-partition witnesses: deciding from (P, nu) alone whether some
version of Eaton's kernel is nu-reducible.

A witness is a pair ``(C, A)`` with ``C`` a nonempty set of parameter
indices and ``A`` a set of sample indices such that

1. ``nu(complement of C) > 0``;
2. every row ``i`` in ``C`` puts all of its mass inside ``A``;
3. every nu-positive row outside ``C`` puts no mass on ``A``.

Such a pair exists iff some version of R is nu-reducible.  On a finite grid
the search reduces to the *overlap graph*: nu-positive rows joined whenever
their supports intersect.  A witness exists iff that graph is disconnected,
or some nu-null row has a support disjoint from every nu-positive support.
:func:`brute_force_witness` checks this reduction against an exhaustive
search over ``C``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .chains import ClosedSet, is_closed
from .finite_model import FiniteModel, ModelError, PosteriorKernel
from .kernel import build_eaton_kernel

BRUTE_FORCE_MAX_THETA = 12
BRUTE_FORCE_MAX_X = 12


@dataclass(frozen=True)
class SupportGraph:
    """Bipartite theta/x graph with an edge ``(i, j)`` iff ``P[i, j] > tau``."""

    adjacency: np.ndarray
    tau: float = 0.0

    @classmethod
    def from_model(cls, model: FiniteModel, tau: float = 0.0):
        if tau < 0:
            raise ValueError("support threshold must be nonnegative")
        adj = model.P > tau
        adj.setflags(write=False)
        return cls(adj, tau)

    def row_support(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def union_support(self, rows) -> np.ndarray:
        rows = sorted(rows)
        if not rows:
            return np.zeros(self.adjacency.shape[1], dtype=bool)
        return self.adjacency[rows].any(axis=0)

    def overlap_components(self, rows) -> list:
        """Connected components of the overlap graph restricted to ``rows``,
        each sorted, listed by lowest member."""
        rows = np.asarray(sorted(rows), dtype=int)
        if rows.size == 0:
            return []
        sub = self.adjacency[rows].astype(np.int64)
        overlap = (sub @ sub.T) > 0
        _, labels = connected_components(csr_matrix(overlap), directed=False)
        comps = {}
        for r, lab in zip(rows.tolist(), labels.tolist()):
            comps.setdefault(lab, []).append(r)
        return sorted(comps.values(), key=lambda c: c[0])


@dataclass(frozen=True)
class PartitionWitness:
    """Parameter set ``C`` and sample set ``A`` separating the model."""
    C: frozenset
    A: frozenset

    def __post_init__(self):
        object.__setattr__(self, "C", frozenset(int(c) for c in self.C))
        object.__setattr__(self, "A", frozenset(int(a) for a in self.A))


@dataclass(frozen=True)
class WitnessCheck:
    nonempty_with_null_free_complement: bool
    C_inside_A: bool
    complement_avoids_A: bool

    @property
    def passed(self) -> bool:
        return (self.nonempty_with_null_free_complement and self.C_inside_A
                and self.complement_avoids_A)

    def __bool__(self):
        return self.passed


def _mask(indices, n: int) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    idx = sorted(indices)
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise IndexError(f"index out of range for size {n}")
    m[idx] = True
    return m


def validate_witness(model: FiniteModel, w: PartitionWitness,
                     tau: float = 0.0) -> WitnessCheck:
    """Check the three witness conditions directly against ``P`` and ``nu``."""
    n_theta, n_x = model.shape
    C = _mask(w.C, n_theta)
    A = _mask(w.A, n_x)
    supp = model.P > tau
    cond1 = bool(C.any() and (model.nu[~C] > 0).any())
    cond2 = not supp[np.ix_(C, ~A)].any()
    rest = ~C & (model.nu > 0)
    cond3 = not supp[np.ix_(rest, A)].any()
    return WitnessCheck(cond1, cond2, cond3)


def find_partition_witness(model: FiniteModel,
                           tau: float = 0.0) -> Optional[PartitionWitness]:
    """Return a witness if one exists, else ``None``.

    If the overlap graph on nu-positive rows has two or more components, the
    component holding the lowest index becomes ``C`` (nu-null rows are left
    in the complement, where only nu-almost-all rows are constrained).
    Otherwise the lowest-index nu-null row whose support misses every
    nu-positive support is isolated on its own.  ``A`` is the union of the
    supports of ``C`` in both cases.
    """
    graph = SupportGraph.from_model(model, tau)
    positive = np.flatnonzero(model.nu > 0)
    comps = graph.overlap_components(positive)
    if len(comps) >= 2:
        C = comps[0]
        return PartitionWitness(C, np.flatnonzero(graph.union_support(C)))
    covered = graph.union_support(positive)
    for i in np.flatnonzero(model.nu == 0):
        if not (graph.adjacency[i] & covered).any():
            return PartitionWitness([i], graph.row_support(i))
    return None


def brute_force_witness(model: FiniteModel,
                        tau: float = 0.0) -> Optional[PartitionWitness]:
    """Exhaustive search over nonempty ``C`` in increasing bitmask order.

    ``A`` is forced: if any ``A`` works for a given ``C``, the union of the
    supports of ``C`` does, so only ``C`` is enumerated.
    """
    n_theta, n_x = model.shape
    if n_theta > BRUTE_FORCE_MAX_THETA or n_x > BRUTE_FORCE_MAX_X:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_THETA} x "
            f"{BRUTE_FORCE_MAX_X} models, got {n_theta} x {n_x}")
    supp = model.P > tau
    rows = [sum(1 << int(j) for j in np.flatnonzero(supp[i]))
            for i in range(n_theta)]
    positive = [i for i in range(n_theta) if model.nu[i] > 0]
    for mask in range(1, 1 << n_theta):
        members = [i for i in range(n_theta) if mask >> i & 1]
        outside_positive = [k for k in positive if not mask >> k & 1]
        if not outside_positive:
            continue
        A = 0
        for i in members:
            A |= rows[i]
        if all(not rows[k] & A for k in outside_positive):
            return PartitionWitness(members,
                                    [j for j in range(n_x) if A >> j & 1])
    return None


def common_support_quick_check(model: FiniteModel, tau: float = 0.0) -> bool:
    """True iff every row of ``P`` has the same support.

    A parameter-free support rules out any witness; the converse fails.
    """
    supp = model.P > tau
    return bool((supp == supp[0]).all())


def reducing_columns(model: FiniteModel, Q: PosteriorKernel,
                     w: PartitionWitness) -> np.ndarray:
    """Columns ``j`` in ``A`` where ``Q`` gives the complement of ``C``
    positive mass.  These are always M-null for a formal posterior."""
    n_theta, n_x = model.shape
    C = _mask(w.C, n_theta)
    A = _mask(w.A, n_x)
    leaks = (Q.Q[~C] > 0).any(axis=0)
    return np.flatnonzero(A & leaks)


def build_reducible_version(model: FiniteModel, Q: PosteriorKernel,
                            w: PartitionWitness, theta0: int = None,
                            tau: float = 0.0) -> PosteriorKernel:
    """Move the posterior on the (M-null) leaking columns of ``A`` to the
    point mass at ``theta0``, making ``C`` closed for the resulting kernel.

    ``theta0`` defaults to the lowest index in ``C``.
    """
    if not validate_witness(model, w, tau):
        raise ValueError("invalid partition witness")
    if theta0 is None:
        theta0 = min(w.C)
    if theta0 not in w.C:
        raise ValueError(f"theta0 = {theta0} is not in C")
    D = reducing_columns(model, Q, w)
    M = model.nu @ model.P
    if np.any(M[D] > 0):
        raise ModelError(
            "posterior leaks mass outside C on a column of positive marginal "
            "mass; Q is not a formal posterior for this model")
    delta = np.zeros(model.shape[0])
    delta[theta0] = 1.0
    tag = f"{Q.policy_tag}; pointmass:{model.theta_labels[theta0]} on D"
    return Q.replace_columns(D.tolist(), delta, tag)


def witness_from_closed_set(model: FiniteModel, Q: PosteriorKernel,
                            C) -> PartitionWitness:
    """Recover ``(C, A)`` from a closed set of the kernel built from ``Q``.

    ``A`` is the set of columns where ``Q`` puts no mass outside ``C``.
    """
    C_set = C.C if isinstance(C, ClosedSet) else frozenset(C)
    n_theta = model.shape[0]
    Cm = _mask(C_set, n_theta)
    if not Cm.any():
        raise ValueError("C must be nonempty")
    if not (model.nu[~Cm] > 0).any():
        raise ValueError("complement of C is nu-null")
    R = build_eaton_kernel(model, Q)
    if not is_closed(R, C_set):
        raise ValueError("C is not closed for the kernel built from Q")
    F2 = (Q.Q[~Cm] > 0).any(axis=0)
    return PartitionWitness(C_set, np.flatnonzero(~F2))
