"""
Irreducibility and closed sets of finite Markov chains.

Everything here is decided on the positivity pattern ``S[y, z] > threshold``
rather than on floating-point matrix powers: accessibility and closedness
are statements about null sets, and a power that underflows or rounds to a
tiny positive number would blur them.  Matrix powers (:func:`n_step`) are
kept for numeric checks only.

Accessibility is always "in at least one step", so a state does not reach
itself unless it lies on a cycle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .finite_model import ModelError, WeightedMeasure
from .kernel import TransitionKernel

BRUTE_FORCE_MAX_STATES = 15


@dataclass(frozen=True)
class FiniteChain:
    """A transition kernel paired with the reference measure ``phi``."""

    kernel: TransitionKernel
    phi: WeightedMeasure

    def __post_init__(self):
        if self.kernel.state_labels != self.phi.labels:
            raise ModelError(
                "kernel and reference measure must share identically "
                "ordered labels")

    def __len__(self):
        return len(self.kernel)

    @classmethod
    def from_arrays(cls, S, phi, labels=None):
        S = np.atleast_2d(np.asarray(S, dtype=float))
        if labels is None:
            labels = [str(i) for i in range(S.shape[0])]
        return cls(TransitionKernel(labels, S), WeightedMeasure(labels, phi))


@dataclass(frozen=True)
class ReducibilityWitness:
    """A start ``y`` and a set ``A`` with ``phi(A) > 0`` never visited from ``y``."""
    y: int
    A: frozenset

    def __post_init__(self):
        object.__setattr__(self, "A", frozenset(int(a) for a in self.A))


@dataclass(frozen=True)
class ClosedSet:
    """Nonempty set the chain cannot leave once inside."""
    C: frozenset

    def __post_init__(self):
        C = frozenset(int(c) for c in self.C)
        if not C:
            raise ModelError("a closed set must be nonempty")
        object.__setattr__(self, "C", C)

    def __iter__(self):
        return iter(sorted(self.C))

    def __len__(self):
        return len(self.C)


@dataclass(frozen=True)
class IrreducibilityVerdict:
    irreducible: bool
    witness: Optional[ReducibilityWitness] = None

    def __bool__(self):
        return self.irreducible


@dataclass(frozen=True)
class ClosedSetReport:
    closed_sets: list = field(default_factory=list)
    reducible: bool = False


# -- numeric powers --------------------------------------------------------

def n_step(kernel: TransitionKernel, n: int) -> TransitionKernel:
    """``S^n`` for ``n >= 1`` (``S^1`` is ``S`` itself)."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    Sn = np.linalg.matrix_power(kernel.S, int(n))
    return TransitionKernel(kernel.state_labels, np.clip(Sn, 0.0, 1.0),
                            atol=1e-10)


# -- positivity pattern and reachability -------------------------------------

def positivity_digraph(kernel: TransitionKernel,
                       threshold: float = 0.0) -> np.ndarray:
    """Adjacency matrix with an edge ``y -> z`` iff ``S[y, z] > threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    return kernel.S > threshold


def reachable_from(adj: np.ndarray, y: int) -> np.ndarray:
    """Boolean mask of states reachable from ``y`` in one or more steps."""
    return reachable_from_set(adj, [y])


def reaching(adj: np.ndarray, targets) -> np.ndarray:
    """Boolean mask of states that reach ``targets`` in one or more steps.

    This is ``B = union over m >= 1 of {w : S^m(w, targets) > 0}``.
    """
    return reachable_from_set(adj.T, targets)


def reachable_from_set(adj: np.ndarray, sources) -> np.ndarray:
    """States reachable in one or more steps from any of ``sources``."""
    sources = np.asarray(list(sources), dtype=int)
    seen = adj[sources].any(axis=0) if sources.size else \
        np.zeros(adj.shape[0], dtype=bool)
    frontier = seen.copy()
    while frontier.any():
        new = adj[frontier].any(axis=0) & ~seen
        seen |= new
        frontier = new
    return seen


def reachability_matrix(adj: np.ndarray) -> np.ndarray:
    """``reach[y, z]`` iff ``z`` is reachable from ``y`` in >= 1 steps (BFS)."""
    return np.array([reachable_from(adj, y) for y in range(adj.shape[0])],
                    dtype=bool).reshape(adj.shape)


def reachability_by_powers(adj: np.ndarray) -> np.ndarray:
    """Same relation as :func:`reachability_matrix`, computed as
    ``OR_{n=1..|Y|} adj^n`` over the boolean semiring."""
    n = adj.shape[0]
    A = adj.astype(np.int64)
    power = A.copy()
    reach = power > 0
    for _ in range(n - 1):
        power = ((power @ A) > 0).astype(np.int64)
        reach |= power > 0
    return reach


# -- irreducibility ---------------------------------------------------------

def is_phi_irreducible(chain: FiniteChain,
                       threshold: float = 0.0) -> IrreducibilityVerdict:
    """Decide phi-irreducibility by reachability on the positivity pattern.

    When reducible, the witness ``y`` is the lowest-index state that misses
    some phi-positive state, and ``A`` is every phi-positive state it misses.
    """
    adj = positivity_digraph(chain.kernel, threshold)
    target = chain.phi.positive
    for y in range(len(chain)):
        missed = target & ~reachable_from(adj, y)
        if missed.any():
            return IrreducibilityVerdict(
                False, ReducibilityWitness(y, np.flatnonzero(missed).tolist()))
    return IrreducibilityVerdict(True)


def witness_is_valid(chain: FiniteChain, w: ReducibilityWitness,
                     threshold: float = 0.0) -> bool:
    """``phi(A) > 0`` and no state of ``A`` reachable from ``y``."""
    if not w.A or chain.phi.mass(w.A) <= 0:
        return False
    reach = reachable_from(positivity_digraph(chain.kernel, threshold), w.y)
    return not reach[sorted(w.A)].any()


def relocate_witness(chain: FiniteChain, w: ReducibilityWitness,
                     threshold: float = 0.0) -> int:
    """Return a start outside ``A`` that also never reaches ``A``.

    If ``w.y`` is already outside ``A`` it is returned unchanged.  Otherwise
    the states of the complement that do reach ``A`` are removed and the
    lowest remaining index is returned.
    """
    n = len(chain)
    A = np.zeros(n, dtype=bool)
    A[sorted(w.A)] = True
    if not A[w.y]:
        return w.y
    adj = positivity_digraph(chain.kernel, threshold)
    B = ~A & reaching(adj, np.flatnonzero(A))
    candidates = np.flatnonzero(~A & ~B)
    if candidates.size == 0:
        raise RuntimeError(
            "no state outside A avoids A; the witness was not valid")
    return int(candidates[0])


def closed_set_from_witness(chain: FiniteChain, w: ReducibilityWitness,
                            threshold: float = 0.0) -> ClosedSet:
    """Closed set ``C = complement(A) & complement(B)`` where ``B`` is every
    state that reaches ``A`` in one or more steps.

    Requires ``w.y`` outside ``A``; run :func:`relocate_witness` first
    otherwise.  The result contains ``y`` and its complement contains ``A``.
    """
    n = len(chain)
    A = np.zeros(n, dtype=bool)
    A[sorted(w.A)] = True
    if A[w.y]:
        raise ValueError("witness start lies in A; relocate it first")
    if not witness_is_valid(chain, w, threshold):
        raise ValueError("not a valid reducibility witness")
    adj = positivity_digraph(chain.kernel, threshold)
    B = reaching(adj, np.flatnonzero(A))
    return ClosedSet(np.flatnonzero(~A & ~B).tolist())


def is_closed(kernel: TransitionKernel, C, threshold: float = 0.0) -> bool:
    """``S(y, complement(C)) == 0`` for every ``y`` in ``C`` (pattern-exact)."""
    C = sorted(C)
    if not C:
        return False
    mask = np.ones(len(kernel), dtype=bool)
    mask[C] = False
    return not positivity_digraph(kernel, threshold)[np.ix_(C, mask)].any()


def find_closed_sets(chain: FiniteChain,
                     threshold: float = 0.0) -> ClosedSetReport:
    """Minimal closed sets (bottom strongly connected components).

    Every closed set contains one of them, so the chain is reducible iff
    the complement of some minimal closed set has positive phi-mass.
    Sets are listed in order of their lowest state index.
    """
    adj = positivity_digraph(chain.kernel, threshold)
    n_comp, comp = connected_components(csr_matrix(adj), directed=True,
                                        connection="strong")
    leaks = np.zeros(n_comp, dtype=bool)
    src, dst = np.nonzero(adj)
    leaks[comp[src][comp[src] != comp[dst]]] = True
    bottoms = [ClosedSet(np.flatnonzero(comp == c).tolist())
               for c in range(n_comp) if not leaks[c]]
    bottoms.sort(key=lambda cs: min(cs.C))
    positive = chain.phi.positive
    reducible = any(positive.sum() > positive[sorted(cs.C)].sum()
                    for cs in bottoms)
    return ClosedSetReport(bottoms, reducible)


def brute_force_reducible(chain: FiniteChain, threshold: float = 0.0) -> bool:
    """Exhaustive search for a closed ``C`` with ``phi(complement) > 0``."""
    n = len(chain)
    if n > BRUTE_FORCE_MAX_STATES:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_STATES} states, got {n}")
    adj = positivity_digraph(chain.kernel, threshold)
    out = [sum(1 << int(z) for z in np.flatnonzero(adj[y])) for y in range(n)]
    positive = sum(1 << i for i in np.flatnonzero(chain.phi.positive))
    full = (1 << n) - 1
    for C in range(1, 1 << n):
        outside = full & ~C
        if not positive & outside:
            continue
        if all(not (out[y] & outside) for y in range(n) if C >> y & 1):
            return True
    return False
