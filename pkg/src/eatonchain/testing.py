"""Random instance generators for property and oracle-equivalence tests."""
from __future__ import annotations

import numpy as np

from .chains import FiniteChain
from .finite_model import (Custom, FiniteModel, PointMass,
                           UniformOverPositivePrior)
from .partition import PartitionWitness


def _stochastic_row(rng, allowed: np.ndarray, density: float) -> np.ndarray:
    """Dirichlet row supported on a random nonempty subset of ``allowed``."""
    idx = np.flatnonzero(allowed)
    keep = idx[rng.random(idx.size) < density]
    if keep.size == 0:
        keep = rng.choice(idx, 1)
    row = np.zeros(allowed.size)
    row[keep] = rng.dirichlet(np.ones(keep.size))
    row[keep] /= row[keep].sum()
    return row


def _weights(rng, n: int, null_prob: float) -> np.ndarray:
    w = rng.uniform(0.1, 3.0, n) * (rng.random(n) >= null_prob)
    if not w.any():
        w[rng.integers(n)] = rng.uniform(0.1, 3.0)
    return w


def random_chain(rng, max_states: int = 8, null_prob: float = 0.3) -> FiniteChain:
    n = int(rng.integers(1, max_states + 1))
    density = rng.uniform(0.05, 0.6)
    S = np.array([_stochastic_row(rng, np.ones(n, bool), density)
                  for _ in range(n)])
    return FiniteChain.from_arrays(S, _weights(rng, n, null_prob))


def random_model(rng, max_theta: int = 6, max_x: int = 6,
                 null_prob: float = 0.3) -> FiniteModel:
    nt = int(rng.integers(1, max_theta + 1))
    nx = int(rng.integers(1, max_x + 1))
    density = rng.uniform(0.1, 0.7)
    P = np.array([_stochastic_row(rng, np.ones(nx, bool), density)
                  for _ in range(nt)])
    return FiniteModel.from_arrays(P, _weights(rng, nt, null_prob))


def planted_model(rng, max_theta: int = 6, max_x: int = 6,
                  null_prob: float = 0.3):
    """Model with a known witness ``(C, A)``.

    Rows in ``C`` live on ``A``; nu-positive rows outside ``C`` live off
    ``A``; nu-null rows outside ``C`` are unconstrained, which is what makes
    nontrivial M-null columns inside ``A`` possible.
    """
    nt = int(rng.integers(2, max_theta + 1))
    nx = int(rng.integers(2, max_x + 1))
    perm = rng.permutation(nt)
    cut = int(rng.integers(1, nt))
    C = np.zeros(nt, bool)
    C[perm[:cut]] = True
    xperm = rng.permutation(nx)
    xcut = int(rng.integers(1, nx))
    A = np.zeros(nx, bool)
    A[xperm[:xcut]] = True

    nu = _weights(rng, nt, null_prob)
    outside = np.flatnonzero(~C)
    if not (nu[outside] > 0).any():
        nu[rng.choice(outside)] = rng.uniform(0.1, 3.0)
    density = rng.uniform(0.2, 0.8)
    P = np.empty((nt, nx))
    for i in range(nt):
        if C[i]:
            allowed = A
        elif nu[i] > 0:
            allowed = ~A
        else:
            allowed = np.ones(nx, bool)
        P[i] = _stochastic_row(rng, allowed, density)
    model = FiniteModel.from_arrays(P, nu)
    return model, PartitionWitness(np.flatnonzero(C), np.flatnonzero(A))


def random_policy(rng, model: FiniteModel):
    n = model.shape[0]
    kind = rng.integers(3)
    if kind == 0:
        return PointMass(int(rng.integers(n)))
    if kind == 1:
        return UniformOverPositivePrior()
    p = rng.dirichlet(np.ones(n)) * (rng.random(n) < 0.6)
    if not p.any():
        p[rng.integers(n)] = 1.0
    return Custom(tuple(p / p.sum()))
