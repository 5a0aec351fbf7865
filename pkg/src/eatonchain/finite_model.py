"""
Discretized model/prior pairs and their formal posterior distributions.

A statistical model on finite grids is a row-stochastic matrix ``P`` with
``P[i, j]`` the probability of sample point ``x_j`` under parameter
``theta_i``.  An improper prior is an unnormalized weight vector ``nu`` on
the parameter grid (truncation of an infinite measure).  Weights that are
exactly zero model nu-null sets; "nu-almost everywhere" therefore means "at
every grid point with positive weight".

The marginal measure is ``M_j = sum_i P[i, j] nu_i``.  A formal posterior
distribution (FPD) is any column-stochastic ``Q`` with

    Q[i, j] * M_j == P[i, j] * nu_i      for every (i, j),

which pins ``Q`` down on columns with ``M_j > 0`` and leaves the M-null
columns free.  How those columns are filled is what distinguishes one
*version* of the posterior from another; see :class:`PointMass`,
:class:`UniformOverPositivePrior` and :class:`Custom`.

M is sigma-finite automatically on a finite grid, so no check is exposed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

STOCHASTIC_TOL = 1e-12


class ModelError(ValueError):
    """A model, measure or kernel violates its structural invariants."""


class DegenerateModelError(ModelError):
    """The marginal measure has no positive entry."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WeightedMeasure:
    """Finite measure: unique labels with nonnegative finite weights.

    Used for the prior ``nu``, the marginal ``M`` and the reference measure
    ``phi`` of a generic chain.  Weights need not sum to one.
    """

    labels: tuple
    weights: np.ndarray

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        weights = _frozen(np.asarray(self.weights, dtype=float).ravel())
        if len(labels) != weights.size:
            raise ModelError(
                f"{len(labels)} labels but {weights.size} weights")
        if len(set(labels)) != len(labels):
            seen, dup = set(), None
            for lab in labels:
                if lab in seen:
                    dup = lab
                    break
                seen.add(lab)
            raise ModelError(f"duplicate label {dup!r}")
        if not np.all(np.isfinite(weights)):
            raise ModelError("weights must be finite")
        if np.any(weights < 0):
            i = int(np.flatnonzero(weights < 0)[0])
            raise ModelError(f"weight of {labels[i]!r} is negative")
        if not np.any(weights > 0):
            raise ModelError("at least one weight must be positive")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.labels)

    @property
    def positive(self) -> np.ndarray:
        """Boolean mask of points carrying positive mass."""
        return self.weights > 0

    def mass(self, indices) -> float:
        idx = np.asarray(sorted(indices), dtype=int)
        return float(self.weights[idx].sum()) if idx.size else 0.0

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None


@dataclass(frozen=True)
class FiniteModel:
    """Discretized statistical model ``P`` together with its prior.

    Parameters
    ----------
    theta_space : WeightedMeasure
        Parameter grid; its weights are the prior ``nu``.
    x_labels : sequence of str
        Sample-space grid.
    P : array_like, shape (n_theta, n_x)
        ``P[i, j]`` is the probability of ``x_j`` given ``theta_i``.
    """

    theta_space: WeightedMeasure
    x_labels: tuple
    P: np.ndarray

    def __post_init__(self):
        x_labels = tuple(str(lab) for lab in self.x_labels)
        if len(set(x_labels)) != len(x_labels):
            raise ModelError("x labels must be unique")
        P = _frozen(np.atleast_2d(np.asarray(self.P, dtype=float)))
        n_theta, n_x = len(self.theta_space), len(x_labels)
        if P.shape != (n_theta, n_x):
            raise ModelError(
                f"P has shape {P.shape}, expected ({n_theta}, {n_x})")
        if not np.all(np.isfinite(P)):
            raise ModelError("P contains non-finite entries")
        bad = np.argwhere((P < 0) | (P > 1))
        if bad.size:
            i, j = bad[0]
            raise ModelError(f"P[{i}][{j}] = {P[i, j]!r} is outside [0, 1]")
        sums = P.sum(axis=1)
        off = np.abs(sums - 1.0) > STOCHASTIC_TOL
        if np.any(off):
            i = int(np.flatnonzero(off)[0])
            raise ModelError(f"row {i} sums to {float(sums[i])!r}")
        object.__setattr__(self, "x_labels", x_labels)
        object.__setattr__(self, "P", P)

    @property
    def nu(self) -> np.ndarray:
        return self.theta_space.weights

    @property
    def theta_labels(self) -> tuple:
        return self.theta_space.labels

    @property
    def shape(self):
        return self.P.shape

    @classmethod
    def from_arrays(cls, P, nu, theta_labels=None, x_labels=None):
        """Build a model from bare arrays, labelling points by index."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if theta_labels is None:
            theta_labels = [f"t{i}" for i in range(P.shape[0])]
        if x_labels is None:
            x_labels = [f"x{j}" for j in range(P.shape[1])]
        return cls(WeightedMeasure(theta_labels, nu), x_labels, P)


# -- null-column policies ----------------------------------------------------

@dataclass(frozen=True)
class PointMass:
    """Fill every M-null column with the point mass at one theta-index."""
    index: int

    def distribution(self, model: FiniteModel) -> np.ndarray:
        n = model.shape[0]
        if not (0 <= self.index < n):
            raise ValueError(
                f"point-mass index {self.index} out of range for {n} "
                "parameter points")
        d = np.zeros(n)
        d[self.index] = 1.0
        return d

    def describe(self, model: FiniteModel) -> str:
        return f"pointmass:{model.theta_labels[self.index]}"


@dataclass(frozen=True)
class UniformOverPositivePrior:
    """Fill M-null columns uniformly over theta-points with ``nu > 0``."""

    def distribution(self, model: FiniteModel) -> np.ndarray:
        pos = model.nu > 0
        return pos / pos.sum()

    def describe(self, model: FiniteModel) -> str:
        return "uniform"


@dataclass(frozen=True)
class Custom:
    """Fill M-null columns with an explicit distribution over theta."""
    probabilities: tuple = field(default=())

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).ravel()
        if p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ModelError("custom distribution must be a nonempty "
                             "nonnegative vector")
        if abs(p.sum() - 1.0) > STOCHASTIC_TOL:
            raise ModelError(
                f"custom distribution sums to {float(p.sum())!r}, not 1")
        object.__setattr__(self, "probabilities", tuple(p.tolist()))

    def distribution(self, model: FiniteModel) -> np.ndarray:
        p = np.asarray(self.probabilities)
        if p.size != model.shape[0]:
            raise ModelError(
                f"custom distribution has {p.size} entries, model has "
                f"{model.shape[0]} parameter points")
        return p

    def describe(self, model: FiniteModel) -> str:
        return "custom"


NullColumnPolicy = Union[PointMass, UniformOverPositivePrior, Custom]


@dataclass(frozen=True)
class PosteriorKernel:
    """Column-stochastic formal posterior ``Q`` (shape n_theta x n_x)."""

    Q: np.ndarray
    null_columns: frozenset
    policy_tag: str

    def __post_init__(self):
        Q = _frozen(self.Q)
        sums = Q.sum(axis=0)
        off = np.abs(sums - 1.0) > STOCHASTIC_TOL
        if np.any(off):
            j = int(np.flatnonzero(off)[0])
            raise ModelError(f"column {j} of Q sums to {float(sums[j])!r}")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "null_columns",
                           frozenset(int(j) for j in self.null_columns))

    def replace_columns(self, columns, distribution, policy_tag):
        """Copy of this kernel with ``columns`` overwritten by ``distribution``."""
        Q = np.array(self.Q)
        cols = sorted(columns)
        if cols:
            Q[:, cols] = np.asarray(distribution, dtype=float)[:, None]
        return PosteriorKernel(Q, self.null_columns, policy_tag)


# -- operations ----------------------------------------------------------------

def marginal(model: FiniteModel) -> WeightedMeasure:
    """Marginal measure ``M_j = sum_i P[i, j] nu_i`` on the sample grid.

    Raises
    ------
    DegenerateModelError
        If every marginal weight is zero (cannot happen for a valid model,
        whose prior has positive mass and whose rows are stochastic).
    """
    M = model.nu @ model.P
    try:
        return WeightedMeasure(model.x_labels, M)
    except ModelError as exc:
        raise DegenerateModelError(str(exc)) from exc


def null_columns(model: FiniteModel, threshold: float = 0.0) -> np.ndarray:
    """Indices ``j`` with ``M_j <= threshold`` (exactly zero by default)."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    M = model.nu @ model.P
    return np.flatnonzero(M <= threshold)


def build_fpd(model: FiniteModel, policy: NullColumnPolicy = None,
              null_threshold: float = 0.0) -> PosteriorKernel:
    """Formal posterior by Bayes rule, M-null columns filled by ``policy``.

    ``null_threshold`` treats columns with ``M_j <= null_threshold`` as null;
    the default 0 uses exact zeros.  A positive threshold is meant only for
    matrices entered with rounding noise, and the result then satisfies the
    FPD identity only up to the discarded mass.
    """
    if policy is None:
        policy = UniformOverPositivePrior()
    M = model.nu @ model.P
    if not np.any(M > 0):
        raise DegenerateModelError("marginal measure is identically zero")
    fill = policy.distribution(model)
    null = null_columns(model, null_threshold)
    live = np.ones(M.size, dtype=bool)
    live[null] = False
    Q = np.empty(model.shape)
    joint = model.P[:, live] * model.nu[:, None]
    Q[:, live] = joint / M[live]
    Q[:, ~live] = fill[:, None]
    return PosteriorKernel(Q, frozenset(null.tolist()),
                           policy.describe(model))


@dataclass(frozen=True)
class FPDReport:
    max_identity_violation: float
    worst_entry: tuple
    max_column_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return (self.max_identity_violation <= self.tol
                and self.max_column_deviation <= self.tol)

    def __bool__(self):
        return self.passed


def verify_fpd(Q, model: FiniteModel, tol: float = STOCHASTIC_TOL) -> FPDReport:
    """Check ``Q[i, j] M_j == P[i, j] nu_i`` entrywise and column sums of Q.

    On a finite grid the rectangle form of the identity (sums over A x B) is
    equivalent to the entrywise form, so the entrywise maximum is reported.
    """
    Qm = Q.Q if isinstance(Q, PosteriorKernel) else np.asarray(Q, float)
    if Qm.shape != model.shape:
        raise ModelError(
            f"Q has shape {Qm.shape}, model has shape {model.shape}")
    M = model.nu @ model.P
    resid = np.abs(Qm * M[None, :] - model.P * model.nu[:, None])
    worst = np.unravel_index(int(np.argmax(resid)), resid.shape)
    col_dev = float(np.max(np.abs(Qm.sum(axis=0) - 1.0)))
    return FPDReport(float(resid[worst]), (int(worst[0]), int(worst[1])),
                     col_dev, tol)


def support(model: FiniteModel, tau: float = 0.0) -> np.ndarray:
    """Boolean support pattern ``P > tau``."""
    if tau < 0:
        raise ValueError("support threshold must be nonnegative")
    return model.P > tau
