"""Eaton's transition kernel ``R = P Q^T`` and its reversibility checks."""
from __future__ import annotations

from dataclasses import dataclass, InitVar

import numpy as np

from .finite_model import (STOCHASTIC_TOL, FiniteModel, ModelError,
                           PosteriorKernel, WeightedMeasure, verify_fpd)


@dataclass(frozen=True)
class TransitionKernel:
    """Row-stochastic matrix ``S`` over labelled states.

    ``atol`` is the allowed deviation of row sums from one; it defaults to
    the library-wide 1e-12 and is loosened only for long matrix powers.
    """

    state_labels: tuple
    S: np.ndarray
    atol: InitVar[float] = STOCHASTIC_TOL

    def __post_init__(self, atol):
        labels = tuple(str(s) for s in self.state_labels)
        S = np.array(np.atleast_2d(self.S), dtype=float)
        n = len(labels)
        if S.shape != (n, n):
            raise ModelError(f"kernel has shape {S.shape}, expected ({n}, {n})")
        if np.any(S < 0) or np.any(S > 1 + atol) or not np.all(np.isfinite(S)):
            raise ModelError("kernel entries must lie in [0, 1]")
        sums = S.sum(axis=1)
        off = np.abs(sums - 1.0) > atol
        if np.any(off):
            i = int(np.flatnonzero(off)[0])
            raise ModelError(f"row {i} sums to {float(sums[i])!r}")
        S.setflags(write=False)
        object.__setattr__(self, "state_labels", labels)
        object.__setattr__(self, "S", S)

    def __len__(self):
        return len(self.state_labels)

    def __eq__(self, other):
        if not isinstance(other, TransitionKernel):
            return NotImplemented
        return (self.state_labels == other.state_labels
                and np.array_equal(self.S, other.S))

    __hash__ = None


def build_eaton_kernel(model: FiniteModel, Q: PosteriorKernel,
                       tol: float = STOCHASTIC_TOL) -> TransitionKernel:
    """``R[i, k] = sum_j Q[k, j] P[i, j]``: sample x from theta_i, then a
    new parameter from the posterior at x.

    Raises ``ModelError`` if ``Q`` is not a formal posterior for ``model``
    at tolerance ``tol``.
    """
    report = verify_fpd(Q, model, tol)
    if not report.passed:
        raise ModelError(
            "Q is not a formal posterior for this model: identity violation "
            f"{report.max_identity_violation:.3g} at {report.worst_entry}, "
            f"column deviation {report.max_column_deviation:.3g}")
    R = model.P @ Q.Q.T
    return TransitionKernel(model.theta_labels, R)


@dataclass(frozen=True)
class ReversibilityReport:
    max_residual: float
    worst_pair: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def __bool__(self):
        return self.passed


def _weights(nu) -> np.ndarray:
    return nu.weights if isinstance(nu, WeightedMeasure) else np.asarray(nu, float)


def detailed_balance_residual(R: TransitionKernel, nu) -> np.ndarray:
    """Matrix of ``|nu_i R[i, k] - nu_k R[k, i]|``."""
    w = _weights(nu)
    if w.size != len(R):
        raise ModelError(f"measure has {w.size} points, kernel has {len(R)}")
    flow = w[:, None] * R.S
    return np.abs(flow - flow.T)


def check_reversibility(R: TransitionKernel, nu,
                        tol: float = STOCHASTIC_TOL) -> ReversibilityReport:
    """Entrywise detailed balance of ``R`` with respect to ``nu``."""
    resid = detailed_balance_residual(R, nu)
    worst = np.unravel_index(int(np.argmax(resid)), resid.shape)
    return ReversibilityReport(float(resid[worst]),
                               (int(worst[0]), int(worst[1])), tol)


def compare_versions(R1: TransitionKernel, R2: TransitionKernel, nu=None,
                     tol: float = 0.0) -> set:
    """Rows on which two kernels differ by more than ``tol`` (sup norm).

    For two versions built from formal posteriors of the same (P, nu) every
    returned row has ``nu_i == 0``.  ``nu`` is accepted only to check that
    its dimension matches; the magnitude of the disagreement is available
    from :func:`version_gap`.
    """
    if R1.state_labels != R2.state_labels:
        raise ModelError("kernels are defined on different state labels")
    if nu is not None and _weights(nu).size != len(R1):
        raise ModelError("measure and kernels differ in dimension")
    gap = version_gap(R1, R2)
    return {int(i) for i in np.flatnonzero(gap > tol)}


def version_gap(R1: TransitionKernel, R2: TransitionKernel) -> np.ndarray:
    """Per-row sup-norm distance between two kernels."""
    if R1.S.shape != R2.S.shape:
        raise ModelError("kernels differ in dimension")
    return np.max(np.abs(R1.S - R2.S), axis=1)
