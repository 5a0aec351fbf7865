"""
Monte Carlo return-probability estimates.

The first return time to ``B`` is ``sigma_B = min{n >= 1 : W_n in B}``;
a start inside ``B`` does not count as a return.  Each replicate is a
trajectory of at most ``horizon`` steps, so the estimator targets
``Pr(sigma_B <= horizon)``, a lower bound for ``Pr(sigma_B < inf)``.
Censored runs are counted, never imputed.  Simulation can suggest that a
chain fails to be locally recurrent; it can never certify recurrence.

Replicate ``r`` draws from its own stream seeded by ``(seed, r)``, and
uniforms are consumed in the same order however the work is chunked, so
results are reproducible bitwise and nested horizons share trajectories.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chains import FiniteChain
from .worked_examples import ex1_sample_increment

Z95 = 1.959963984540054

CAVEAT = ("p_hat estimates Pr(sigma_B <= N), a lower bound for "
          "Pr(sigma_B < inf). Simulation can flag a start that fails to "
          "return; it cannot certify local recurrence.")


@dataclass(frozen=True)
class ReturnTimeConfig:
    """Start, target, horizon ``N`` and replicate count for a return study.

    For finite chains ``start`` is a state index and ``target`` a set of
    indices; for the random walk ``start`` is a real point and ``target`` a
    closed interval ``(lo, hi)``.
    """
    start: object
    target: object
    horizon: int = 1000
    replicates: int = 1000
    seed: int = 0

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError("horizon must be a positive integer")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ValueError("replicates must be a positive integer")


@dataclass(frozen=True)
class ReturnEstimate:
    p_hat: float
    ci_halfwidth: float
    censored_count: int
    replicates: int
    return_times: np.ndarray = field(repr=False, compare=False, default=None)

    @classmethod
    def from_times(cls, times: np.ndarray, horizon: int):
        """``times`` holds the return step per replicate, 0 when censored."""
        R = times.size
        returned = int(np.count_nonzero(times))
        p = returned / R
        half = Z95 * math.sqrt(p * (1 - p) / R)
        return cls(p, half, R - returned, R, times)


def _replicate_rngs(seed: int, replicates: int) -> list:
    return [np.random.default_rng([int(seed), r]) for r in range(replicates)]


def _chunks(horizon: int, first: int = 64, largest: int = 4096):
    done, size = 0, first
    while done < horizon:
        step = min(size, horizon - done)
        yield done, step
        done += step
        size = min(2 * size, largest)


def simulate_return_finite(chain: FiniteChain, cfg: ReturnTimeConfig,
                           rng=None) -> ReturnEstimate:
    """Estimate ``Pr_start(sigma_B <= N)`` for a finite chain.

    ``rng`` is accepted for interface symmetry; streams always derive from
    ``cfg.seed`` so that the estimate is a pure function of its inputs.
    """
    n = len(chain)
    start = int(cfg.start)
    target = sorted(int(b) for b in cfg.target)
    if not target:
        raise ValueError("target set must be nonempty")
    if not 0 <= start < n or target[0] < 0 or target[-1] >= n:
        raise IndexError("start or target index out of range")
    in_B = np.zeros(n, dtype=bool)
    in_B[target] = True
    cum = np.cumsum(chain.kernel.S, axis=1)
    cum[:, -1] = np.inf  # uniforms never fall past the last state

    rngs = _replicate_rngs(cfg.seed, cfg.replicates)
    times = np.zeros(cfg.replicates, dtype=np.int64)
    state = np.full(cfg.replicates, start, dtype=np.int64)
    active = np.arange(cfg.replicates)
    for offset, length in _chunks(cfg.horizon):
        if active.size == 0:
            break
        U = np.stack([rngs[r].random(length) for r in active])
        cur = state[active]
        alive = np.ones(active.size, dtype=bool)
        for t in range(length):
            rows = cum[cur]
            cur = np.where(alive, (rows <= U[:, t:t + 1]).sum(axis=1), cur)
            hit = alive & in_B[cur]
            times[active[hit]] = offset + t + 1
            alive &= ~hit
            if not alive.any():
                break
        state[active] = cur
        active = active[alive]
    return ReturnEstimate.from_times(times, cfg.horizon)


def exact_return_probability(chain: FiniteChain, start: int, target,
                             horizon: int) -> float:
    """``Pr_start(sigma_B <= N)`` by the taboo recursion.

    After the first step the chain is followed only on the complement of
    ``B``; the mass entering ``B`` at each step is accumulated.
    """
    S = chain.kernel.S
    in_B = np.zeros(len(chain), dtype=bool)
    in_B[sorted(int(b) for b in target)] = True
    v = S[int(start)].copy()
    total = v[in_B].sum()
    v = v[~in_B]
    taboo = S[np.ix_(~in_B, ~in_B)]
    entry = S[np.ix_(~in_B, in_B)].sum(axis=1)
    for _ in range(horizon - 1):
        total += v @ entry
        v = v @ taboo
    return float(min(total, 1.0))


def simulate_return_walk(cfg: ReturnTimeConfig, rng=None) -> ReturnEstimate:
    """Return-probability estimate for the triangular-increment random walk
    ``W_{n+1} = W_n + Z_{n+1}`` started at ``cfg.start``, target interval
    ``cfg.target = (lo, hi)`` (closed)."""
    lo, hi = (float(v) for v in cfg.target)
    if not hi > lo:
        raise ValueError("target interval must have positive length")
    start = float(cfg.start)
    times = np.zeros(cfg.replicates, dtype=np.int64)
    for r, g in enumerate(_replicate_rngs(cfg.seed, cfg.replicates)):
        pos = start
        for offset, length in _chunks(cfg.horizon):
            path = pos + np.cumsum(ex1_sample_increment(g, length))
            hit = np.flatnonzero((path >= lo) & (path <= hi))
            if hit.size:
                times[r] = offset + hit[0] + 1
                break
            pos = path[-1]
    return ReturnEstimate.from_times(times, cfg.horizon)


@dataclass(frozen=True)
class LocalRecurrenceReport:
    labels: tuple
    estimates: tuple
    horizon: int
    caveat: str = CAVEAT

    def table(self) -> str:
        width = max([len("start")] + [len(s) for s in self.labels])
        lines = [f"{'start':<{width}}  {'p_hat':>8}  {'ci95':>8}  {'censored':>8}"]
        for lab, est in zip(self.labels, self.estimates):
            lines.append(f"{lab:<{width}}  {est.p_hat:8.4f}  "
                         f"{est.ci_halfwidth:8.4f}  {est.censored_count:8d}")
        lines.append(f"horizon N = {self.horizon}. {self.caveat}")
        return "\n".join(lines)

    def machine_lines(self) -> list:
        return [f"{lab}, {est.p_hat!r}, {est.ci_halfwidth!r}, {est.censored_count}"
                for lab, est in zip(self.labels, self.estimates)]


def local_recurrence_report(chain: FiniteChain, B: Sequence[int],
                            starts: Sequence[int],
                            cfg: ReturnTimeConfig) -> LocalRecurrenceReport:
    """Return-probability estimate from each start in ``B`` back to ``B``.

    ``cfg`` supplies horizon, replicates and seed; its start/target are
    ignored.
    """
    B = sorted(int(b) for b in B)
    outside = [s for s in starts if int(s) not in B]
    if outside:
        raise ValueError(f"starts {outside} are not in B")
    estimates = []
    for s in starts:
        sub = ReturnTimeConfig(int(s), B, cfg.horizon, cfg.replicates, cfg.seed)
        estimates.append(simulate_return_finite(chain, sub))
    labels = tuple(chain.kernel.state_labels[int(s)] for s in starts)
    return LocalRecurrenceReport(labels, tuple(estimates), cfg.horizon)
