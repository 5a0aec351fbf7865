"""
The location-uniform and scale-uniform examples, in closed form and on grids.

Location-uniform: ``x | theta ~ Uniform(theta, theta + 1)`` with Lebesgue
prior.  Eaton's chain is the random walk whose increment is the difference
of two independent uniforms (triangular density on (-1, 1)).

Scale-uniform: ``x_1..x_n | theta`` i.i.d. ``Uniform[0, theta)`` with prior
``dtheta / theta``, plus a choice of what ``theta = 0`` means: a point mass
at the origin, or ``n`` unit exponentials.  The discretized model works with
the sufficient statistic ``t = max(x_i)``, whose density under ``theta`` is
``n t^(n-1) / theta^n`` on ``[0, theta)``; the origin atom ``t = 0`` stands
for the sample ``(0, ..., 0)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .finite_model import Custom, FiniteModel, WeightedMeasure

_SNAP = 1e-9


def _fmt(v: float) -> str:
    s = f"{v:.10g}"
    return "0" if s == "-0" else s


# -- location-uniform -------------------------------------------------------

def ex1_increment_density(z):
    """Triangular density ``1 - |z|`` on (-1, 1), zero elsewhere."""
    z = np.asarray(z, dtype=float)
    out = np.where((z > -1) & (z < 0), 1 + z, 0.0)
    out = np.where((z >= 0) & (z < 1), 1 - z, out)
    return out[()] if out.ndim == 0 else out


def ex1_increment_cdf(z):
    z = np.asarray(z, dtype=float)
    out = np.where(z <= 0, 0.5 * (1 + z) ** 2, 1 - 0.5 * (1 - z) ** 2)
    out = np.where(z <= -1, 0.0, np.where(z >= 1, 1.0, out))
    return out[()] if out.ndim == 0 else out


def ex1_transition_density(theta, eta):
    """Density of the next parameter ``eta`` given ``theta``."""
    return ex1_increment_density(np.asarray(eta, float) - np.asarray(theta, float))


def ex1_sample_increment(rng: np.random.Generator, size=None):
    """Draw increments as ``U1 - U2`` with independent standard uniforms."""
    u = rng.random(size=(2,) if size is None else (*np.atleast_1d(size), 2))
    return u[..., 0] - u[..., 1]


@dataclass(frozen=True)
class LocationUniformModel:
    """``p(x | theta) = 1`` on ``(theta, theta + 1)``; Lebesgue prior."""

    @staticmethod
    def sampling_density(x, theta):
        d = np.asarray(x, float) - np.asarray(theta, float)
        return np.where((d > 0) & (d < 1), 1.0, 0.0)

    transition_density = staticmethod(ex1_transition_density)

    def discretize(self, spec: "DiscretizationSpec") -> "Discretization":
        return ex1_discretize(spec)


# -- scale-uniform ---------------------------------------------------------

class ZeroVariant(enum.Enum):
    POINT_MASS_AT_ORIGIN = "pointmass"
    UNIT_EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class ScaleUniformModel:
    n: int
    zero_variant: ZeroVariant = ZeroVariant.POINT_MASS_AT_ORIGIN

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"sample size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "zero_variant", ZeroVariant(self.zero_variant))

    def discretize(self, spec: "DiscretizationSpec") -> "Discretization":
        return ex2_discretize(self.n, spec, self.zero_variant)


def ex2_posterior_density(theta, x_max: float, n: int):
    """``n x_max^n / theta^(n+1)`` for ``theta > x_max``, else 0."""
    if x_max <= 0:
        raise ValueError("posterior density needs x_max > 0; the origin "
                         "sample is handled by the null-column policy")
    if n < 1:
        raise ValueError("n must be >= 1")
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = n * (x_max / theta) ** n / theta
    out = np.where(theta > x_max, dens, 0.0)
    return out[()] if out.ndim == 0 else out


def ex2_posterior_tail(theta, x_max: float, n: int):
    """Posterior probability of ``(theta, inf)``: ``(x_max / theta)^n``."""
    theta = np.asarray(theta, dtype=float)
    return np.where(theta > x_max, (x_max / np.maximum(theta, x_max)) ** n, 1.0)


def ex2_marginal_density(x_max, n: int):
    """Marginal density ``1 / (n x_max^n)`` on the n-dimensional sample space."""
    x_max = np.asarray(x_max, dtype=float)
    if np.any(x_max <= 0):
        raise ValueError("marginal density needs x_max > 0")
    out = 1.0 / (n * x_max ** n)
    return out[()] if out.ndim == 0 else out


# -- discretizations ----------------------------------------------------------

@dataclass(frozen=True)
class DiscretizationSpec:
    lower: float
    upper: float
    h: float
    include_origin_atom: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError("grid bounds must be finite")
        if not self.lower < self.upper:
            raise ValueError("need lower < upper")
        if not self.h > 0:
            raise ValueError("spacing h must be positive")
        cells = (self.upper - self.lower) / self.h
        if round(cells) < 1 or abs(cells - round(cells)) > _SNAP * max(1.0, cells):
            raise ValueError(
                f"(upper - lower) / h = {cells!r} is not a positive integer")

    @property
    def n_cells(self) -> int:
        return int(round((self.upper - self.lower) / self.h))


@dataclass(frozen=True)
class Discretization:
    """A discretized model with the grid coordinates behind its labels.

    ``boundary_rows`` marks rows truncated at the grid edge and renormalized.
    """
    model: FiniteModel
    theta_points: np.ndarray
    x_points: np.ndarray
    boundary_rows: np.ndarray
    spec: DiscretizationSpec


def ex1_discretize(spec: DiscretizationSpec) -> Discretization:
    """Location-uniform model on a shared grid of spacing ``h``.

    Parameter nodes sit at ``lower + i h``; sample cells are
    ``[lower + j h, lower + (j + 1) h)``.  Row ``i`` spreads its mass over
    the cells meeting ``(theta_i, theta_i + 1)`` in proportion to overlap
    length.  Rows whose window leaves ``[lower, upper]`` are truncated and
    renormalized.  Prior weights are ``h`` (Lebesgue).
    """
    if spec.upper - spec.lower <= 2:
        raise ValueError("grid must be wider than 2 so interior rows exist")
    K, h = spec.n_cells, spec.h
    width = 1.0 / h
    i = np.arange(K, dtype=float)[:, None]
    j = np.arange(K, dtype=float)[None, :]
    overlap = np.clip(np.minimum(i + width, j + 1) - np.maximum(i, j), 0.0, 1.0)
    overlap[overlap < _SNAP] = 0.0
    boundary = (np.arange(K) + width) > K + _SNAP
    P = overlap / overlap.sum(axis=1, keepdims=True)
    theta = spec.lower + h * np.arange(K)
    x = spec.lower + h * (np.arange(K) + 0.5)
    model = FiniteModel(WeightedMeasure([_fmt(t) for t in theta], np.full(K, h)),
                        [_fmt(v) for v in x], P)
    return Discretization(model, theta, x, boundary, spec)


def ex1_kernel_interior(disc: Discretization) -> np.ndarray:
    """Rows whose kernel row is untouched by grid truncation.

    Row ``i`` of R depends on rows with parameter in ``[theta_i - 1,
    theta_i + 1]``, each of which must have its full window in the grid.
    """
    t = disc.theta_points
    return (t - 1 >= disc.spec.lower - _SNAP) & (t + 2 <= disc.spec.upper + _SNAP)


def _max_cdf(t, n):
    """CDF of the maximum of ``n`` unit exponentials."""
    return (-np.expm1(-np.asarray(t, float))) ** n


def ex2_discretize(n: int, spec: DiscretizationSpec,
                   variant=ZeroVariant.POINT_MASS_AT_ORIGIN) -> Discretization:
    """Scale-uniform model reduced to ``t = max(x_i)``.

    Sample grid: the origin atom plus cells ``[j h, (j + 1) h)`` of
    ``(0, upper)``.  Parameter grid: ``0`` plus the cell centers.  For
    ``theta > 0`` the cell mass is ``min(b/theta, 1)^n - min(a/theta, 1)^n``;
    the row for ``theta = 0`` follows ``variant``.  Prior weight of a cell
    centered at ``theta`` is ``h / theta``; ``theta = 0`` has weight 0.
    """
    variant = ZeroVariant(variant)
    if int(n) != n or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n!r}")
    if not spec.include_origin_atom:
        raise ValueError("the scale-uniform grid needs include_origin_atom=True")
    if spec.lower != 0:
        raise ValueError("the scale-uniform grid must start at 0")
    K, h = spec.n_cells, spec.h
    edges = h * np.arange(K + 1)
    centers = h * (np.arange(K) + 0.5)

    P = np.zeros((K + 1, K + 1))
    ratio = np.minimum(edges[None, :] / centers[:, None], 1.0) ** n
    P[1:, 1:] = np.diff(ratio, axis=1)
    boundary = np.zeros(K + 1, dtype=bool)
    if variant is ZeroVariant.POINT_MASS_AT_ORIGIN:
        P[0, 0] = 1.0
    else:
        P[0, 1:] = np.diff(_max_cdf(edges, n))
        boundary[0] = True
    P /= P.sum(axis=1, keepdims=True)

    theta = np.concatenate([[0.0], centers])
    nu = np.concatenate([[0.0], h / centers])
    labels = ["0"] + [_fmt(c) for c in centers]
    model = FiniteModel(WeightedMeasure(labels, nu), labels, P)
    return Discretization(model, theta, theta.copy(), boundary, spec)


def ex2_delta1_policy(disc: Discretization) -> Custom:
    """Unit-mean exponential over the parameter cells, for the version whose
    origin column has full support on the positive half-line."""
    edges = disc.spec.h * np.arange(disc.spec.n_cells + 1)
    p = np.concatenate([[0.0], -np.diff(np.exp(-edges))])
    return Custom(tuple(p / p.sum()))


def ex2_interior_cells(disc: Discretization, n: int) -> np.ndarray:
    """Sample cells away from the origin singularity and from truncation.

    Keeps cells with center ``t >= 1`` and ``(t / upper)^n <= h``, so the
    prior mass lost above ``upper`` biases the marginal by at most ``h``.
    """
    t = disc.x_points
    return (t >= 1.0) & ((t / disc.spec.upper) ** n <= disc.spec.h)
