import numpy as np
import pytest
from scipy import integrate, stats

from eatonchain.finite_model import build_fpd, marginal
from eatonchain.kernel import build_eaton_kernel
from eatonchain.worked_examples import (DiscretizationSpec, ScaleUniformModel,
                                        LocationUniformModel, ZeroVariant,
                                        ex1_discretize, ex1_increment_cdf,
                                        ex1_increment_density,
                                        ex1_kernel_interior,
                                        ex1_sample_increment,
                                        ex1_transition_density,
                                        ex2_delta1_policy, ex2_discretize,
                                        ex2_interior_cells,
                                        ex2_marginal_density,
                                        ex2_posterior_density,
                                        ex2_posterior_tail)


# -- triangular increment --------------------------------------------------------

def test_increment_density_values():
    assert ex1_increment_density(0) == 1
    assert ex1_increment_density(0.5) == 0.5
    assert ex1_increment_density(-0.5) == 0.5
    assert ex1_increment_density(1.2) == 0 and ex1_increment_density(-1.2) == 0


def test_increment_density_integrates_to_one_and_is_even():
    total, err = integrate.quad(ex1_increment_density, -1, 1, points=[0])
    assert abs(total - 1) <= 1e-10
    z = np.random.default_rng(0).uniform(-2, 2, 10_000)
    assert np.array_equal(ex1_increment_density(z), ex1_increment_density(-z))


def test_increment_cdf_matches_density():
    z = np.linspace(-1.5, 1.5, 61)
    num = [integrate.quad(ex1_increment_density, -1, b, points=[0])[0]
           if b > -1 else 0.0 for b in z]
    np.testing.assert_allclose(ex1_increment_cdf(z), num, atol=1e-10)
    # z + z^2/2 + 1/2 on (-1, 0)
    assert ex1_increment_cdf(-0.5) == pytest.approx(0.125)


def test_transition_density_values():
    assert ex1_transition_density(3, 3) == 1
    assert ex1_transition_density(3, 3.25) == 0.75
    rng = np.random.default_rng(1)
    th, eta, c = rng.normal(size=(3, 1000))
    # shifting both arguments only perturbs eta - theta by rounding
    np.testing.assert_allclose(ex1_transition_density(th, eta),
                               ex1_transition_density(th + c, eta + c), atol=1e-12)


def test_transition_density_integrates_to_one():
    for th in np.random.default_rng(2).normal(scale=5, size=5):
        total, _ = integrate.quad(lambda e: ex1_transition_density(th, e),
                                  th - 1, th + 1, points=[th])
        assert abs(total - 1) <= 1e-10


def test_location_model_density():
    m = LocationUniformModel()
    assert m.sampling_density(0.5, 0) == 1 and m.sampling_density(1.5, 0) == 0


def test_sampler_moments_and_ks():
    z = ex1_sample_increment(np.random.default_rng(12345), 10**6)
    assert np.all((z > -1) & (z < 1))
    assert abs(z.mean()) <= 0.002
    assert abs(np.mean((z > 0) & (z < 0.5)) - 0.375) <= 0.002
    assert stats.kstest(z, ex1_increment_cdf).statistic <= 0.002


def test_sampler_scalar_and_determinism():
    a = ex1_sample_increment(np.random.default_rng(7))
    b = ex1_sample_increment(np.random.default_rng(7))
    assert np.ndim(a) == 0 and a == b


# -- discretization spec -----------------------------------------------------------

@pytest.mark.parametrize("args", [(1, 0, 0.1), (0, 1, 0), (0, 1, 0.3),
                                  (0, np.inf, 0.1)])
def test_spec_rejects_bad_grids(args):
    with pytest.raises(ValueError):
        DiscretizationSpec(*args)


def test_spec_cell_count():
    assert DiscretizationSpec(-4, 4, 0.01).n_cells == 800


# -- location-uniform grid ----------------------------------------------------------

def test_ex1_interior_row_is_aligned():
    disc = ex1_discretize(DiscretizationSpec(-4, 4, 0.25))
    P = disc.model.P
    interior = np.flatnonzero(~disc.boundary_rows)
    for i in interior:
        row = P[i][P[i] > 0]
        assert row.size == 4 and np.allclose(row, 0.25, atol=1e-15)
    assert np.all(disc.model.nu == 0.25)


def test_ex1_rows_stochastic_and_adjacent_supports_overlap():
    for h in (0.25, 0.1, 0.05):
        disc = ex1_discretize(DiscretizationSpec(-4, 4, h))
        P = disc.model.P
        assert np.abs(P.sum(axis=1) - 1).max() <= 1e-12
        supp = P > 0
        assert all((supp[i] & supp[i + 1]).any() for i in range(len(P) - 1))


def test_ex1_needs_wide_grid():
    with pytest.raises(ValueError):
        ex1_discretize(DiscretizationSpec(0, 2, 0.25))


def test_ex1_kernel_matches_triangle():
    h = 0.05
    disc = ex1_discretize(DiscretizationSpec(-4, 4, h))
    R = build_eaton_kernel(disc.model, build_fpd(disc.model)).S
    t = disc.theta_points
    exact = ex1_transition_density(t[:, None], t[None, :]) * h
    rows = ex1_kernel_interior(disc)
    assert rows.any()
    assert np.abs(R[rows] - exact[rows]).max() <= 2 * h


# -- scale-uniform closed forms -------------------------------------------------------

def test_ex2_posterior_values():
    assert ex2_posterior_density(2, 1, 2) == 0.25
    assert ex2_posterior_density(0.5, 1, 2) == 0 and ex2_posterior_density(1, 1, 2) == 0
    with pytest.raises(ValueError):
        ex2_posterior_density(1, 0, 2)


def test_ex2_posterior_normalization():
    for n, x in [(1, 0.5), (2, 1.0), (3, 2.0), (5, 0.1)]:
        total, _ = integrate.quad(ex2_posterior_density, x, 1e6, args=(x, n),
                                  limit=200, points=[10 * x, 100 * x])
        assert abs(total - 1) <= 1e-6


def test_ex2_posterior_tail_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        x = rng.uniform(0.1, 5)
        th = x * rng.uniform(1.01, 20)
        num, _ = integrate.quad(ex2_posterior_density, th, np.inf, args=(x, n),
                                epsabs=1e-14, epsrel=1e-11)
        assert num == pytest.approx(ex2_posterior_tail(th, x, n), rel=1e-8)


def test_ex2_marginal_values():
    assert ex2_marginal_density(1, 2) == 0.5
    assert ex2_marginal_density(2, 1) == 0.5
    with pytest.raises(ValueError):
        ex2_marginal_density(0, 1)


def test_scale_uniform_model_validation():
    with pytest.raises(ValueError):
        ScaleUniformModel(0)
    m = ScaleUniformModel(2, "exponential")
    assert m.zero_variant is ZeroVariant.UNIT_EXPONENTIAL


# -- scale-uniform grid ------------------------------------------------------------

@pytest.mark.parametrize("variant", list(ZeroVariant))
def test_ex2_rows_stochastic(variant):
    disc = ex2_discretize(3, DiscretizationSpec(0, 10, 0.1, True), variant)
    assert np.abs(disc.model.P.sum(axis=1) - 1).max() <= 1e-12
    assert disc.model.nu[0] == 0
    assert disc.boundary_rows[0] == (variant is ZeroVariant.UNIT_EXPONENTIAL)


def test_ex2_requires_origin_atom():
    with pytest.raises(ValueError):
        ex2_discretize(2, DiscretizationSpec(0, 10, 0.1))
    with pytest.raises(ValueError):
        ex2_discretize(2, DiscretizationSpec(1, 10, 0.1, True))


def test_ex2_marginal_matches_closed_form():
    # the grid lives on t = max(x); its density is n t^(n-1) times the
    # density on the full sample space, so each cell should carry about h / t
    for n in (1, 2, 3):
        for h in (0.1, 0.05):
            disc = ex2_discretize(n, DiscretizationSpec(0, 40, h, True))
            M = marginal(disc.model).weights
            t = disc.x_points
            cells = ex2_interior_cells(disc, n)
            assert cells.any()
            target = ex2_marginal_density(t[cells], n) * n * t[cells] ** (n - 1) * h
            assert np.abs(M[cells] / target - 1).max() <= 3 * h


def test_ex2_posterior_columns_match_density():
    n, h = 2, 0.05
    disc = ex2_discretize(n, DiscretizationSpec(0, 40, h, True))
    Q = build_fpd(disc.model).Q
    t = disc.x_points
    for j in np.flatnonzero(ex2_interior_cells(disc, n)):
        rows = np.flatnonzero(t >= t[j] + h)
        exact = ex2_posterior_density(t[rows], t[j], n) * h
        assert np.abs(Q[rows, j] / exact - 1).max() <= 3 * h


def test_delta1_policy_support():
    disc = ex2_discretize(2, DiscretizationSpec(0, 5, 0.25, True))
    p = np.array(ex2_delta1_policy(disc).probabilities)
    assert p[0] == 0 and np.all(p[1:] > 0)
    assert p.sum() == pytest.approx(1, abs=1e-12)
