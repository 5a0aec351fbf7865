import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eatonchain.finite_model import FiniteModel, ModelError, PointMass, build_fpd
from eatonchain.kernel import (TransitionKernel, build_eaton_kernel,
                               check_reversibility, compare_versions,
                               version_gap)
from eatonchain.testing import random_model, random_policy
from eatonchain.worked_examples import (DiscretizationSpec, ZeroVariant,
                                        ex2_delta1_policy, ex2_discretize)


def test_kernel_validation():
    with pytest.raises(ModelError, match="row 0 sums"):
        TransitionKernel(["a", "b"], [[0.5, 0.4], [0, 1]])
    with pytest.raises(ModelError):
        TransitionKernel(["a", "b"], [[1.0]])
    k = TransitionKernel(["a", "b"], np.eye(2))
    assert k == TransitionKernel(["a", "b"], np.eye(2))


def test_identity_model_kernel():
    model = FiniteModel.from_arrays(np.eye(2), [1, 1])
    R = build_eaton_kernel(model, build_fpd(model))
    assert np.array_equal(R.S, np.eye(2))


def test_symmetric_model_kernel():
    model = FiniteModel.from_arrays([[0.5, 0.5], [0.5, 0.5]], [1, 3])
    R = build_eaton_kernel(model, build_fpd(model))
    np.testing.assert_allclose(R.S, [[0.25, 0.75], [0.25, 0.75]], atol=1e-15)


def test_build_rejects_non_fpd():
    model = FiniteModel.from_arrays([[0.5, 0.5], [0.5, 0.5]], [1, 3])
    Q = build_fpd(FiniteModel.from_arrays(np.eye(2), [1, 1]))
    with pytest.raises(ModelError, match="not a formal posterior"):
        build_eaton_kernel(model, Q)


def test_reversibility_examples():
    swap = TransitionKernel(["0", "1"], [[0, 1], [1, 0]])
    report = check_reversibility(swap, [1, 2], 1e-12)
    assert not report.passed
    assert report.max_residual == 1.0
    assert check_reversibility(TransitionKernel(["0", "1"], np.eye(2)), [1, 7])
    with pytest.raises(ModelError):
        check_reversibility(swap, [1, 2, 3])


def test_reversibility_is_symmetric_algebraically():
    # nu_i R_ik = sum_j Q_kj Q_ij M_j, so the flow matrix is symmetric
    rng = np.random.default_rng(3)
    model = random_model(rng, 6, 6)
    Q = build_fpd(model)
    M = model.nu @ model.P
    flow = (Q.Q * M) @ Q.Q.T
    R = build_eaton_kernel(model, Q)
    np.testing.assert_allclose(model.nu[:, None] * R.S, flow, atol=1e-14)
    np.testing.assert_allclose(flow, flow.T, atol=1e-15)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_detailed_balance_any_policy(seed):
    rng = np.random.default_rng(seed)
    model = random_model(rng)
    R = build_eaton_kernel(model, build_fpd(model, random_policy(rng, model)))
    assert check_reversibility(R, model.theta_space, 1e-12).passed
    # detailed balance => nu is invariant
    np.testing.assert_allclose(model.nu @ R.S, model.nu, atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_versions_agree_on_positive_rows(seed):
    rng = np.random.default_rng(seed)
    model = random_model(rng)
    R1 = build_eaton_kernel(model, build_fpd(model, random_policy(rng, model)))
    R2 = build_eaton_kernel(model, build_fpd(model, random_policy(rng, model)))
    rows = compare_versions(R1, R2, model.theta_space, tol=0.0)
    assert all(model.nu[i] == 0 for i in rows)


def test_compare_identical_kernels():
    R = TransitionKernel(["a", "b"], [[0.5, 0.5], [0.2, 0.8]])
    assert compare_versions(R, R) == set()
    with pytest.raises(ModelError):
        compare_versions(R, TransitionKernel(["a", "c"], np.eye(2)))


def test_scale_uniform_versions_differ_only_at_origin():
    disc = ex2_discretize(2, DiscretizationSpec(0, 5, 0.25, True),
                          ZeroVariant.POINT_MASS_AT_ORIGIN)
    model = disc.model
    R0 = build_eaton_kernel(model, build_fpd(model, PointMass(0)))
    R1 = build_eaton_kernel(model, build_fpd(model, ex2_delta1_policy(disc)))
    assert compare_versions(R0, R1, model.theta_space) == {0}
    assert version_gap(R0, R1)[0] > 0.5
