"""Tests for spectral-flow indices, the weight-lambda linearization, and the
shooting oracle."""

import numpy as np
import pytest

from equitrans import spectral
from equitrans.errors import InvalidInputError, NonHyperbolicError
from equitrans.spectral import (
    LambdaOperatorSpec,
    build_lambda_path,
    concatenate,
    constant_path,
    fredholm_index,
    index_by_shooting,
    kernel_dim_oracle,
    scalar_tanh_path,
    tanh_path,
    unstable_dim,
)


# ---------------------------------------------------------------------------
# eigenvalue counts
# ---------------------------------------------------------------------------


def test_unstable_dim_basic():
    assert unstable_dim(np.diag([-1.0, 2.0])) == 1
    assert unstable_dim(-np.eye(4)) == 4
    assert unstable_dim(np.eye(3)) == 0


def test_unstable_dim_counts_multiplicity_nonsymmetric():
    b = np.array([[-1.0, 5.0], [0.0, -1.0]])  # Jordan-ish block
    assert unstable_dim(b) == 2


def test_unstable_dim_rejects_near_axis():
    with pytest.raises(NonHyperbolicError):
        unstable_dim(np.diag([1e-9, 1.0]))
    with pytest.raises(NonHyperbolicError):
        unstable_dim(np.array([[0.0, -1.0], [1.0, 0.0]]))  # eigenvalues +-i


def test_fredholm_index_constant_zero():
    assert fredholm_index(constant_path(np.diag([-2.0, 3.0]))) == 0


def test_fredholm_index_tanh_is_one():
    assert fredholm_index(scalar_tanh_path()) == 1


def test_fredholm_index_reverse_tanh_is_minus_one():
    path = tanh_path([[0.0]], [[-1.0]])
    assert fredholm_index(path) == -1


def test_path_validation_rejects_drifting_tail():
    # the declared limit disagrees with the evaluator at +horizon
    path = spectral.MatrixPath(lambda s: [[np.tanh(s)]], 4.0, [[-1.0]], [[2.0]])
    with pytest.raises(InvalidInputError):
        path.validate()


def test_concatenation_additivity():
    p1 = scalar_tanh_path()
    p2 = tanh_path([[2.0]], [[1.0]])  # 1 -> 3, index 0
    glued = concatenate(p1, p2)
    assert fredholm_index(glued) == fredholm_index(p1) + fredholm_index(p2)
    rng = np.random.default_rng(0)
    for _ in range(5):
        d0 = np.diag(rng.choice([-2.0, -1.0, 1.0, 2.0], size=2))
        d1 = np.diag(rng.choice([-2.0, -1.0, 1.0, 2.0], size=2))
        q1 = tanh_path(np.zeros((2, 2)), d0)
        q2 = tanh_path(2 * d0 - (d0 + d1) / 1.0, (d1 - d0) / 1.0)
        # build q2 with matching inner limit: B2- = d0
        b2_minus = q2.b_minus
        if np.max(np.abs(b2_minus - q1.b_plus)) > 1e-8:
            continue
        assert fredholm_index(concatenate(q1, q2)) == fredholm_index(
            q1
        ) + fredholm_index(q2)


def test_homotopy_invariance_under_small_perturbation():
    rng = np.random.default_rng(12)
    base = tanh_path(np.diag([0.5, -0.5]), np.diag([1.0, -1.0]))
    idx = fredholm_index(base)
    for _ in range(50):
        delta = rng.normal(size=(2, 2)) * 0.05
        pert = spectral.MatrixPath(
            lambda s, d=delta: base.at(s) + d,
            base.horizon,
            base.b_minus + delta,
            base.b_plus + delta,
        )
        assert fredholm_index(pert) == idx


# ---------------------------------------------------------------------------
# weight-lambda paths
# ---------------------------------------------------------------------------


def test_lambda_path_zero_a_explicit_spectrum():
    # oracle: B^2 = (2 lambda pi)^2 I, eigenvalues +-2pi each twice for n=1
    spec = LambdaOperatorSpec(1, 1, lambda s: np.zeros((2, 2)))
    path = build_lambda_path(spec)
    b = path.at(0.0)
    assert np.allclose(b @ b, (2 * np.pi) ** 2 * np.eye(4), atol=1e-12)
    assert np.allclose(b, b.T)
    eig = np.sort(np.linalg.eigvals(b).real)
    assert np.allclose(eig, [-2 * np.pi, -2 * np.pi, 2 * np.pi, 2 * np.pi])


@pytest.mark.parametrize("weight", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_lambda_path_zero_a_index_zero(weight, n):
    spec = LambdaOperatorSpec(n, weight, lambda s: np.zeros((2 * n, 2 * n)))
    path = build_lambda_path(spec)
    assert unstable_dim(path.b_minus) == 2 * n
    assert unstable_dim(path.b_plus) == 2 * n
    assert fredholm_index(path) == 0


def test_lambda_path_small_tanh_a_index_zero():
    spec = LambdaOperatorSpec(
        1, 1, lambda s: 0.1 * np.tanh(s) * np.eye(2)
    )
    path = build_lambda_path(spec)
    assert fredholm_index(path) == 0


def test_lambda_path_seeded_small_a_index_zero():
    rng = np.random.default_rng(2718)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        lam = int(rng.integers(1, 6))
        a_minus = rng.normal(size=(2 * n, 2 * n))
        a_plus = rng.normal(size=(2 * n, 2 * n))
        for a in (a_minus, a_plus):
            a *= (np.pi / 2) / max(1.0, np.linalg.norm(a, 2))

        def a_path(s, am=a_minus, ap=a_plus):
            t = (np.tanh(s) + 1) / 2
            return (1 - t) * am + t * ap

        path = build_lambda_path(LambdaOperatorSpec(n, lam, a_path))
        assert unstable_dim(path.b_minus) == 2 * n
        assert unstable_dim(path.b_plus) == 2 * n
        assert fredholm_index(path) == 0


def test_lambda_path_rejects_large_a():
    spec = LambdaOperatorSpec(1, 1, lambda s: 7.0 * np.eye(2))
    with pytest.raises(NonHyperbolicError):
        build_lambda_path(spec)


def test_lambda_path_accepts_complex_a():
    spec = LambdaOperatorSpec(1, 1, lambda s: np.array([[0.3 + 0.2j]]))
    path = build_lambda_path(spec)
    assert fredholm_index(path) == 0


# ---------------------------------------------------------------------------
# shooting oracle
# ---------------------------------------------------------------------------


def test_oracle_constant_path_no_bounded_solutions():
    assert kernel_dim_oracle(constant_path(np.diag([-1.0, 2.0]))) == 0


def test_oracle_tanh_kernels_frozen():
    # u' = tanh(s) u has only the unbounded solution cosh(s): kernel 0;
    # the adjoint path -B has the bounded solution 1/cosh(s): kernel 1
    path = scalar_tanh_path()
    assert kernel_dim_oracle(path) == 0
    assert kernel_dim_oracle(path.adjoint()) == 1
    assert index_by_shooting(path) == 1 == fredholm_index(path)


def test_oracle_lambda_path_transverse():
    spec = LambdaOperatorSpec(1, 1, lambda s: np.zeros((2, 2)))
    path = build_lambda_path(spec)
    assert kernel_dim_oracle(path) == 0
    assert kernel_dim_oracle(path.adjoint()) == 0
    assert index_by_shooting(path) == 0


def test_oracle_matches_index_on_seeded_paths():
    rng = np.random.default_rng(31415)
    checked = 0
    for _ in range(20):
        size = int(rng.integers(1, 3))
        d_minus = np.diag(rng.choice([-2.0, -1.0, 1.0, 2.0], size=size))
        d_plus = np.diag(rng.choice([-2.0, -1.0, 1.0, 2.0], size=size))
        q = np.linalg.qr(rng.normal(size=(size, size)))[0]
        b0 = q @ ((d_minus + d_plus) / 2) @ q.T
        b1 = q @ ((d_plus - d_minus) / 2) @ q.T
        if np.min(np.abs(np.linalg.eigvals(b0 - b1).real)) < 0.5:
            continue
        if np.min(np.abs(np.linalg.eigvals(b0 + b1).real)) < 0.5:
            continue
        path = tanh_path(b0, b1)
        assert index_by_shooting(path) == fredholm_index(path)
        checked += 1
    assert checked >= 10
