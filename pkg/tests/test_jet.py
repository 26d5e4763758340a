import numpy as np
import pytest

from nullrig import jet as J
from nullrig.oracle import fd_gradient, fd_hessian


def f_scalar(x):
    return np.sin(x[0]) * np.exp(x[1]) + x[0] ** 3 * x[1] - np.sqrt(2.0 + x[1] * x[1]) / (1.5 + np.cos(x[0]))


def test_lift_seeds_identity_gradient():
    x = J.lift([1.0, 2.0, 3.0], order=2)
    assert np.array_equal(x.value, [1.0, 2.0, 3.0])
    assert np.array_equal(x.grad, np.eye(3))
    assert np.all(x.hess == 0)


def test_lift_active_subset():
    x = J.lift([1.0, 2.0, 3.0], active=[2, 0], order=1)
    assert x.nvars == 2
    assert np.array_equal(x.grad, [[0, 1], [0, 0], [1, 0]])


def test_lift_rejects_bad_direction():
    with pytest.raises(ValueError):
        J.lift([1.0, 2.0], active=[3])


def test_scalar_derivatives_match_oracle():
    p = np.array([0.4, -0.3])
    y = f_scalar(J.lift(p, order=3))
    assert y.value == pytest.approx(f_scalar(p), abs=1e-15)
    assert np.allclose(y.grad, fd_gradient(f_scalar, p), atol=1e-8)
    assert np.allclose(y.hess, fd_hessian(f_scalar, p), atol=1e-6)


def test_third_derivative_of_polynomial_exact():
    # d^3/dx^2 dy of x^3 y = 6x
    y = J.lift([1.7, 0.5], order=3)
    z = y[0] ** 3 * y[1]
    assert z.c[3][0, 0, 1] == pytest.approx(6 * 1.7, abs=1e-12)
    assert z.c[3][1, 1, 1] == 0.0


def test_frozen_derivatives_of_composite():
    # d/dx sin(x) e^y at (0.4, -0.3) = cos(0.4) e^-0.3 [DERIVED: central differences]
    p = np.array([0.4, -0.3])
    y = J.lift(p, order=2)
    z = np.sin(y[0]) * np.exp(y[1])
    assert z.grad[0] == pytest.approx(0.682339, abs=1e-6)
    assert z.hess[0, 1] == pytest.approx(0.682339, abs=1e-6)


def test_matrix_inverse_derivative():
    p = np.array([0.3, 0.8])
    y = J.lift(p, order=2)

    def mat(x):
        return J.array([[2.0 + x[0], x[1]], [x[1], 3.0 - x[0] * x[1]]])

    inv = J.inv(mat(y))
    fval = lambda q: np.linalg.inv(np.asarray(J.value(mat(q))))  # noqa: E731
    assert np.allclose(inv.value, fval(p), atol=1e-14)
    assert np.allclose(inv.grad, fd_gradient(fval, p), atol=1e-8)
    assert np.allclose(inv.hess, fd_hessian(fval, p), atol=1e-6)


def test_einsum_on_mixed_operands():
    y = J.lift([0.5, 1.0], order=2)
    A = J.array([[y[0], 1.0], [0.0, y[1]]])
    v = np.array([1.0, 2.0])
    w = J.einsum("ij,j->i", A, v)
    assert np.allclose(w.value, [2.5, 2.0])
    assert np.allclose(w.grad, [[1.0, 0.0], [0.0, 2.0]])


def test_broadcast_product_of_array_jets():
    y = J.lift([0.5, 2.0], order=3)
    col = J.stack([y[0], y[1]]).reshape(2, 1)
    row = J.stack([y[1], y[0], y[0] * y[1]]).reshape(1, 3)
    prod = col * row
    assert prod.shape == (2, 3)
    # d^2 (y0 * y0 y1) / dy0 dy1 = 2 y0
    assert prod.c[2][0, 2, 0, 1] == pytest.approx(1.0)


def test_restrict_and_truncate():
    y = J.lift([0.5, 2.0, -1.0], order=3)
    z = y[0] * y[1] * y[2]
    r = z.restrict([0, 2])
    assert r.nvars == 2 and r.order == 3
    assert r.grad[1] == pytest.approx(0.5 * 2.0)
    assert z.truncate(1).order == 1


def test_value_of_plain_array():
    assert np.array_equal(J.value([1.0, 2.0]), np.array([1.0, 2.0]))
    with pytest.raises(TypeError):
        J.gradient(np.zeros(2))
