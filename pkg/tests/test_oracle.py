import numpy as np
import pytest

from nullrig.errors import EvaluationError
from nullrig.oracle import FinDiffConfig, fd_derivative, fd_gradient, fd_hessian, fd_second


def test_derivative_of_exp():
    assert fd_derivative(lambda x: np.exp(x[0]), [0.3], 0) == pytest.approx(np.exp(0.3), abs=1e-10)


def test_gradient_of_vector_function_has_trailing_axis():
    f = lambda x: np.array([x[0] * x[1], np.sin(x[1])])  # noqa: E731
    g = fd_gradient(f, [2.0, 0.5])
    assert g.shape == (2, 2)
    assert np.allclose(g, [[0.5, 2.0], [0.0, np.cos(0.5)]], atol=1e-10)


def test_hessian_is_symmetric_and_accurate():
    f = lambda x: x[0] ** 2 * x[1] + np.cos(x[0] * x[1])  # noqa: E731
    p = np.array([0.7, -0.4])
    H = fd_hessian(f, p)
    c = np.cos(p[0] * p[1])
    s = np.sin(p[0] * p[1])
    exact = np.array([[2 * p[1] - p[1] ** 2 * c, 2 * p[0] - s - p[0] * p[1] * c],
                      [2 * p[0] - s - p[0] * p[1] * c, -p[0] ** 2 * c]])
    assert np.allclose(H, exact, atol=1e-8)
    assert fd_second(f, p, 0, 1) == pytest.approx(exact[0, 1], abs=1e-8)


def test_richardson_improves_on_plain_central_difference():
    f = lambda x: np.exp(3 * x[0])  # noqa: E731
    exact = 3 * np.exp(0.6)
    plain = fd_derivative(f, [0.2], 0, FinDiffConfig(step=1e-3, richardson_levels=1))
    rich = fd_derivative(f, [0.2], 0, FinDiffConfig(step=1e-3, richardson_levels=3))
    assert abs(rich - exact) < abs(plain - exact)


def test_non_finite_value_raises():
    with pytest.raises(EvaluationError), np.errstate(invalid="ignore"):
        fd_derivative(lambda x: np.log(x[0]), [0.0], 0)


@pytest.mark.parametrize("kw", [dict(step=0.0), dict(step=0.5), dict(second_step=1.0), dict(richardson_levels=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        FinDiffConfig(**kw)
