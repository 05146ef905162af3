import math

import numpy as np
import pytest

from casimir_mto.errors import ConvergenceError
from casimir_mto.numerics import adaptive_quadrature, geometric_edges


def test_polynomial_exact():
    res = adaptive_quadrature(lambda x: x**2, [0.0, 1.0], rel_tol=1e-12)
    assert res.value == pytest.approx(1.0 / 3.0, rel=1e-13)
    assert res.error <= 1e-12 * abs(res.value)


def test_exponential_tail_on_geometric_edges():
    edges = [0.0] + geometric_edges(1e-3, 60.0)
    res = adaptive_quadrature(lambda x: np.exp(-x), edges, rel_tol=1e-10)
    assert res.value == pytest.approx(1.0 - math.exp(-60.0), rel=1e-10)


def test_oscillatory_needs_refinement():
    res = adaptive_quadrature(lambda x: np.sin(10 * x), [0.0, math.pi / 2], rel_tol=1e-10)
    # integral of sin(10x) over [0, pi/2] = (1 - cos(5 pi))/10 = 0.2
    assert res.value == pytest.approx(0.2, rel=1e-10)
    assert res.evaluations > 15


def test_budget_exhaustion_carries_partial():
    f = lambda x: 1.0 / np.sqrt(np.abs(x) + 1e-12)
    with pytest.raises(ConvergenceError) as exc_info:
        adaptive_quadrature(f, [0.0, 1.0], rel_tol=1e-13, max_panels=4)
    partial = exc_info.value.partial
    assert partial is not None
    assert partial.value == pytest.approx(2.0, rel=0.1)


def test_bad_edges_rejected():
    with pytest.raises(ValueError):
        adaptive_quadrature(lambda x: x, [0.0])
    with pytest.raises(ValueError):
        adaptive_quadrature(lambda x: x, [1.0, 0.0])
    with pytest.raises(ValueError):
        geometric_edges(1.0, 0.5)


def test_error_estimate_is_honest():
    # Antiderivative of e^-x sin(3x) is e^-x (-sin(3x) - 3 cos(3x)) / 10.
    def antideriv(x):
        return math.exp(-x) * (-math.sin(3 * x) - 3 * math.cos(3 * x)) / 10

    exact = antideriv(math.pi) - antideriv(0.0)
    res = adaptive_quadrature(lambda x: np.exp(-x) * np.sin(3 * x),
                              [0.0, math.pi], rel_tol=1e-9)
    assert abs(res.value - exact) <= max(res.error, 1e-13)
