import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halflearn.core import LabeledDataset, project_to_sphere
from halflearn.errors import DimensionMismatchError
from halflearn.surrogate import (
    SurrogateParams,
    empirical_surrogate_gradient,
    empirical_surrogate_loss,
    ramp_derivative,
    ramp_value,
)

from conftest import fd_directional_derivative, random_unit

SIGMAS = [0.05, 0.3, 1.0, 2.0]


def test_ramp_reference_values():
    p = SurrogateParams(1.0)
    assert ramp_value(0.0, p) == 0.5
    p = SurrogateParams(0.3)
    assert abs(ramp_value(0.3 / 6, p) - 2.0 / 3.0) < 1e-15
    assert ramp_value(0.3 / 2, p) == 1.0
    assert ramp_value(-0.5, SurrogateParams(0.5)) == 0.0
    assert ramp_value(10.0, p) == 1.0


def test_ramp_derivative_reference_values():
    assert ramp_derivative(0.0, SurrogateParams(1.0)) == 1.0
    p = SurrogateParams(2.0)
    # cubic and linear slopes agree at the inner knot: both equal 1/sigma
    knot = 2.0 / 6
    cubic_at_knot = (3 * p.a1 * knot + 2 * p.a2) * knot + p.a3
    assert abs(cubic_at_knot - 0.5) < 1e-14
    assert abs(ramp_derivative(knot, p) - 0.5) < 1e-14
    assert abs(ramp_derivative(np.nextafter(knot, 1.0), p) - 0.5) < 1e-12
    # cubic slope vanishes at the outer knot
    outer = 1.0
    assert abs((3 * p.a1 * outer + 2 * p.a2) * outer + p.a3) < 1e-15
    assert ramp_derivative(outer, p) == pytest.approx(0.0, abs=1e-15)
    assert ramp_derivative(0.9, SurrogateParams(1.0)) == 0.0


@pytest.mark.parametrize("sigma", SIGMAS)
def test_ramp_is_monotone_and_point_symmetric(sigma):
    p = SurrogateParams(sigma)
    ts = np.linspace(-2 * sigma, 2 * sigma, 20001)
    vals = ramp_value(ts, p)
    assert np.all(np.diff(vals) >= -1e-15)
    assert np.max(np.abs(vals + ramp_value(-ts, p) - 1.0)) <= 1e-12
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)


@pytest.mark.parametrize("sigma", SIGMAS)
def test_ramp_derivative_bounds_and_symmetry(sigma):
    p = SurrogateParams(sigma)
    ts = np.linspace(-1.5 * sigma, 1.5 * sigma, 100001)
    der = ramp_derivative(ts, p)
    assert np.max(np.abs(der - ramp_derivative(-ts, p))) <= 1e-12
    assert np.all(der >= 0.0)
    assert np.max(der) <= 2.5 / sigma
    # curvature of the cubic piece stays below 12/sigma^2 (attained at sigma/2)
    us = np.linspace(sigma / 6, sigma / 2, 10001)
    second = 6 * p.a1 * us + 2 * p.a2
    assert np.max(np.abs(second)) <= 12.0 / sigma**2 + 1e-9


@pytest.mark.parametrize("sigma", SIGMAS)
def test_ramp_is_c1_at_knots(sigma):
    p = SurrogateParams(sigma)

    def cubic(t):
        return ((p.a1 * t + p.a2) * t + p.a3) * t + p.a4

    def cubic_d(t):
        return (3 * p.a1 * t + 2 * p.a2) * t + p.a3

    inner, outer = sigma / 6, sigma / 2
    assert abs(cubic(inner) - (inner / sigma + 0.5)) <= 1e-10
    assert abs(cubic(outer) - 1.0) <= 1e-10
    assert abs(cubic_d(inner) - 1.0 / sigma) <= 1e-10
    assert abs(cubic_d(outer)) <= 1e-10
    # reflected piece stitches continuously as well
    assert abs(ramp_value(-inner, p) - (1.0 - cubic(inner))) <= 1e-12
    assert abs(ramp_value(-outer, p)) <= 1e-12


@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=-3, max_value=3))
@settings(max_examples=200, deadline=None)
def test_ramp_monotone_pairs(t1, t2):
    p = SurrogateParams(0.7)
    lo, hi = min(t1, t2), max(t1, t2)
    assert ramp_value(lo, p) <= ramp_value(hi, p) + 1e-15


def test_loss_examples():
    p = SurrogateParams(1.0)
    w = project_to_sphere([1.0, 0.0])
    all_correct = LabeledDataset(np.array([[2.0, 0.0], [-3.0, 1.0]]), np.array([1.0, -1.0]))
    assert empirical_surrogate_loss(all_correct, w, p) == 0.0
    midpoint = LabeledDataset(np.array([[0.0, 1.0], [0.0, -2.0]]), np.array([1.0, -1.0]))
    assert empirical_surrogate_loss(midpoint, w, p) == 0.5
    split = LabeledDataset(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([1.0, 1.0]))
    assert empirical_surrogate_loss(split, w, p) == 0.5
    with pytest.raises(DimensionMismatchError):
        empirical_surrogate_loss(split, project_to_sphere([1.0, 0, 0]), p)


def test_gradient_examples():
    p = SurrogateParams(1.0)
    w = project_to_sphere([1.0, 0.0])
    outside = LabeledDataset(np.array([[2.0, 5.0], [-4.0, 1.0]]), np.array([1.0, -1.0]))
    assert np.allclose(empirical_surrogate_gradient(outside, w, p), [0.0, 0.0])
    single = LabeledDataset(np.array([[0.0, 1.0]]), np.array([1.0]))
    assert np.allclose(empirical_surrogate_gradient(single, w, p), [0.0, -1.0])


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(2024)
    p = SurrogateParams(0.3)
    X = rng.standard_normal((200, 5))
    y = np.where(rng.random(200) < 0.5, 1.0, -1.0)
    S = LabeledDataset(X, y)
    w = random_unit(5, rng)
    g = empirical_surrogate_gradient(S, w, p)
    for _ in range(10):
        u = rng.standard_normal(5)
        u -= (u @ w.coords) * w.coords
        u /= np.linalg.norm(u)
        fd = fd_directional_derivative(S, w, p, u)
        an = float(g @ u)
        assert abs(fd - an) <= 1e-6 * max(abs(an), abs(fd), 1e-3)


def test_gradient_orthogonal_to_direction():
    rng = np.random.default_rng(5)
    p = SurrogateParams(0.4)
    for _ in range(20):
        X = rng.standard_normal((300, 4)) * rng.uniform(0.5, 3)
        y = np.where(rng.random(300) < 0.5, 1.0, -1.0)
        S = LabeledDataset(X, y)
        w = random_unit(4, rng)
        g = empirical_surrogate_gradient(S, w, p)
        max_norm = float(np.max(np.linalg.norm(X, axis=1)))
        assert abs(float(g @ w.coords)) <= 1e-9 * max_norm / p.sigma


def test_surrogate_params_validation():
    with pytest.raises(ValueError):
        SurrogateParams(0.0)
    with pytest.raises(ValueError):
        SurrogateParams(-1.0)
