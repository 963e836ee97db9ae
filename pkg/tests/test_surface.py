import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from kspheres._common import Budget, DomainError, ResourceError
from kspheres.surface import (
    DEFAULT_BUMP, QuadratureConfig, decay_fit, hardy_localization, hardy_sweep, make_bump, sigma_hat_axis,
    sigma_hat_bessel, sigma_hat_cone, sigma_hat_shell, sigma_hat_theta, sigma_hat_unit, sphere_volume,
    surface_ft, theta_1d, theta_1d_gauss, theta_1d_series, theta_integral, theta_lattice_1d, theta_lattice_sum,
)


def test_volume_formula():
    # k = 2: Gelfand-Leray mass of {|x|^2 = 1} is half the Euclidean area
    assert sphere_volume(2, 2) == pytest.approx(np.pi)
    assert sphere_volume(2, 3) == pytest.approx(2 * np.pi)
    # d = 1: two points with weight 1/|Phi'| = 1/k each
    assert sphere_volume(3, 1) == pytest.approx(2 / 3)


@pytest.mark.parametrize("k,d", [(2, 2), (3, 2), (4, 2), (3, 3)])
def test_mass_at_zero(k, d):
    v, e, _ = sigma_hat_unit(k, d, np.zeros(d), QuadratureConfig(method="cone"))
    assert v == pytest.approx(sphere_volume(k, d), rel=1e-10)


def test_bessel_matches_elementary_d3():
    rho = np.array([0.3, 1.7, 4.2])
    assert np.allclose(sigma_hat_bessel(3, rho), 2 * np.pi * np.sin(2 * np.pi * rho) / (2 * np.pi * rho))


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=3))
def test_cone_matches_bessel(xi):
    d = len(xi)
    v, e = sigma_hat_cone(2, d, xi)
    assert abs(v - sigma_hat_bessel(d, np.linalg.norm(xi))) < 1e-8


@pytest.mark.parametrize("k,d", [(3, 2), (3, 3), (4, 2)])
def test_routes_agree(k, d):
    xi = np.array([1.1, -0.4, 0.3][:d])
    cone = sigma_hat_cone(k, d, xi)[0]
    theta = sigma_hat_theta(k, d, xi)[0]
    shell = sigma_hat_shell(k, d, xi)[0]
    assert abs(cone - theta) < 1e-7
    assert abs(cone - shell) < 1e-6
    ax = np.zeros(d)
    ax[0] = 2.3
    assert abs(sigma_hat_axis(k, d, [2.3])[0][0] - sigma_hat_cone(k, d, ax)[0]) < 1e-8


def test_theta_route_high_dimension():
    # k = 2 closed form is available in any d
    xi = np.full(8, 0.15)
    v, e = sigma_hat_theta(2, 8, xi)
    assert abs(v - sigma_hat_bessel(8, np.linalg.norm(xi))) < 1e-7


def test_cone_budget():
    with pytest.raises(ResourceError):
        sigma_hat_unit(3, 6, np.full(6, 0.2), QuadratureConfig(method="cone"), Budget(shell_dim_max=4))
    with pytest.raises(DomainError):
        sigma_hat_unit(3, 2, [1.0, 0.5], QuadratureConfig(method="bessel"))


@given(st.integers(2, 4), st.integers(2, 3), st.floats(0.3, 3.0),
       st.lists(st.floats(-1.5, 1.5), min_size=3, max_size=3))
def test_scaling_identity_property(k, d, r, xi):
    a = surface_ft(k, d, r, xi[:d])
    b = surface_ft(k, d, 1.0, [r * x for x in xi[:d]])
    assert a.value == b.value


def test_theta_1d_against_closed_forms():
    z = np.array([1e-3 + 1e-3j, 0.3 + 0.01j, -5 + 0.15j, 0.1j, 2 + 1j])
    for eta in (0.0, 0.7, 5.0):
        assert np.max(np.abs(theta_1d(2, z, eta) - theta_1d_gauss(z, eta))) < 1e-10
    zz = np.array([50 + 1j, 200 + 0.15j])
    for k in (3, 4):
        assert np.max(np.abs(theta_1d(k, zz, 0.3) - theta_1d_series(k, zz, 0.3))) < 1e-10


def test_theta_1d_direct_quadrature():
    z, eta = 0.4 + 0.3j, 0.25
    f = lambda u: np.exp(2j * np.pi * (abs(u) ** 3 * z + u * eta))
    re = integrate.quad(lambda u: f(u).real, -np.inf, np.inf, limit=400)[0]
    im = integrate.quad(lambda u: f(u).imag, -np.inf, np.inf, limit=400)[0]
    assert abs(theta_1d(3, np.array([z]), eta)[0] - complex(re, im)) < 1e-8


def test_theta_lattice_jacobi():
    assert abs(theta_lattice_1d(2, 1j, 0.0) - (1 + 2 * np.exp(-2 * np.pi) + 2 * np.exp(-8 * np.pi))) < 1e-12
    # small |z|: the lattice sum approaches the integral
    t = theta_integral(2, 2, 1e-3 + 1e-3j, [0.0, 0.0])
    s = theta_lattice_sum(2, 2, 1e-3 + 1e-3j, [0.0, 0.0])
    assert abs(t.integral_value - s.sum_value) < 1e-8 * abs(t.integral_value)


def test_decay_fit_and_validation():
    f = decay_fit(2, 3, [1.0, 0.0, 0.0], 200.0)
    assert abs(f.gamma_hat - f.predicted) < 0.15
    with pytest.raises(DomainError):
        decay_fit(2, 2, [1.0, 1.0], 200.0)
    with pytest.raises(DomainError):
        decay_fit(2, 2, [1.0, 0.0], 50.0)


def test_hardy_localization_even_k():
    loc = hardy_localization(2, 1, 5)
    assert loc.K_hat > 0
    with pytest.raises(DomainError):
        hardy_localization(3, 1, 5)


def test_hardy_sweep_flat():
    h = hardy_sweep(4, 1)
    assert abs(h.slope) < 0.05


def test_bump():
    x = np.array([[0.0, 0.1], [0.2, 0.0], [0.3, 0.0], [0.125, 0.125]])
    v = DEFAULT_BUMP(x)
    assert v[0] == 1 and 0 < v[1] < 1 and v[2] == 0 and v[3] == 1
    with pytest.raises(DomainError):
        make_bump(0.3, 0.2)
    t = np.linspace(0.125, 0.25, 50)
    assert np.all(np.diff(DEFAULT_BUMP.profile(t)) <= 0)
