import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freesemigroup import (
    Atomic,
    CauchyStd,
    ConvergenceError,
    DomainError,
    JacobiPeriodic,
    Semicircle,
    bernoulli,
    boxplus_power,
    boxplus_power_series,
    F_boxplus_power,
    left_inverse_H,
    moments_of,
    omega_boxplus,
    omega_boxplus_array,
    omega_brownian,
    omega_brownian_array,
    picard,
    psi,
    uplus_power,
)
from freesemigroup.measures import ProceduralF

RNG = np.random.default_rng(3)
Z50 = RNG.uniform(-4, 4, 50) + 1j * RNG.uniform(0.1, 5, 50)
LAWS = [bernoulli(), Atomic([(0, 0.5), (2, 0.5)]), JacobiPeriodic(1, 0), Semicircle(0.5, 2)]


def test_point_mass_omega():
    c, T = 0.75, 2.5
    mu = Atomic([(c, 1)])
    omega = omega_boxplus_array(mu, T, Z50).omega
    np.testing.assert_allclose(omega, Z50 - (T - 1) * c, atol=1e-12)
    np.testing.assert_allclose(F_boxplus_power(mu, T, Z50), Z50 - T * c, atol=1e-12)


def test_cauchy_omega_is_linear():
    T = 3.0
    r = omega_boxplus(CauchyStd(), T, 0.2 + 0.7j)
    assert r.converged
    assert r.omega == pytest.approx(0.2 + 0.7j + (T - 1) * 1j, abs=1e-12)
    np.testing.assert_allclose(F_boxplus_power(CauchyStd(), T, Z50), Z50 + T * 1j, atol=1e-12)


@pytest.mark.parametrize("mu", LAWS, ids=repr)
def test_H_inverts_omega(mu):
    T = 1.7
    w = omega_boxplus_array(mu, T, Z50).omega
    np.testing.assert_allclose(left_inverse_H(mu, T, w), Z50, atol=1e-10)


def test_left_inverse_examples():
    assert left_inverse_H(Atomic([(0, 1)]), 2, 1j) == pytest.approx(1j, abs=1e-15)
    w = 0.3 + 2j
    assert left_inverse_H(CauchyStd(), 4, w) == pytest.approx(w - 3j, abs=1e-14)


@pytest.mark.parametrize("mu", LAWS, ids=repr)
def test_subordination_identity(mu):
    T = 2.2
    w = omega_boxplus_array(mu, T, Z50).omega
    np.testing.assert_allclose(mu.F(w), F_boxplus_power(mu, T, Z50), atol=1e-9)


@pytest.mark.parametrize("mu", LAWS, ids=repr)
def test_self_map_property(mu):
    for T in (1.2, 2.0, 5.0):
        res = omega_boxplus_array(mu, T, Z50)
        assert np.all(res.converged)
        assert np.all(res.omega.imag >= Z50.imag / T - 1e-12)


def test_equal_H_gives_equal_omega():
    # (mu, T) and (mu~, T~) with mu~ = mu^{uplus s}: H~(w) = T~ w + (1 - T~)(s F + (1 - s) w)
    # matches H when T~ = 1 + (T - 1)/s.
    mu, T, s = bernoulli(), 2.0, 0.8
    Tt = 1 + (T - 1) / s
    a = omega_boxplus_array(mu, T, Z50).omega
    b = omega_boxplus_array(uplus_power(mu, s), Tt, Z50).omega
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_arcsine_moments_from_power():
    # Bernoulli^{boxplus 2} has psi(z) = 2 z^2 + 6 z^4 + ...; read back from the analytic route
    law = boxplus_power(bernoulli(), 2)
    m = moments_of(bernoulli(), 8)
    exact = boxplus_power_series(m, 2)
    z = -0.05j  # 1/z in the upper half-plane
    series = sum(complex(exact[n]) * z**n for n in range(1, 9))
    G = complex(law.G(1 / z))
    assert G / z - 1 == pytest.approx(series, abs=1e-9)


def test_boxplus_power_identity_and_errors():
    mu = bernoulli()
    assert boxplus_power(mu, 1) is mu
    with pytest.raises(DomainError):
        boxplus_power(mu, 0.5)
    with pytest.raises(DomainError):
        omega_boxplus(mu, 1.0, 1j)
    with pytest.raises(DomainError):
        omega_boxplus(mu, 2.0, -1j)
    with pytest.raises(DomainError):
        omega_boxplus(mu, 2.0, Z50)


def test_boxplus_power_derivative():
    law = boxplus_power(JacobiPeriodic(1, 0), 2.5)
    z = 0.3 + 0.8j
    h = 1e-6
    numeric = (complex(law.F(z + h)) - complex(law.F(z - h))) / (2 * h)
    assert complex(law.dF(z)) == pytest.approx(numeric, abs=1e-7)


def test_nonconvergence_carries_last_iterate():
    with pytest.raises(ConvergenceError) as info:
        omega_boxplus(bernoulli(), 2.0, 0.3 + 1e-6j, max_iter=5)
    err = info.value
    assert err.iterations == 5 and err.last_iterate is not None and err.residual > 0


def test_picard_marks_escape_as_unconverged():
    res = picard(lambda w, z: w - 2j, np.array([1j]), max_iter=50)
    assert not res.converged[0]


# ---------------------------------------------------------------------------
# free Brownian subordination


def test_brownian_point_mass_closed_form():
    t = 0.7
    omega = omega_brownian_array(Atomic([(0, 1)]), t, Z50).omega
    closed = (Z50 + np.sqrt(Z50 - 2 * np.sqrt(t)) * np.sqrt(Z50 + 2 * np.sqrt(t))) / 2
    np.testing.assert_allclose(omega, closed, atol=1e-11)
    G = 1 / omega
    np.testing.assert_allclose(G, Semicircle(0, t).G(Z50), atol=1e-11)


def test_brownian_small_time_limit():
    z, t = 0.4 + 0.9j, 1e-6
    r = omega_brownian(bernoulli(), t, z)
    assert r.residual <= 1e-8
    # first order: omega = z - t G(z) + O(t^2)
    assert abs(r.omega - (z - t * complex(bernoulli().G(z)))) <= 1e-10


def test_brownian_cauchy_quadratic():
    t = 1.5
    r = omega_brownian_array(CauchyStd(), t, Z50)
    g = np.asarray(CauchyStd().G(r.omega))
    np.testing.assert_allclose(g, 1 / (Z50 - t * g + 1j), atol=1e-11)


def test_brownian_errors():
    with pytest.raises(DomainError):
        omega_brownian(bernoulli(), 0, 1j)
    with pytest.raises(DomainError):
        omega_brownian(bernoulli(), 1, Z50)


# ---------------------------------------------------------------------------
# properties

upper = st.tuples(st.floats(-5, 5), st.floats(0.05, 5)).map(lambda p: complex(*p))


@given(upper, st.floats(1.05, 8))
def test_omega_lands_in_upper_half_plane(z, T):
    r = omega_boxplus(JacobiPeriodic(0.5, 0.5), T, z)
    assert r.omega.imag >= z.imag / T * (1 - 1e-9)
    assert complex(boxplus_power(JacobiPeriodic(0.5, 0.5), T).F(z)).imag >= z.imag * (1 - 1e-9)


@given(upper, st.floats(0.05, 4))
def test_brownian_omega_in_upper_half_plane(z, t):
    r = omega_brownian(bernoulli(), t, z)
    assert r.omega.imag > 0
    G = complex(bernoulli().G(r.omega))
    assert G.imag < 0


def test_procedural_law_power():
    # a law given only through F still admits free powers
    mu = ProceduralF(lambda z: z - 1 / z, lambda z: 1 + 1 / z**2, label="bernoulli-F")
    np.testing.assert_allclose(F_boxplus_power(mu, 3.0, Z50[:10]),
                               F_boxplus_power(bernoulli(), 3.0, Z50[:10]), atol=1e-12)


def test_psi_of_power_is_finite():
    assert np.isfinite(psi(boxplus_power(bernoulli(), 2), 0.2j))
