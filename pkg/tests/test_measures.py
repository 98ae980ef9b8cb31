import math
import warnings
from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freesemigroup import (
    Atomic,
    CauchyStd,
    DomainError,
    GridDensity,
    JacobiPeriodic,
    ProceduralF,
    Semicircle,
    bernoulli,
    boolean_convolve,
    cauchy_G,
    dilate,
    eta,
    measure_from_spec,
    moments_of,
    psi,
    reciprocal_F,
    uplus_power,
)

RNG = np.random.default_rng(0)
Z100 = RNG.uniform(-5, 5, 100) + 1j * RNG.uniform(0.1, 10, 100)
Z20 = Z100[:20]


def semicircle_grid():
    return GridDensity.from_function(Semicircle().density, -2, 2)


def all_variants():
    return [
        bernoulli(),
        Atomic([(0, Q(1, 2)), (2, Q(1, 2))]),
        Atomic([(Q(3, 2), 1)]),
        semicircle_grid(),
        Semicircle(),
        Semicircle(1, Q(1, 4)),
        CauchyStd(),
        JacobiPeriodic(1, 0),
        JacobiPeriodic(0, -1),
        uplus_power(bernoulli(), 2.5),
    ]


# ---------------------------------------------------------------------------
# frozen examples


def test_bernoulli_G_at_2i():
    assert cauchy_G(bernoulli(), 2j) == pytest.approx(-0.4j, abs=1e-15)


def test_semicircle_G_at_2i():
    assert cauchy_G(Semicircle(), 2j) == pytest.approx((1 - math.sqrt(2)) * 1j, abs=1e-15)


def test_point_mass_G_and_F():
    mu = Atomic([(Q(3, 4), 1)])
    z = 0.3 + 1.2j
    assert cauchy_G(mu, z) == pytest.approx(1 / (z - 0.75), abs=1e-15)
    assert reciprocal_F(mu, z) == pytest.approx(z - 0.75, abs=1e-15)


def test_bernoulli_F():
    assert reciprocal_F(bernoulli(), 2j) == pytest.approx(2.5j, abs=1e-15)
    np.testing.assert_allclose(reciprocal_F(bernoulli(), Z20), Z20 - 1 / Z20, atol=1e-13)


def test_cauchy_F_is_shift():
    np.testing.assert_allclose(reciprocal_F(CauchyStd(), Z20), Z20 + 1j, atol=0)


def test_psi_examples():
    assert psi(Atomic([(0, Q(1, 2)), (2, Q(1, 2))]), 0.1) == pytest.approx(0.125, abs=1e-14)
    assert psi(Atomic([(0, 1)]), 0.3 + 0.2j) == pytest.approx(0, abs=1e-15)
    z = 0.1j
    assert psi(bernoulli(), z) == pytest.approx(z * z / (1 - z * z), abs=1e-15)
    assert psi(bernoulli(), z).real == pytest.approx(-0.00990099, abs=1e-8)


def test_eta_examples():
    z = 0.2 + 0.1j
    assert eta(bernoulli(), z) == pytest.approx(z * z, abs=1e-14)
    assert eta(Atomic([(0, Q(1, 2)), (2, Q(1, 2))]), z) == pytest.approx(z / (1 - z), abs=1e-14)
    assert eta(Atomic([(Q(-2), 1)]), z) == pytest.approx(-2 * z, abs=1e-14)


def test_dilate_examples():
    mu = dilate(Atomic([(3, 1)]), 2)
    assert mu.exact_atoms == ((Q(3, 2), Q(1)),)
    for m in all_variants():
        np.testing.assert_allclose(dilate(m, 1).F(Z20), m.F(Z20), atol=1e-14)
    m = Atomic([(-1, Q(1, 5)), (Q(1, 2), Q(1, 2)), (2, Q(3, 10))])
    r = Q(3, 2)
    base, scaled = moments_of(m, 8), moments_of(dilate(m, r), 8)
    assert all(scaled[n] == base[n] / r**n for n in range(1, 9))


def test_dilate_transform_rule():
    r = 2.5
    mu = JacobiPeriodic(1, 0)
    np.testing.assert_allclose(dilate(mu, r).G(Z20), r * mu.G(r * Z20), atol=1e-13)


def test_uplus_power_examples():
    mu = bernoulli()
    assert uplus_power(mu, 1) is mu
    d = uplus_power(Atomic([(2, 1)]), 3)
    np.testing.assert_allclose(d.F(Z20), Z20 - 6, atol=1e-13)
    c = uplus_power(CauchyStd(), 2.5)
    np.testing.assert_allclose(c.F(Z20), Z20 + 2.5j, atol=1e-14)


def test_uplus_power_keeps_positivity():
    mu = Atomic([(0, Q(1, 2)), (2, Q(1, 2))])
    assert uplus_power(mu, 2).positive


def test_boolean_convolve_examples():
    mu = JacobiPeriodic(1, 0)
    np.testing.assert_allclose(boolean_convolve(mu, Atomic([(0, 1)])).F(Z20), mu.F(Z20), atol=1e-15)
    np.testing.assert_allclose(boolean_convolve(mu, mu).F(Z20), uplus_power(mu, 2).F(Z20),
                               atol=1e-14)
    nu = bernoulli()
    w = 0.1 + 0.05j * np.arange(1, 21)
    lhs = eta(boolean_convolve(mu, nu), w)
    np.testing.assert_allclose(lhs, eta(mu, w) + eta(nu, w), atol=1e-12)


# ---------------------------------------------------------------------------
# invariants


@pytest.mark.parametrize("mu", all_variants(), ids=repr)
def test_class_F_property(mu):
    G = np.asarray(mu.G(Z100))
    F = np.asarray(mu.F(Z100))
    assert np.all(G.imag < 0)
    assert np.all(F.imag >= Z100.imag - 1e-12)


@pytest.mark.parametrize("mu", all_variants(), ids=repr)
def test_normalization_at_infinity(mu):
    iy = 1e6j
    assert abs(complex(mu.F(iy)) / iy - 1) <= 1e-4


def test_point_mass_rigidity():
    for mu in [bernoulli(), Atomic([(0, Q(1, 2)), (2, Q(1, 2))]),
               Atomic([(-1, Q(1, 5)), (Q(1, 2), Q(1, 2)), (2, Q(3, 10))])]:
        assert complex(mu.F(1j)).imag > 1
    assert complex(Atomic([(5, 1)]).F(1j)).imag == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("mu", all_variants(), ids=repr)
def test_dilate_round_trip(mu):
    back = dilate(dilate(mu, 3.5), 1 / 3.5)
    np.testing.assert_allclose(back.G(Z20), mu.G(Z20), atol=1e-12)


@pytest.mark.parametrize("mu", all_variants(), ids=repr)
def test_eta_psi_consistency(mu):
    w = 0.05 + 0.1j * np.linspace(0.5, 3, 20)
    p = psi(mu, w)
    np.testing.assert_allclose(eta(mu, w), p / (1 + p), atol=1e-12)


def test_grid_density_normalized():
    g = GridDensity.from_bounds(-1, 1, [0, 1, 2, 1, 0])
    assert float(np.sum(g._c)) == pytest.approx(1, abs=1e-6)


def test_grid_density_semicircle_accuracy():
    # square-root edges limit the trapezoid rule to O(dx^1.5), so a finer grid is used here
    fine = GridDensity.from_function(Semicircle().density, -2, 2, n=20001)
    np.testing.assert_allclose(fine.G(Z20), Semicircle().G(Z20), atol=1e-6)


def test_grid_density_smooth_accuracy():
    # density 3/4 (1 - x^2) on [-1, 1]; G has a closed form through log((z+1)/(z-1))
    g = GridDensity.from_function(lambda x: 0.75 * (1 - x**2), -1, 1)
    z = Z20
    L = np.log((z + 1) / (z - 1))
    exact = 0.75 * ((1 - z**2) * L + 2 * z)
    np.testing.assert_allclose(g.G(z), exact, atol=1e-6)


def test_semicircle_branch_picks_lower_half_plane():
    z = np.array([1e-3 + 1e-9j, -3 + 1e-6j, 0.5 + 50j])
    assert np.all(np.asarray(Semicircle().G(z)).imag < 0)


def test_procedural_default_derivative():
    mu = ProceduralF(lambda z: z - 1 / z)
    z = 0.4 + 0.9j
    assert complex(mu.dF(z)) == pytest.approx(1 + 1 / z**2, abs=1e-8)


# ---------------------------------------------------------------------------
# errors and input validation


@pytest.mark.parametrize("z", [1.0, 1 - 1e-3j, 0j])
def test_transform_outside_upper_half_plane(z):
    with pytest.raises(DomainError):
        cauchy_G(bernoulli(), z)
    with pytest.raises(DomainError):
        reciprocal_F(Semicircle(), z)


def test_psi_eta_reject_zero():
    with pytest.raises(DomainError):
        psi(bernoulli(), 0)
    with pytest.raises(DomainError):
        eta(bernoulli(), 0)


def test_psi_real_point_only_for_atomic():
    assert psi(bernoulli(), 0.1) == pytest.approx(0.01 / 0.99, abs=1e-15)
    with pytest.raises(DomainError):
        psi(Semicircle(), 0.1)


@pytest.mark.parametrize("r", [0, -1])
def test_dilate_rejects_nonpositive(r):
    with pytest.raises(DomainError):
        dilate(bernoulli(), r)


@pytest.mark.parametrize("t", [0, -0.5])
def test_uplus_power_rejects_nonpositive(t):
    with pytest.raises(DomainError):
        uplus_power(bernoulli(), t)


def test_atomic_validation():
    with pytest.raises(DomainError):
        Atomic([])
    with pytest.raises(DomainError):
        Atomic([(0, 0.5), (1, -0.5)])
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        mu = Atomic([(0, 1), (1, 1)])
    assert mu.renormalized and rec
    assert sum(w for _, w in mu.exact_atoms) == 1


def test_grid_density_validation():
    with pytest.raises(DomainError):
        GridDensity([0, 1, 3], [1, 1, 1])
    with pytest.raises(DomainError):
        GridDensity([0, 1, 2], [1, -1, 1])
    with pytest.raises(DomainError):
        GridDensity([0, 1, 2], [0, 0, 0])


def test_semicircle_and_meixner_validation():
    with pytest.raises(DomainError):
        Semicircle(0, 0)
    with pytest.raises(DomainError):
        JacobiPeriodic(0, -1.5)


def test_measure_from_spec_variants():
    assert isinstance(measure_from_spec({"type": "atomic", "atoms": [[-1, 0.5], [1, 0.5]]}), Atomic)
    assert isinstance(measure_from_spec({"type": "grid", "xmin": 0, "xmax": 1,
                                         "values": [1, 1, 1]}), GridDensity)
    assert isinstance(measure_from_spec({"type": "semicircle", "mean": 0, "variance": 1}),
                      Semicircle)
    assert isinstance(measure_from_spec({"type": "cauchy"}), CauchyStd)
    assert isinstance(measure_from_spec({"type": "meixner", "b": 1, "c": 0}), JacobiPeriodic)


@pytest.mark.parametrize("spec", [[], {"atoms": []}, {"type": "poisson"}, {"type": "atomic"},
                                  {"type": "grid", "xmin": 0}])
def test_measure_from_spec_rejects(spec):
    with pytest.raises(DomainError):
        measure_from_spec(spec)


# ---------------------------------------------------------------------------
# properties

weights = st.lists(st.integers(1, 20), min_size=1, max_size=5).map(
    lambda ws: [Q(w, sum(ws)) for w in ws])
points = st.lists(st.integers(-30, 30), min_size=5, max_size=5, unique=True)
upper = st.tuples(st.floats(-10, 10), st.floats(0.01, 10)).map(lambda p: complex(*p))


@given(weights, points, upper)
def test_atomic_F_dominates_identity(ws, xs, z):
    mu = Atomic([(Q(x, 4), w) for x, w in zip(xs, ws)])
    F = complex(mu.F(z))
    assert F.imag >= z.imag * (1 - 1e-12)
    if len(ws) >= 2:
        assert F.imag > z.imag


@given(st.floats(-3, 3), st.floats(0.1, 4), upper)
def test_semicircle_F_dominates_identity(a, v, z):
    F = complex(Semicircle(a, v).F(z))
    assert F.imag > z.imag * (1 - 1e-12)


@given(weights, points, st.floats(0.2, 5), upper)
def test_uplus_power_is_class_F(ws, xs, t, z):
    mu = Atomic([(x, w) for x, w in zip(xs, ws)])
    F = complex(uplus_power(mu, t).F(z))
    assert F.imag >= z.imag * (1 - 1e-12)
