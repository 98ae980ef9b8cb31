import io
import math
from fractions import Fraction as Q

import numpy as np
import pytest

import oracles as O
from freesemigroup import (
    Atomic,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    Semicircle,
    atom_bound,
    atom_scan,
    bernoulli,
    bt_measure,
    density_convergence,
    in_positive_half,
    stieltjes_density,
    support_infimum,
    write_density_csv,
)
from freesemigroup.measures import ProceduralF

BERN = bernoulli()
# F(z) = z - 2 + i + (z - i)/(z + i) meets -t x at x = 2 for t = 1/2 with mass 1/3
RATIONAL_F = ProceduralF(lambda z: z - 2 + 1j + (z - 1j) / (z + 1j),
                         lambda z: 1 + 2j / (z + 1j) ** 2, label="rational-F")


def bernoulli_bt_density(t, x):
    return np.sqrt(np.clip(4 * t - x**2, 0, None)) / (2 * math.pi * (1 - (1 - t) * x**2))


def test_arcsine_and_semicircle_at_zero():
    x = np.array([-1e-3, 0.0, 1e-3])
    f = stieltjes_density(bt_measure(BERN, 0.5), x).density[1]
    assert f == pytest.approx(O.ARCSINE_F0, abs=1e-5)
    f = stieltjes_density(bt_measure(BERN, 1.0), x).density[1]
    assert f == pytest.approx(O.SEMICIRCLE_F0, abs=1e-5)


def test_arcsine_profile():
    x = np.linspace(-1.35, 1.35, 600)
    prof = stieltjes_density(bt_measure(BERN, 0.5), x)
    assert np.max(np.abs(prof.density - 1 / (math.pi * np.sqrt(2 - x**2)))) <= 1e-4
    assert prof.epsilon_used == 2.5e-4


@pytest.mark.parametrize("t", [0.5, 2.0, 3.0])
def test_semicircle_of_variance_t(t):
    law = Semicircle(0, t)
    x = np.linspace(-1.9 * math.sqrt(t), 1.9 * math.sqrt(t), 400)
    prof = stieltjes_density(law, x)
    assert np.max(np.abs(prof.density - law.density(x))) <= 1e-5


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_bernoulli_bt_closed_form(t):
    x = np.linspace(-1.9 * math.sqrt(t), 1.9 * math.sqrt(t), 400)
    prof = stieltjes_density(bt_measure(BERN, t), x)
    assert np.max(np.abs(prof.density - bernoulli_bt_density(t, x))) <= 1e-4


def test_grid_validation():
    with pytest.raises(DomainError):
        stieltjes_density(BERN, [0.0])
    with pytest.raises(DomainError):
        stieltjes_density(BERN, [0.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        stieltjes_density(BERN, [0.0, 1.0], eps_schedule=(1e-3, 1e-3, 1e-4))


def test_too_many_missing_points():
    def partial(z):
        ok = z.real < 0.5
        return np.where(ok, z - 1 / z, np.nan), ok

    law = ProceduralF(lambda z: z - 1 / z, F_partial=partial, label="half-broken")
    with pytest.raises(ConvergenceError):
        stieltjes_density(law, np.linspace(-1, 1, 101))


def test_few_missing_points_are_flagged():
    def partial(z):
        ok = np.abs(z.real - 0.3) > 1e-9
        return np.where(ok, 1 / Semicircle().G(z), np.nan), ok

    law = ProceduralF(lambda z: 1 / Semicircle().G(z), F_partial=partial, label="one-hole")
    x = np.linspace(-1, 1, 101)
    prof = stieltjes_density(law, x)
    assert prof.missing.sum() == 1 and prof.missing[65]
    assert prof.density[65] == 0.0


# ---------------------------------------------------------------------------
# atoms


def test_atom_bound():
    assert [atom_bound(t) for t in (0.25, 0.3, 0.5, 1.0, 2.0)] == [4, 3, 2, 1, 1]
    with pytest.raises(DomainError):
        atom_bound(0)


def test_quarter_has_two_atoms():
    reps = [r for r in atom_scan(BERN, 0.25) if r.passed]
    assert len(reps) == 2
    assert reps[0].x == pytest.approx(-O.ATOM_X_QUARTER, abs=1e-9)
    assert reps[1].x == pytest.approx(O.ATOM_X_QUARTER, abs=1e-9)
    for r in reps:
        assert r.mass == pytest.approx(float(O.ATOM_MASS_QUARTER), abs=1e-6)


@pytest.mark.parametrize("t", [0.5, 1.0])
def test_no_atoms(t):
    assert not any(r.passed for r in atom_scan(BERN, t))


def test_rational_F_atom():
    rep = atom_scan(RATIONAL_F, 0.5, [2.0])[0]
    assert rep.passed
    assert rep.mass == pytest.approx(1 / 3, abs=1e-8)
    assert rep.F_limit == pytest.approx(-1.0, abs=1e-6)


def test_non_root_candidate_fails():
    rep = atom_scan(BERN, 0.25, [0.3])[0]
    assert not rep.passed


def test_atom_count_above_bound_raises():
    with pytest.raises(ConsistencyError):
        atom_scan(RATIONAL_F, 0.5, [2.0, 2.0, 2.0])


def test_atom_scan_rejects_t_zero():
    with pytest.raises(DomainError):
        atom_scan(BERN, 0)


def test_mass_accounting():
    x0 = O.ATOM_X_QUARTER
    x = np.linspace(-1.0, 1.0, 2001)
    prof = stieltjes_density(bt_measure(BERN, 0.25), x, atoms=[(-x0, 1 / 3), (x0, 1 / 3)])
    assert 0.98 <= prof.total_mass_estimate <= 1.02
    assert 1e-3 < prof.continuous_mass


def test_point_mass_has_no_continuous_part():
    prof = stieltjes_density(bt_measure(Atomic([(Q(1, 2), 1)]), 0.5), np.linspace(-2, 2, 401),
                             atoms=[(0.5, 1.0)])
    assert prof.density.max() <= 1e-6
    assert prof.total_mass_estimate == pytest.approx(1.0, abs=1e-6)


def test_near_atom_points_use_raw_values():
    # without removing the atom the recovered density near it is large but finite
    x = np.array([1.1, O.ATOM_X_QUARTER, 1.2])
    prof = stieltjes_density(bt_measure(BERN, 0.25), x)
    assert np.all(np.isfinite(prof.density))
    # mass / (pi eps) at the smallest height
    assert prof.density[1] == pytest.approx(1 / 3 / (math.pi * 2.5e-4), rel=1e-3)


# ---------------------------------------------------------------------------
# support scans and convergence


def test_semicircle_infimum():
    s = support_infimum(Semicircle())
    assert abs(s.infimum + 2) <= 0.01
    assert s.mass_below > 0.4


def test_free_poisson_is_positive():
    mp = bt_measure(Atomic([(0, Q(1, 2)), (2, Q(1, 2))]), 1)
    s = support_infimum(mp, grid=np.linspace(-0.5, 4.5, 2001))
    assert s.infimum >= -1e-3
    assert s.mass_below <= 1e-6
    assert not in_positive_half(Semicircle())


def test_support_infimum_needs_hint():
    law = ProceduralF(lambda z: z - 1 / z)
    with pytest.raises(DomainError):
        support_infimum(law)


def test_density_convergence_to_input():
    gamma = Semicircle()
    x = np.linspace(-1.5, 1.5, 301)
    devs = density_convergence(gamma, [0.01, 1e-4], x, gamma.density)
    assert devs[0] <= 0.05 and devs[1] <= 0.01
    assert devs[1] < devs[0]


def test_density_csv():
    prof = stieltjes_density(Semicircle(), np.array([-1.0, 0.0, 1.0]), atoms=[(3.0, 0.25)])
    buf = io.StringIO()
    write_density_csv(prof, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,density"
    assert lines[2].split(",")[0] == "0"
    assert float(lines[2].split(",")[1]) == pytest.approx(O.SEMICIRCLE_F0, abs=1e-5)
    assert lines[-1] == "# atom,3,0.25"
