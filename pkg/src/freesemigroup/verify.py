"""Verification suites: each returns a table of checks with residuals and tolerances.

Exact checks on the series backend report residual 0 (equal) or 1
(different) against tolerance 0.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import series as S
from .brownian import brownian_F, burgers_grid, mu_from_nu, nu_from_mu, theta_omega_gap
from .density import atom_scan, density_convergence, stieltjes_density, support_infimum
from .divisibility import cauchy_phi, phi_estimate
from .measures import Atomic, JacobiPeriodic, ProceduralF, Semicircle, bernoulli, dilate
from .meixner import (
    meixner_bt_shift,
    meixner_moments,
    meixner_moments_from_semicircle,
    orthogonality_gram,
)
from .semigroup import (
    F_bt,
    bt_measure,
    F_bt_definitional,
    commutation_exponents,
    exponents_from_primed,
    h_field,
    semigroup_residual,
    verify_commutation,
)
from .subordination import boxplus_power

__all__ = ["Check", "SuiteResult", "SUITES", "run_suite", "run_all", "format_table"]

F_ = Fraction


@dataclass(frozen=True)
class Check:
    label: str
    residual: float
    tol: float
    passed: bool


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, label, residual, tol):
        residual = float(residual)
        self.checks.append(Check(label, residual, float(tol), bool(residual <= tol)))

    def exact(self, label, equal):
        self.checks.append(Check(label, 0.0 if equal else 1.0, 0.0, bool(equal)))


# ---------------------------------------------------------------------------
# fixtures

BERN = bernoulli()
HALF02 = Atomic([(0, F_(1, 2)), (2, F_(1, 2))])
Q12 = Atomic([(1, F_(1, 4)), (2, F_(3, 4))])
P13 = Atomic([(1, F_(1, 3)), (3, F_(2, 3))])
P_HALF2 = Atomic([(F_(1, 2), F_(1, 2)), (2, F_(1, 2))])
THREE = Atomic([(-1, F_(1, 5)), (F_(1, 2), F_(1, 2)), (2, F_(3, 10))])
RATIONAL_F = ProceduralF(lambda z: z - 2 + 1j + (z - 1j) / (z + 1j),
                       lambda z: 1 + 2j / (z + 1j) ** 2, label="rational-F")


def sample_z(n, seed, re=(-3.0, 3.0), im=(0.2, 5.0)):
    rng = np.random.default_rng(seed)
    return rng.uniform(*re, n) + 1j * rng.uniform(*im, n)


def bernoulli_bt_G(t, z):
    """Closed-form Cauchy transform of ``B_t`` of the symmetric Bernoulli law."""
    r = np.sqrt(z - 2 * np.sqrt(t)) * np.sqrt(z + 2 * np.sqrt(t))
    return ((2 * t - 1) * z - r) / (2 * (1 - (1 - t) * z**2))


def bernoulli_bt_density(t, x):
    x = np.asarray(x, dtype=float)
    inside = np.clip(4 * t - x**2, 0, None)
    return np.sqrt(inside) / (2 * math.pi * (1 - (1 - t) * x**2))


def _series_laws(N):
    return {
        "bernoulli": S.moments_of(BERN, N),
        "half02": S.moments_of(HALF02, N),
        "q12": S.moments_of(Q12, N),
        "three-atom": S.moments_of(THREE, N),
        "semicircle": S.moments_of(Semicircle(), N),
    }


# ---------------------------------------------------------------------------
# suites


def suite_semigroup(res: SuiteResult):
    times = [F_(1, 3), F_(1, 2), F_(1), F_(2)]
    for name, m in _series_laws(12).items():
        ok = all(S.bt_series(S.bt_series(m, s), t) == S.bt_series(m, s + t)
                 for s in times for t in times)
        res.exact(f"series B_s B_t = B_(s+t), N=12, {name}", ok)
    zs = sample_z(50, 11)
    for s, t in [(0.5, 0.5), (1.0, 1.0), (1 / 3, 2 / 3)]:
        for label, mu in [("bernoulli", BERN), ("half02", HALF02)]:
            res.add(f"analytic semigroup (s,t)=({s:.4g},{t:.4g}), {label}",
                    semigroup_residual(mu, s, t, zs), 1e-8)
    for t in [0.25, 1.0, 2.0]:
        res.add(f"F_bt vs definitional route, t={t}",
                np.max(np.abs(F_bt(BERN, t, zs) - F_bt_definitional(BERN, t, zs))), 1e-12)
        res.add(f"h field: direct vs omega route, t={t}",
                np.max(np.abs(h_field(BERN, t, zs, "direct") - h_field(BERN, t, zs))), 1e-11)
    gap = np.max(np.abs(F_bt(BERN, 1.0, zs) - F_bt(Atomic([(-1, 0.4), (1, 0.6)]), 1.0, zs)))
    res.add("injectivity witness (gap must be > 1e-3)", 1e-3 / max(gap, 1e-300), 1.0)
    m = S.moments_of(HALF02, 8)
    for t in [F_(1, 2), F_(1), F_(2)]:
        lhs = S.s_series(S.bt_series(m, t)).a
        g = [F_(0)] + [t ** (k - 1) for k in range(1, 8)]  # z / (1 - t z)
        rhs = S.series_compose(list(S.s_series(m).a), g, 7)
        res.exact(f"S_(B_t mu)(z) = S_mu(z/(1-tz)), t={t}", list(lhs) == rhs)


def suite_multiplicativity(res: SuiteResult):
    pairs = [("half02 x half02", HALF02, HALF02), ("p13 x p_half2", P13, P_HALF2),
             ("q12 x half02", Q12, HALF02)]
    for label, mu, nu in pairs:
        a, b = S.moments_of(mu, 10), S.moments_of(nu, 10)
        prod = S.boxtimes_series(a, b)
        res.exact(f"S route = NC route, {label}", prod == S.boxtimes_series(a, b, "nc"))
        for t in [F_(1, 2), F_(1), F_(2)]:
            lhs = S.bt_series(prod, t)
            rhs = S.boxtimes_series(S.bt_series(a, t), S.bt_series(b, t))
            res.exact(f"B_t(mu x nu) = B_t(mu) x B_t(nu), N=10, t={t}, {label}", lhs == rhs)


def _commutation_pairs():
    return [("(2,3/4)", commutation_exponents(2, F_(3, 4))),
            ("(3,1/2) as Boolean-first", exponents_from_primed(3, F_(1, 2))),
            ("(3/2,9/10)", commutation_exponents(F_(3, 2), F_(9, 10)))]


def suite_commutation(res: SuiteResult):
    zs = sample_z(30, 12)
    for label, e in _commutation_pairs():
        for name, m in _series_laws(10).items():
            lhs = S.uplus_power_series(S.boxplus_power_series(m, e.p), e.q)
            rhs = S.boxplus_power_series(S.uplus_power_series(m, e.q_prime), e.p_prime)
            res.exact(f"series commutation {label}, N=10, {name}", lhs == rhs)
        for name, mu in [("bernoulli", BERN), ("half02", HALF02)]:
            res.add(f"analytic commutation {label}, {name}",
                    verify_commutation(mu, e.p, e.q, zs), 1e-9)
    e = commutation_exponents(1, F_(2, 3))
    res.exact("p = 1 gives p' = 1 and q' = q", (e.p_prime, e.q_prime) == (1, F_(2, 3)))
    e = commutation_exponents(F_(3, 2), F_(2, 3))
    res.exact("(3/2, 2/3) -> (2, 1/2)", (e.p_prime, e.q_prime) == (2, F_(1, 2)))


def suite_distributivity(res: SuiteResult):
    N = 10
    pairs = [("half02, q12", HALF02, Q12), ("bernoulli, half02 (NC route)", BERN, HALF02),
             ("three-atom, p13", THREE, P13)]
    for label, mu, nu in pairs:
        a, b = S.moments_of(mu, N), S.moments_of(nu, N)
        ab = S.boxtimes_series(a, b)
        for t in [F_(3, 2), F_(2), F_(3)]:
            lhs = S.boxtimes_series(S.boxplus_power_series(a, t), S.boxplus_power_series(b, t))
            rhs = S.dilate_series(S.boxplus_power_series(ab, t), 1 / t)
            res.exact(f"free powers, t={t}, {label}", lhs == rhs)
        for t in [F_(1, 2), F_(2), F_(3)]:
            inner = S.boxtimes_series(S.uplus_power_series(a, t), S.uplus_power_series(b, t))
            rhs = S.dilate_series(S.uplus_power_series(ab, t), 1 / t)
            res.exact(f"Boolean powers, t={t}, {label}", inner == rhs)
            res.exact(f"Boolean powers, outer 1/t form, t={t}, {label}",
                      S.uplus_power_series(inner, 1 / t) == S.dilate_series(ab, 1 / t))
    m = S.moments_of(HALF02, 8)
    s_m, sig_m = list(S.s_series(m).a), list(S.sigma_series(m).a)
    for t in [F_(2), F_(3)]:
        s_t = list(S.s_series(S.boxplus_power_series(m, t)).a)
        res.exact(f"S of free power t={t}: coefficients s_k / t^(k+1)",
                  s_t == [c / t ** (k + 1) for k, c in enumerate(s_m)])
    for t in [F_(1, 2), F_(3)]:
        sig_t = list(S.sigma_series(S.uplus_power_series(m, t)).a)
        res.exact(f"Sigma of Boolean power t={t}: coefficients / t^(k+1)",
                  sig_t == [c / t ** (k + 1) for k, c in enumerate(sig_m)])
    for r in [F_(1, 2), F_(3)]:
        d = S.dilate_series(m, r)
        res.exact(f"S of dilation r={r}: r S", list(S.s_series(d).a) == [r * c for c in s_m])
        res.exact(f"Sigma of dilation r={r}: r Sigma",
                  list(S.sigma_series(d).a) == [r * c for c in sig_m])
    g = [F_(0)] + [F_(1)] * 7  # z / (1 - z)
    res.exact("Sigma(z) = S(z/(1-z))", S.series_compose(s_m, g, 7) == sig_m)


def suite_bbp(res: SuiteResult):
    for name, m in _series_laws(12).items():
        res.exact(f"bbp = B_1, N=12, {name}", S.bbp_series(m) == S.bt_series(m, 1))
    res.exact("bernoulli -> semicircle moments",
              S.bbp_series(S.moments_of(BERN, 6)).m == (0, 1, 0, 2, 0, 5))
    res.exact("half02 -> Marchenko-Pastur(1) moments",
              S.bbp_series(S.moments_of(HALF02, 4)).m == (1, 2, 5, 14))


def _grid_z():
    return sample_z(20, 13, re=(-2.0, 2.0), im=(0.5, 3.0))


def suite_burgers(res: SuiteResult):
    zs, ts = _grid_z(), [0.25, 0.5, 1.0, 2.0]
    for label, mu in [("bernoulli", BERN), ("meixner(0,0)", JacobiPeriodic(0, 0))]:
        r1 = np.array([s.residual for s in burgers_grid(mu, ts, zs, 1e-3, 1e-3)])
        r2 = np.array([s.residual for s in burgers_grid(mu, ts, zs, 5e-4, 5e-4)])
        res.add(f"Burgers residual, delta=1e-3, {label}", r1.max(), 1e-4)
        ratio = r1 / r2
        res.add(f"halving delta: residual ratio within 4 +- 20%, {label}",
                np.max(np.abs(ratio - 4.0)), 0.8)


def suite_brownian(res: SuiteResult):
    zs, ts = _grid_z(), [0.25, 0.5, 1.0, 2.0]
    for label, mu in [("bernoulli", BERN), ("meixner(1,0)", JacobiPeriodic(1, 0)),
                      ("meixner(0,1/2)", JacobiPeriodic(0, 0.5))]:
        worst = max(np.max(np.abs(brownian_F(mu, t, zs) - F_bt(mu, t, zs))) for t in ts)
        res.add(f"free Brownian route = F_bt, {label}", worst, 1e-8)
        res.add(f"omega = theta, {label}", max(theta_omega_gap(mu, t, zs) for t in ts), 1e-9)
        back = mu_from_nu(nu_from_mu(mu))
        res.add(f"mu -> nu -> mu round trip, {label}",
                np.max(np.abs(back.F(zs) - mu.F(zs))), 1e-13)
    nu = nu_from_mu(BERN)
    res.add("bernoulli -> nu = delta_0", np.max(np.abs(nu.G(zs) - 1 / zs)), 1e-13)
    for b, c in [(1, 0), (0, 0.5), (-1, 1)]:
        nu = nu_from_mu(JacobiPeriodic(b, c))
        res.add(f"meixner({b},{c}) -> semicircle(b, c+1)",
                np.max(np.abs(nu.G(zs) - Semicircle(b, c + 1).G(zs))), 1e-10)
    for mu in [BERN, Atomic([(-2, F_(1, 5)), (F_(1, 2), F_(4, 5))])]:
        # moments of nu from the series identity M_mu(u) = 1 / (1 - u^2 M_nu(u))
        m = S.moments_of(mu, 12)
        inv = S.series_inv([F_(1)] + list(m.m), 12)
        nu_m = [-c for c in inv[2:]]
        u = 0.05j
        psi_series = sum(complex(c) * u**n for n, c in enumerate(nu_m[:11]) if n > 0)
        psi_direct = complex(nu_from_mu(mu).G(1 / u)) / u - 1
        res.add(f"nu moments from series match G_nu, {mu!r}", abs(psi_series - psi_direct), 1e-9)


def suite_meixner(res: SuiteResult):
    zs = sample_z(30, 14)
    for b, c, t in [(0, -1, 1), (1, 0, 0.5), (-1, 1, 2)]:
        res.add(f"B_t shift (b,c,t)=({b},{c},{t})", meixner_bt_shift((b, c), t, zs), 1e-9)
    res.exact("t = 0 shift is exactly 0", meixner_bt_shift((1, 0), 0, zs) == 0.0)
    for bc in [(0, 0), (0, -1), (1, 0), (F_(1, 2), 2), (-1, F_(-1, 2))]:
        a, b = meixner_moments(bc, 10), meixner_moments_from_semicircle(bc, 10)
        res.exact(f"moments: Jacobi route = semicircle route, (b,c)={bc}", a == b)
        G = orthogonality_gram(bc, 3)
        res.exact(f"orthogonality P_0..P_3, (b,c)={bc}",
                  all(G[i][j] == 0 for i in range(4) for j in range(4) if i != j))


def suite_atoms(res: SuiteResult):
    t = 0.25
    reps = [r for r in atom_scan(BERN, t) if r.passed]
    x0 = 1 / math.sqrt(1 - t)
    res.exact("t=1/4: exactly two atoms", len(reps) == 2)
    if len(reps) == 2:
        res.add("t=1/4: locations +-(1-t)^(-1/2)",
                max(abs(reps[0].x + x0), abs(reps[1].x - x0)), 1e-9)
        res.add("t=1/4: masses 1/3", max(abs(r.mass - 1 / 3) for r in reps), 1e-6)
    for t in [0.5, 1.0]:
        res.exact(f"t={t}: no atoms", not any(r.passed for r in atom_scan(BERN, t)))
    rep = atom_scan(RATIONAL_F, 0.5, [2.0])[0]
    res.add("rational-F example: mass at x=2 is 1/3", abs(rep.mass - 1 / 3), 1e-8)
    # mass accounting for B_{1/4}(Bernoulli): continuous part plus atoms
    x = np.linspace(-1.0, 1.0, 2001)
    prof = stieltjes_density(bt_measure(BERN, 0.25), x,
                             atoms=[(-x0, 1 / 3), (x0, 1 / 3)])
    res.add("mass accounting B_1/4(bernoulli)", abs(prof.total_mass_estimate - 1), 0.02)
    dprof = stieltjes_density(bt_measure(Atomic([(F_(1, 2), 1)]), 0.5), np.linspace(-2, 2, 401),
                              atoms=[(0.5, 1.0)])
    res.add("B_t(delta_c) has no continuous part", float(dprof.density.max()), 1e-6)
    res.add("two-atom law has a continuous part (1e-3 / mass)",
            1e-3 / max(prof.continuous_mass, 1e-300), 1.0)


def suite_density(res: SuiteResult):
    x = np.linspace(-1.35, 1.35, 600)
    t0 = time.perf_counter()
    prof = stieltjes_density(bt_measure(BERN, 0.5), x)
    elapsed = time.perf_counter() - t0
    res.add("arcsine density, 600 points", np.max(np.abs(prof.density - 1 / (math.pi * np.sqrt(2 - x**2)))), 1e-4)
    res.add("arcsine runtime seconds", elapsed, 10.0)
    f0 = stieltjes_density(bt_measure(BERN, 0.5), np.array([-1e-3, 0.0, 1e-3])).density[1]
    res.add("arcsine f(0) = 1/(pi sqrt 2)", abs(f0 - 1 / (math.pi * math.sqrt(2))), 1e-5)
    x = np.linspace(-1.9, 1.9, 600)
    prof = stieltjes_density(bt_measure(BERN, 1.0), x)
    res.add("semicircle density", np.max(np.abs(prof.density - np.sqrt(4 - x**2) / (2 * math.pi))), 1e-4)
    for t in [0.5, 1.0, 2.0]:
        x = np.linspace(-1.9 * math.sqrt(t), 1.9 * math.sqrt(t), 400)
        prof = stieltjes_density(bt_measure(BERN, t), x)
        res.add(f"closed-form density of B_t(bernoulli), t={t}",
                np.max(np.abs(prof.density - bernoulli_bt_density(t, x))), 1e-4)
    zs = sample_z(100, 15)
    for t in [0.25, 0.5, 1.0, 2.0]:
        res.add(f"closed-form G of B_t(bernoulli), t={t}",
                np.max(np.abs(1 / F_bt(BERN, t, zs) - bernoulli_bt_G(t, zs))), 1e-9)
    gamma = Semicircle()
    x = np.linspace(-1.5, 1.5, 301)
    devs = density_convergence(gamma, [0.01, 1e-4], x, gamma.density)
    res.add("semicircle, t=0.01: sup |f_t - f_0|", devs[0], 0.05)
    res.add("semicircle, t=1e-4: sup |f_t - f_0|", devs[1], 0.01)
    arcsine = bt_measure(BERN, 0.5)
    xi = np.linspace(-1.2, 1.2, 121)
    dev = density_convergence(arcsine, [0.01], xi, lambda u: 1 / (math.pi * np.sqrt(2 - u**2)))
    res.add("arcsine interior, t=0.01: sup |f_t - f_0|", dev[0], 0.1)
    s = support_infimum(gamma)
    res.add("semicircle support infimum = -2", abs(s.infimum + 2), 0.01)
    mp = bt_measure(HALF02, 1)
    s = support_infimum(mp, grid=np.linspace(-0.5, 4.5, 2001))
    res.add("Marchenko-Pastur(1) support infimum >= -1e-3 (shortfall)", max(0.0, -1e-3 - s.infimum), 0.0)


def suite_table1(res: SuiteResult):
    t0 = time.perf_counter()
    b = S.moments_of(BERN, 4)
    cases = [("bernoulli", b, F_(0)), ("arcsine", S.bt_series(b, F_(1, 2)), F_(1, 2)),
             ("semicircle", S.moments_of(Semicircle(), 4), F_(1)),
             ("Marchenko-Pastur(1)", S.bt_series(S.moments_of(HALF02, 4), 1), F_(1))]
    for name, m, want in cases:
        est = phi_estimate(m, 4)
        res.exact(f"phi_4({name}) = {want} (exact root)", est.exact and est.phi_hat == want)
    c = cauchy_phi()
    res.exact("cauchy: phi = inf", c.phi == math.inf and c.passed)
    res.add("cauchy: free vs Boolean power residual",
            max(v for k, v in c.residuals.items() if not str(k).startswith("B_")), 1e-12)
    res.add("table runtime seconds", time.perf_counter() - t0, 5.0)


def suite_positivity(res: SuiteResult):
    mu0 = Atomic([(-1, F_(1, 4)), (1, F_(3, 4))])
    s8 = support_infimum(boxplus_power(mu0, 8), threshold=0.0)
    res.add("power 8: mass below 0 exceeds 1e-4 (1e-4 / mass)", 1e-4 / max(s8.mass_below, 1e-300), 1.0)
    s16 = support_infimum(boxplus_power(mu0, 16), threshold=-1e-3)
    res.add("power 16: mass below -1e-3", s16.mass_below, 1e-6)


SUITES = {
    "semigroup": suite_semigroup,
    "multiplicativity": suite_multiplicativity,
    "commutation": suite_commutation,
    "distributivity": suite_distributivity,
    "bbp": suite_bbp,
    "burgers": suite_burgers,
    "brownian": suite_brownian,
    "meixner": suite_meixner,
    "atoms": suite_atoms,
    "density": suite_density,
    "table1": suite_table1,
    "positivity": suite_positivity,
}


def run_suite(name: str) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    res = SuiteResult(name)
    t0 = time.perf_counter()
    SUITES[name](res)
    res.seconds = time.perf_counter() - t0
    return res


def run_all():
    return [run_suite(n) for n in SUITES]


def format_table(result: SuiteResult) -> str:
    lines = [f"== {result.name} ({result.seconds:.2f} s) =="]
    for c in result.checks:
        mark = "PASS" if c.passed else "FAIL"
        lines.append(f"{mark}  {c.label:<70s} residual={c.residual:.3e} tol={c.tol:.1e}")
    lines.append(f"suite {'PASS' if result.passed else 'FAIL'}")
    return "\n".join(lines)
