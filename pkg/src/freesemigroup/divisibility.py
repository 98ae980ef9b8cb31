"""The divisibility indicator ``phi(mu) = sup{t >= 0 : mu = B_t(nu) for some law nu}``.

On the series backend the candidate ``nu`` is :func:`inverse_bt_series`
applied to the truncated moments.  The order-``N`` estimate keeps the
largest ``t`` at which that candidate still passes exact Hankel
positivity.  A truncated Hankel test is only necessary, so the estimate
is an upper bound for ``phi``.  The boundary is found by bisection and
then, when possible, pinned exactly at a rational root of a Hankel minor
viewed as a polynomial in ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .errors import ConvergenceError, DomainError
from .measures import CauchyStd, Measure, _as_complex, _check_upper, to_fraction, uplus_power
from .semigroup import F_bt
from .series import (
    MomentSeries,
    _det,
    boxplus_power_series,
    hankel_matrix,
    hankel_positive,
    uplus_power_series,
)
from .subordination import F_boxplus_power

T_MAX = Fraction(8)
BISECTION_STEPS = 40
DEFAULT_S_GRID = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 8), Fraction(1, 10))

__all__ = [
    "IndicatorEstimate",
    "CauchyIndicator",
    "InfDivResult",
    "inverse_bt_series",
    "candidate_minors",
    "phi_estimate",
    "cauchy_phi",
    "infdiv_check",
]


def inverse_bt_series(m: MomentSeries, t) -> MomentSeries:
    """Series ``nu`` with ``B_t(nu) = m``.

    Boolean cumulants are scaled by ``1+t``, and the free cumulants of
    the result are then divided by ``1+t``.  Whether ``nu`` is a genuine
    law is not asserted.
    """
    t = to_fraction(t)
    if t < 0:
        raise DomainError("inverse B_t requires t >= 0")
    if t == 0:
        return m
    out = boxplus_power_series(uplus_power_series(m, 1 + t), 1 / (1 + t))
    return MomentSeries(out.m, m.approximate, False)


@dataclass(frozen=True)
class IndicatorEstimate:
    order: int
    phi_hat: Fraction | None
    exact: bool
    trace: tuple = field(default_factory=tuple)
    at_cap: bool = False
    infinite: bool = False

    def to_json(self):
        if self.infinite:
            phi = "inf"
        elif self.at_cap:
            phi = f">={self.phi_hat}"
        else:
            phi = str(self.phi_hat)
        return {"N": self.order, "phi_hat": phi, "exact": self.exact,
                "trace": [[str(t), ok] for t, ok in self.trace]}


def _passes(m, t):
    return hankel_positive(inverse_bt_series(m, t)).passed


def _interpolate(ts, values):
    """Coefficients (lowest first) of the interpolating polynomial, via Newton divided differences."""
    n = len(ts)
    coef = list(values)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (ts[i] - ts[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - ts[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - ts[i] * p for s, p in zip(shifted, poly)]
        poly[0] += coef[i]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def candidate_minors(m: MomentSeries, k: int):
    """Leading Hankel minor of size ``k+1`` of the candidate, as a polynomial in ``t``.

    The candidate's moments are polynomials in ``t`` of degree below ``n``,
    so the minor has degree at most ``k(k+1)``.  It is recovered exactly
    by interpolation and checked at one extra node.
    """
    deg = k * (k + 1)
    ts = [Fraction(j) for j in range(deg + 2)]

    def minor(t):
        H = hankel_matrix(inverse_bt_series(m, t))
        return _det([row[:k + 1] for row in H[:k + 1]])

    vals = [minor(t) for t in ts]
    poly = _interpolate(ts[:-1], vals[:-1])
    check = sum(c * ts[-1] ** i for i, c in enumerate(poly))
    if check != vals[-1]:  # pragma: no cover - would mean the degree bound is wrong
        raise ConvergenceError("Hankel minor is not polynomial of the expected degree")
    return poly


def _rational_roots(poly):
    x = sympy.Symbol("x")
    p = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(poly)], x,
                   domain="QQ")
    if p.is_zero:
        return []
    return sorted(Fraction(int(r.p), int(r.q)) for r in p.ground_roots())


def _exact_boundary(m, lo, hi):
    """Rational ``r`` in ``[lo, hi]`` that is the sup of the pass set, or ``None``."""
    cand = inverse_bt_series(m, hi)
    H = hankel_matrix(cand)
    for k in range(len(H)):
        if _det([row[:k + 1] for row in H[:k + 1]]) < 0:
            break
    else:
        return None
    poly = candidate_minors(m, k)
    roots = [r for r in _rational_roots(poly) if lo <= r <= hi]
    if not roots:
        return None
    r = roots[-1]
    # the minor is negative on (r, hi] because no further root lies there
    return r if _passes(m, r) else None


def phi_estimate(m: MomentSeries, N: int | None = None, t_max=T_MAX,
                 steps: int = BISECTION_STEPS) -> IndicatorEstimate:
    """Order-``N`` upper estimate of the divisibility indicator.

    Raises
    ------
    DomainError
        If ``N`` is not even and at least 4, exceeds the available
        moments, or the input itself fails the Hankel test.
    """
    N = m.order if N is None else N
    if N < 4 or N % 2 or N > m.order:
        raise DomainError("phi estimate needs an even order 4 <= N <= available moments")
    m = m.truncate(N)
    t_max = to_fraction(t_max)
    if not _passes(m, 0):
        raise DomainError("moments fail the Hankel test: not a moment sequence")
    trace = [(Fraction(0), True)]
    if _passes(m, t_max):
        trace.append((t_max, True))
        return IndicatorEstimate(N, t_max, False, tuple(trace), at_cap=True)
    trace.append((t_max, False))
    lo, hi = Fraction(0), t_max
    for _ in range(steps):
        mid = (lo + hi) / 2
        ok = _passes(m, mid)
        trace.append((mid, ok))
        if ok:
            lo = mid
        else:
            hi = mid
    passes = [t for t, ok in trace if ok]
    fails = [t for t, ok in trace if not ok]
    if max(passes) >= min(fails):  # pragma: no cover - pass set not down-closed
        raise DomainError("Hankel pass set is not an interval; estimate undefined")
    r = _exact_boundary(m, lo, hi)
    if r is not None:
        return IndicatorEstimate(N, r, True, tuple(trace))
    return IndicatorEstimate(N, lo, False, tuple(trace))


# ---------------------------------------------------------------------------
# Cauchy law


@dataclass(frozen=True)
class CauchyIndicator:
    phi: float
    residuals: dict
    passed: bool


def _boxplus_power_newton(mu: Measure, T, z, tol=1e-14, max_iter=100):
    """``F_{mu^{boxplus T}}`` by Newton on ``H(w) = T w + (1-T) F_mu(w) = z``.

    Used for ``T < 1``, where the Picard map is not a contraction.  The
    root need not lie in the upper half-plane there.
    """
    w = z.copy()
    for _ in range(max_iter):
        Hw = T * w + (1.0 - T) * _as_complex(mu.F(w))
        dH = T + (1.0 - T) * _as_complex(mu.dF(w))
        step = (Hw - z) / dH
        w = w - step
        if np.all(np.abs(step) <= tol * (1.0 + np.abs(z))):
            break
    else:
        raise ConvergenceError("Newton solve of H(w) = z did not converge")
    return (T * w - z) / (T - 1.0)


def cauchy_phi(ts=(0.5, 1.0, 5.0), zs=None, tol=1e-12) -> CauchyIndicator:
    """``phi = inf`` for the Cauchy law, certified by powers that coincide.

    For each ``t`` the free power (subordination) and the Boolean power
    (linear formula) are both compared with ``z + t i``.  The certificate
    also records the residual of ``B_t`` fixing the law.
    """
    mu = CauchyStd()
    if zs is None:
        rng = np.random.default_rng(7)
        zs = rng.uniform(-5, 5, 20) + 1j * rng.uniform(0.1, 5, 20)
    zs = _check_upper(np.asarray(zs, dtype=complex))
    residuals = {}
    for t in ts:
        t = float(t)
        target = zs + 1j * t
        if t == 1:
            free = _as_complex(mu.F(zs))
        elif t > 1:
            free = _as_complex(F_boxplus_power(mu, t, zs, tol=1e-15))
        else:
            free = _boxplus_power_newton(mu, t, zs)
        boolean = _as_complex(uplus_power(mu, t).F(zs))
        residuals[t] = max(float(np.max(np.abs(free - target))),
                           float(np.max(np.abs(boolean - target))))
        residuals[f"B_{t}"] = float(np.max(np.abs(_as_complex(F_bt(mu, t, zs)) - (zs + 1j))))
    passed = all(v <= (tol if not str(k).startswith("B_") else 1e-10) for k, v in residuals.items())
    return CauchyIndicator(math.inf, residuals, passed)


# ---------------------------------------------------------------------------
# infinite divisibility


@dataclass(frozen=True)
class InfDivResult:
    passed: bool
    hankel_failures: tuple
    phi: IndicatorEstimate | None


def infdiv_check(m: MomentSeries, s_grid=DEFAULT_S_GRID, N: int | None = None) -> InfDivResult:
    """Necessary test for free infinite divisibility, combined with ``phi_hat >= 1``.

    Every subunitary free power on ``s_grid`` must pass the Hankel test
    and the order-``N`` indicator estimate must reach 1.
    """
    failures = []
    for s in s_grid:
        s = to_fraction(s)
        if not 0 < s < 1:
            raise DomainError("s grid must lie in (0, 1)")
        if not hankel_positive(boxplus_power_series(m, s)).passed:
            failures.append(s)
    N = N if N is not None else (m.order if m.order % 2 == 0 else m.order - 1)
    est = phi_estimate(m, N)
    ok = not failures and est.phi_hat >= 1
    return InfDivResult(bool(ok), tuple(failures), est)
