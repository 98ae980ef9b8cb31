"""Free Meixner laws ``mu_{b,c}`` (mean 0, variance 1).

Their monic orthogonal polynomials satisfy ``P_0 = 1``, ``P_1(x) = x`` and::

    x P_1 = P_2 + b P_1 + P_0
    x P_n = P_{n+1} + b P_n + (c+1) P_{n-1},   n >= 2

so the Jacobi parameters are ``alpha = (0, b, b, ...)`` and
``beta = (1, c+1, c+1, ...)``.  The periodic tail makes
``F(z) = z - G_{gamma_{b,c+1}}(z)``, and ``B_t`` shifts ``c`` to ``c + t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .measures import JacobiPeriodic, _as_complex, _check_upper, _out, to_fraction
from .semigroup import F_bt
from .series import MomentSeries, moments_of, semicircle_moments, series_inv

__all__ = [
    "MeixnerParams",
    "meixner_measure",
    "meixner_G",
    "meixner_bt_shift",
    "meixner_moments",
    "meixner_moments_from_semicircle",
    "orthogonal_polynomials",
    "orthogonality_gram",
]


@dataclass(frozen=True)
class MeixnerParams:
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if not self.c >= -1:
            raise DomainError("free Meixner parameter c must satisfy c >= -1")


def _params(params):
    if isinstance(params, MeixnerParams):
        return params
    b, c = params
    return MeixnerParams(b, c)


def meixner_measure(params) -> JacobiPeriodic:
    p = _params(params)
    return JacobiPeriodic(p.b, p.c)


def meixner_G(params, z):
    """Cauchy transform ``1 / (z - T(z))`` with the periodic tail ``T = 1/(z - b - (c+1) T)``.

    At ``c = -1`` the tail is ``1/(z - b)`` and the law has two atoms.
    """
    z = _check_upper(z)
    mu = meixner_measure(params)
    return _out(1.0 / (z - _as_complex(mu.tail(z))), z)


def meixner_bt_shift(params, t, zs) -> float:
    """Max ``|F_{B_t(mu_{b,c})} - F_{mu_{b,c+t}}|`` over ``zs``; zero at ``t = 0``."""
    p = _params(params)
    if t == 0:
        return 0.0
    zs = _check_upper(np.asarray(zs, dtype=complex))
    lhs = _as_complex(F_bt(meixner_measure(p), t, zs))
    rhs = _as_complex(JacobiPeriodic(p.b, p.c + t).F(zs))
    return float(np.max(np.abs(lhs - rhs)))


def meixner_moments(params, N: int) -> MomentSeries:
    """Exact moments from the Jacobi parameters (Motzkin path weights)."""
    p = _params(params)
    return moments_of(JacobiPeriodic(to_fraction(p.b), to_fraction(p.c)), N)


def meixner_moments_from_semicircle(params, N: int) -> MomentSeries:
    """Independent route: ``M_mu(u) = 1 / (1 - u**2 M_gamma(u))`` with ``gamma = gamma_{b,c+1}``.

    Here ``M`` is the moment generating series ``sum m_n u**n``.
    """
    p = _params(params)
    g = semicircle_moments(to_fraction(p.b), to_fraction(p.c) + 1, N)
    denom = [Fraction(1), Fraction(0)] + [-g[n] for n in range(0, N - 1)]
    M = series_inv(denom, N)
    return MomentSeries(tuple(M[1:]), realizable=True)


def orthogonal_polynomials(params, n_max: int):
    """Coefficient lists (lowest degree first) of ``P_0 .. P_{n_max}``."""
    p = _params(params)
    b, s = to_fraction(p.b), to_fraction(p.c) + 1
    polys = [[Fraction(1)], [Fraction(0), Fraction(1)]]
    for n in range(1, n_max):
        beta = Fraction(1) if n == 1 else s
        nxt = [Fraction(0)] + polys[n]
        for k, a in enumerate(polys[n]):
            nxt[k] -= b * a
        for k, a in enumerate(polys[n - 1]):
            nxt[k] -= beta * a
        polys.append(nxt)
    return polys[: n_max + 1]


def orthogonality_gram(params, n_max: int = 3):
    """Exact matrix ``[int P_i P_j d mu]`` for ``i, j <= n_max``; it must be diagonal."""
    polys = orthogonal_polynomials(params, n_max)
    m = meixner_moments(params, 2 * n_max)
    out = []
    for pi in polys:
        row = []
        for pj in polys:
            row.append(sum(a * c * m[i + j] for i, a in enumerate(pi) for j, c in enumerate(pj)))
        out.append(row)
    return out

