"""Exact rational calculus on truncated moment sequences.

A compactly supported law is represented here by its moments
``m_1, ..., m_N`` (``m_0 = 1`` implicitly), stored as ``Fraction``.  The
free cumulants ``kappa_n`` are the coefficients of the R-transform
``R(z) = sum kappa_n z**n`` and the Boolean cumulants ``beta_n`` are the
coefficients of ``eta(z) = psi(z) / (1 + psi(z))``, where
``psi(z) = sum m_n z**n``.

Convolution powers act linearly on cumulants::

    kappa(mu^{boxplus t}) = t * kappa(mu)
    beta(mu^{uplus t})    = t * beta(mu)

No floating point is used anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import DomainError
from .measures import (
    Atomic,
    CauchyStd,
    GridDensity,
    JacobiPeriodic,
    Measure,
    Semicircle,
    to_fraction,
)
from .ncpart import block_types, kreweras_types, MAX_N

DEFAULT_ORDER = 12

__all__ = [
    "MomentSeries",
    "CumulantSeries",
    "PowerSeriesRatio",
    "HankelCertificate",
    "moments_of",
    "free_cumulants",
    "moments_from_free",
    "boolean_cumulants",
    "moments_from_boolean",
    "boxplus_power_series",
    "uplus_power_series",
    "dilate_series",
    "s_series",
    "sigma_series",
    "moments_from_s",
    "boxtimes_series",
    "bt_series",
    "bbp_series",
    "hankel_positive",
    "jacobi_moments",
    "semicircle_moments",
    "series_mul",
    "series_inv",
    "series_compose",
    "series_revert",
    "free_moments_nc",
    "hankel_matrix",
]


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _parse_frac(s) -> Fraction:
    return Fraction(s) if isinstance(s, str) else to_fraction(s)


@dataclass(frozen=True)
class MomentSeries:
    """Moments ``m_1..m_N`` of a law; ``self[0] == 1``."""

    m: tuple
    approximate: bool = False
    realizable: bool = False

    def __post_init__(self):
        if len(self.m) < 1:
            raise DomainError("moment series needs order N >= 1")
        object.__setattr__(self, "m", tuple(to_fraction(x) for x in self.m))

    @property
    def order(self) -> int:
        return len(self.m)

    def __getitem__(self, n):
        return Fraction(1) if n == 0 else self.m[n - 1]

    def truncate(self, N):
        return MomentSeries(self.m[:N], self.approximate, self.realizable)

    def to_json(self):
        return [_frac_str(x) for x in self.m]

    @classmethod
    def from_json(cls, data):
        return cls(tuple(_parse_frac(x) for x in data))

    def __eq__(self, other):
        if not isinstance(other, MomentSeries):
            return NotImplemented
        return self.m == other.m

    def __hash__(self):
        return hash(self.m)


@dataclass(frozen=True)
class CumulantSeries:
    """Free (``kind='free'``) or Boolean (``kind='boolean'``) cumulants, indices 1..N."""

    kind: str
    c: tuple

    def __post_init__(self):
        if self.kind not in ("free", "boolean"):
            raise DomainError(f"unknown cumulant kind {self.kind!r}")
        object.__setattr__(self, "c", tuple(to_fraction(x) for x in self.c))

    @property
    def order(self) -> int:
        return len(self.c)

    def __getitem__(self, n):
        return self.c[n - 1]

    def to_json(self):
        return [_frac_str(x) for x in self.c]


@dataclass(frozen=True)
class PowerSeriesRatio:
    """Truncated formal series ``sum_{k>=0} a_k z**k`` tagged by transform role."""

    role: str
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(to_fraction(x) for x in self.a))

    @property
    def order(self) -> int:
        return len(self.a) - 1

    def to_json(self):
        return [_frac_str(x) for x in self.a]


@dataclass(frozen=True)
class HankelCertificate:
    passed: bool
    minors: tuple = field(default_factory=tuple)
    failed_at: int | None = None

    def __bool__(self):
        return self.passed


# ---------------------------------------------------------------------------
# formal power series on coefficient lists (index = degree)


def series_mul(a, b, N):
    out = [Fraction(0)] * (N + 1)
    for i, ai in enumerate(a[:N + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[:N + 1 - i]):
            out[i + j] += ai * bj
    return out


def series_inv(a, N):
    """Reciprocal ``1/a`` to degree ``N``; needs ``a[0] != 0``."""
    a0 = Fraction(a[0])
    if a0 == 0:
        raise DomainError("series has no reciprocal (zero constant term)")
    out = [Fraction(0)] * (N + 1)
    out[0] = 1 / a0
    for n in range(1, N + 1):
        s = sum(a[k] * out[n - k] for k in range(1, min(n, len(a) - 1) + 1))
        out[n] = -s / a0
    return out


def series_compose(f, g, N):
    """``f(g(z))`` to degree ``N``; needs ``g[0] == 0``."""
    if g and g[0] != 0:
        raise DomainError("inner series must vanish at 0")
    out = [Fraction(0)] * (N + 1)
    power = [Fraction(1)] + [Fraction(0)] * N
    for k, fk in enumerate(f[:N + 1]):
        if k > 0:
            power = series_mul(power, g, N)
        if fk != 0:
            for i in range(N + 1):
                out[i] += fk * power[i]
    return out


def series_revert(f, N):
    """Compositional inverse of ``f`` (``f[0] == 0``, ``f[1] != 0``) by Lagrange inversion.

    ``[z^n] f^{-1} = (1/n) [w^{n-1}] (w / f(w))**n``.
    """
    if f[0] != 0 or len(f) < 2 or f[1] == 0:
        raise DomainError("series is not invertible under composition")
    phi = series_inv(list(f[1:]), N)
    out = [Fraction(0)] * (N + 1)
    power = [Fraction(1)] + [Fraction(0)] * N
    for n in range(1, N + 1):
        power = series_mul(power, phi, N)
        out[n] = power[n - 1] / n
    return out


# ---------------------------------------------------------------------------
# moments of concrete laws


def semicircle_moments(mean, variance, N):
    """Moments of the semicircle law with the given mean and variance."""
    b, t = to_fraction(mean), to_fraction(variance)
    out = []
    for n in range(1, N + 1):
        # central moments are Catalan-weighted: E[(X-b)^{2k}] = C_k t^k
        out.append(sum(comb(n, 2 * k) * b ** (n - 2 * k) * t**k * comb(2 * k, k) / (k + 1)
                       for k in range(n // 2 + 1)))
    return MomentSeries(tuple(out), realizable=True)


def jacobi_moments(alpha, beta, N):
    """Moments from Jacobi parameters as weighted Motzkin path sums.

    ``alpha(k)`` is the level-``k`` diagonal coefficient and ``beta(k)``
    (``k >= 1``) the weight of a down-step from level ``k``.
    """
    depth = N // 2 + 1
    v = [Fraction(0)] * (depth + 1)
    v[0] = Fraction(1)
    out = []
    for _ in range(N):
        w = [Fraction(0)] * (depth + 1)
        for k in range(depth + 1):
            if v[k] == 0:
                continue
            w[k] += alpha(k) * v[k]
            if k + 1 <= depth:
                w[k + 1] += v[k]
            if k >= 1:
                w[k - 1] += beta(k) * v[k]
        v = w
        out.append(v[0])
    return tuple(out)


def moments_of(mu: Measure, N: int = DEFAULT_ORDER) -> MomentSeries:
    """Moment series of ``mu`` to order ``N``."""
    if N < 1:
        raise DomainError("order must be >= 1")
    if isinstance(mu, CauchyStd):
        raise DomainError("moments undefined for the Cauchy law")
    if isinstance(mu, Atomic):
        return MomentSeries(tuple(sum(w * x**n for x, w in mu.exact_atoms)
                                  for n in range(1, N + 1)), realizable=True)
    if isinstance(mu, Semicircle):
        return semicircle_moments(mu.mean, mu.variance, N)
    if isinstance(mu, JacobiPeriodic):
        b, s = to_fraction(mu.b), to_fraction(mu.c) + 1
        m = jacobi_moments(lambda k: Fraction(0) if k == 0 else b,
                           lambda k: Fraction(1) if k == 1 else s, N)
        return MomentSeries(m, realizable=True)
    if isinstance(mu, GridDensity):
        c = mu._c
        return MomentSeries(tuple(Fraction(float((c * mu.x**n).sum())) for n in range(1, N + 1)),
                            approximate=True)
    raise DomainError(f"moments unavailable for {mu!r}")


# ---------------------------------------------------------------------------
# cumulant conversions


def _psi(ms: MomentSeries):
    return [Fraction(0)] + list(ms.m)


def boolean_cumulants(ms: MomentSeries) -> CumulantSeries:
    """Boolean cumulants: coefficients of ``psi / (1 + psi)``."""
    N = ms.order
    p = _psi(ms)
    one_plus = [Fraction(1)] + p[1:]
    eta = series_mul(p, series_inv(one_plus, N), N)
    return CumulantSeries("boolean", tuple(eta[1:]))


def moments_from_boolean(cs: CumulantSeries) -> MomentSeries:
    if cs.kind != "boolean":
        raise DomainError("expected Boolean cumulants")
    N = cs.order
    e = [Fraction(0)] + list(cs.c)
    one_minus = [Fraction(1)] + [-x for x in cs.c]
    p = series_mul(e, series_inv(one_minus, N), N)
    return MomentSeries(tuple(p[1:]))


def free_cumulants(ms: MomentSeries) -> CumulantSeries:
    """Free cumulants from ``M(z) = 1 + R(z M(z))`` with ``M = 1 + psi``."""
    N = ms.order
    zM = [Fraction(0), Fraction(1)] + list(ms.m[:N - 1])
    powers = []
    cur = [Fraction(1)] + [Fraction(0)] * N
    for _ in range(N):
        cur = series_mul(cur, zM, N)
        powers.append(cur)
    kappa = []
    for n in range(1, N + 1):
        s = ms[n] - sum(kappa[j] * powers[j][n] for j in range(n - 1))
        kappa.append(s)
    return CumulantSeries("free", tuple(kappa))


def moments_from_free(cs: CumulantSeries) -> MomentSeries:
    if cs.kind != "free":
        raise DomainError("expected free cumulants")
    N = cs.order
    M = [Fraction(1)] + [Fraction(0)] * N
    r = [Fraction(0)] + list(cs.c)
    for _ in range(N):
        zM = [Fraction(0)] + M[:N]
        M = series_compose(r, zM, N)
        M[0] += 1
    return MomentSeries(tuple(M[1:]))


# ---------------------------------------------------------------------------
# convolution powers and dilation


def boxplus_power_series(ms: MomentSeries, t) -> MomentSeries:
    """Free additive power: ``kappa -> t kappa``.

    Allowed for every ``t > 0``; for ``t < 1`` the result need not be a
    moment sequence (check with :func:`hankel_positive`).
    """
    t = to_fraction(t)
    if t <= 0:
        raise DomainError("free power requires t > 0")
    k = free_cumulants(ms)
    out = moments_from_free(CumulantSeries("free", tuple(t * x for x in k.c)))
    return MomentSeries(out.m, ms.approximate, ms.realizable and t >= 1)


def uplus_power_series(ms: MomentSeries, t) -> MomentSeries:
    """Boolean power: ``beta -> t beta``."""
    t = to_fraction(t)
    if t <= 0:
        raise DomainError("Boolean power requires t > 0")
    b = boolean_cumulants(ms)
    out = moments_from_boolean(CumulantSeries("boolean", tuple(t * x for x in b.c)))
    return MomentSeries(out.m, ms.approximate, ms.realizable)


def dilate_series(ms: MomentSeries, r) -> MomentSeries:
    """Moments of ``mu o D_r`` (the law of ``X/r``): ``m_n -> m_n / r**n``."""
    r = to_fraction(r)
    if r <= 0:
        raise DomainError("dilation factor must be positive")
    return MomentSeries(tuple(x / r**n for n, x in enumerate(ms.m, start=1)),
                        ms.approximate, ms.realizable)


def bt_series(ms: MomentSeries, t) -> MomentSeries:
    """``B_t``: free power ``1+t`` followed by Boolean power ``1/(1+t)``."""
    t = to_fraction(t)
    if t < 0:
        raise DomainError("B_t requires t >= 0")
    if t == 0:
        return ms
    return uplus_power_series(boxplus_power_series(ms, 1 + t), 1 / (1 + t))


def bbp_series(ms: MomentSeries) -> MomentSeries:
    """Boolean-to-free Bercovici-Pata map: free cumulants of the image are the Boolean cumulants."""
    b = boolean_cumulants(ms)
    out = moments_from_free(CumulantSeries("free", b.c))
    return MomentSeries(out.m, ms.approximate, ms.realizable)


# ---------------------------------------------------------------------------
# S and Sigma transforms, free multiplicative convolution


def s_series(ms: MomentSeries) -> PowerSeriesRatio:
    """``S(z) = (1+z)/z * psi^{-1}(z)``, coefficients of degree 0..N-1."""
    if ms[1] == 0:
        raise DomainError("S-transform undefined: first moment is zero")
    N = ms.order
    inv = series_revert(_psi(ms), N)
    q = inv[1:]  # psi^{-1}(z) / z
    s = series_mul([Fraction(1), Fraction(1)], q, N - 1)
    return PowerSeriesRatio("S", tuple(s))


def sigma_series(ms: MomentSeries) -> PowerSeriesRatio:
    """``Sigma(z) = eta^{-1}(z) / z``, coefficients of degree 0..N-1."""
    if ms[1] == 0:
        raise DomainError("Sigma-transform undefined: first moment is zero")
    N = ms.order
    eta = [Fraction(0)] + list(boolean_cumulants(ms).c)
    inv = series_revert(eta, N)
    return PowerSeriesRatio("Sigma", tuple(inv[1:]))


def moments_from_s(S: PowerSeriesRatio) -> MomentSeries:
    """Invert :func:`s_series`: ``psi^{-1}(z) = z S(z) / (1+z)``."""
    N = S.order + 1
    q = series_mul(list(S.a), series_inv([Fraction(1), Fraction(1)], N - 1), N - 1)
    inv = [Fraction(0)] + q
    p = series_revert(inv, N)
    return MomentSeries(tuple(p[1:]))


def _boxtimes_nc(a: MomentSeries, b: MomentSeries, N):
    ka = free_cumulants(a)
    out = []
    for n in range(1, N + 1):
        total = Fraction(0)
        for (tp, tk), count in kreweras_types(n).items():
            term = Fraction(count)
            for s in tp:
                term *= ka[s]
                if term == 0:
                    break
            else:
                for s in tk:
                    term *= b[s]
                total += term
        out.append(total)
    return tuple(out)


def boxtimes_series(a: MomentSeries, b: MomentSeries, route: str = "auto") -> MomentSeries:
    """Moments of ``mu boxtimes nu`` (``nu`` assumed supported on ``[0, inf)``).

    ``route='s'`` multiplies S-transforms and needs both first moments
    nonzero; ``route='nc'`` sums ``kappa_pi(mu) m_{K(pi)}(nu)`` over
    non-crossing partitions.  ``'auto'`` picks the S route when it applies.
    """
    N = min(a.order, b.order)
    a, b = a.truncate(N), b.truncate(N)
    if route == "auto":
        route = "s" if a[1] != 0 and b[1] != 0 else "nc"
    if route == "s":
        sa, sb = s_series(a), s_series(b)
        prod = series_mul(list(sa.a), list(sb.a), N - 1)
        m = moments_from_s(PowerSeriesRatio("S", tuple(prod))).m
    elif route == "nc":
        if N > MAX_N:
            raise DomainError(f"non-crossing route limited to order {MAX_N}")
        m = _boxtimes_nc(a, b, N)
    else:
        raise DomainError(f"unknown boxtimes route {route!r}")
    return MomentSeries(m, a.approximate or b.approximate, a.realizable and b.realizable)


def free_moments_nc(cs: CumulantSeries) -> MomentSeries:
    """Moments as sums over non-crossing partitions (cross-check for :func:`moments_from_free`)."""
    out = []
    for n in range(1, cs.order + 1):
        total = Fraction(0)
        for sizes, count in block_types(n).items():
            term = Fraction(count)
            for s in sizes:
                term *= cs[s]
            total += term
        out.append(total)
    return MomentSeries(tuple(out))


# ---------------------------------------------------------------------------
# Hankel positivity


def _det(rows):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def hankel_matrix(ms: MomentSeries):
    K = ms.order // 2
    return [[ms[i + j] for j in range(K + 1)] for i in range(K + 1)]


def hankel_positive(ms: MomentSeries) -> HankelCertificate:
    """Exact positive-semidefiniteness test of ``[m_{i+j}]``, ``0 <= i, j <= N//2``.

    The certificate records every leading principal minor.  The verdict
    comes from symmetric elimination: a zero pivot passes only when its
    whole remaining row vanishes, so singular but semidefinite matrices
    (finitely supported laws) pass.
    """
    H = hankel_matrix(ms)
    n = len(H)
    minors = tuple(_det([row[:k + 1] for row in H[:k + 1]]) for k in range(n))
    a = [list(r) for r in H]
    for k in range(n):
        p = a[k][k]
        if p < 0:
            return HankelCertificate(False, minors, k)
        if p == 0:
            if any(a[k][j] != 0 for j in range(k + 1, n)):
                return HankelCertificate(False, minors, k)
            continue
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f == 0:
                continue
            for j in range(k + 1, n):
                a[i][j] -= f * a[k][j]
    return HankelCertificate(True, minors, None)
