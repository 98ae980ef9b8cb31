"""Probability measures on the real line and their analytic transforms.

Every measure exposes its Cauchy transform ``G`` and reciprocal Cauchy
transform ``F = 1/G`` on the upper half-plane.  All evaluators accept a
complex scalar or a numpy array and broadcast elementwise.

The transforms follow the usual conventions::

    G(z)   = int dmu(s) / (z - s)
    F(z)   = 1 / G(z)
    psi(z) = (1/z) G(1/z) - 1          (moment generating function)
    eta(z) = 1 - z F(1/z)              (Boolean cumulant series)
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

import numpy as np

from .errors import DomainError

__all__ = [
    "Measure",
    "Atomic",
    "GridDensity",
    "Semicircle",
    "CauchyStd",
    "JacobiPeriodic",
    "ProceduralF",
    "cauchy_G",
    "reciprocal_F",
    "psi",
    "eta",
    "dilate",
    "uplus_power",
    "boolean_convolve",
    "measure_from_spec",
    "bernoulli",
    "to_fraction",
]

WEIGHT_TOL = 1e-14


def to_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(repr(float(x)))


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _out(value, like):
    """Return a Python scalar when the input was a scalar."""
    if np.ndim(like) == 0:
        return complex(np.asarray(value).reshape(()))
    return value


def _check_upper(z):
    z = _as_complex(z)
    if np.any(~(z.imag > 0)):
        raise DomainError("transform requires Im z > 0")
    return z


def semicircle_branch(w, variance):
    """Root of ``variance*g**2 - w*g + 1 = 0`` that is a Cauchy transform.

    Both roots are formed and the one with the smaller imaginary part is
    kept; for ``Im w > 0`` exactly one root lies in the lower half-plane.
    """
    w = _as_complex(w)
    r = np.sqrt(w * w - 4.0 * variance)
    g1 = (w - r) / (2.0 * variance)
    g2 = (w + r) / (2.0 * variance)
    return np.where(g1.imag <= g2.imag, g1, g2)


class Measure:
    """Base class.  Subclasses implement ``G`` or ``F`` on the upper half-plane."""

    positive = False
    renormalized = False

    def G(self, z):
        z = _as_complex(z)
        return _out(1.0 / _as_complex(self.F(z)), z)

    def F(self, z):
        z = _as_complex(z)
        return _out(1.0 / _as_complex(self.G(z)), z)

    def dF(self, z):
        """Derivative of ``F``; central difference along the real axis by default."""
        z = _as_complex(z)
        h = 1e-6 * (1.0 + np.abs(z))
        d = (_as_complex(self.F(z + h)) - _as_complex(self.F(z - h))) / (2.0 * h)
        return _out(d, z)

    def F_partial(self, z):
        """``(F(z), ok)`` on an array; ``ok`` marks points whose evaluation succeeded.

        Solver-backed laws override this so that one failing point does
        not spoil the whole array.
        """
        z = _as_complex(z)
        return _as_complex(self.F(z)), np.ones(z.shape, dtype=bool)

    def support_hint(self):
        """Interval expected to contain the support, or ``None`` if unknown."""
        return None

    def real_evaluable(self, x) -> bool:
        """Whether ``G`` may be evaluated at the real points ``x``."""
        return False


class Atomic(Measure):
    """Finitely many atoms ``sum_k w_k delta_{x_k}``."""

    def __init__(self, atoms):
        atoms = [(x, w) for x, w in atoms]
        if not atoms:
            raise DomainError("atomic measure needs at least one atom")
        exact_w = [to_fraction(w) for _, w in atoms]
        if any(w <= 0 for w in exact_w):
            raise DomainError("atom weights must be positive")
        total = sum(exact_w)
        if abs(float(total) - 1.0) > WEIGHT_TOL:
            warnings.warn(f"atom weights sum to {float(total)!r}; renormalizing")
            self.renormalized = True
        exact_w = [w / total for w in exact_w]
        self.exact_atoms = tuple((to_fraction(x), w) for (x, _), w in zip(atoms, exact_w))
        self.x = np.array([float(x) for x, _ in self.exact_atoms])
        self.w = np.array([float(w) for _, w in self.exact_atoms])
        self.positive = bool(np.all(self.x >= 0))

    def __repr__(self):
        pairs = ", ".join(f"({x}, {w})" for x, w in self.exact_atoms)
        return f"Atomic([{pairs}])"

    def G(self, z):
        z = _as_complex(z)
        g = np.sum(self.w / (z[..., None] - self.x), axis=-1)
        return _out(g, z)

    def dF(self, z):
        z = _as_complex(z)
        diff = z[..., None] - self.x
        g = np.sum(self.w / diff, axis=-1)
        dg = -np.sum(self.w / diff**2, axis=-1)
        return _out(-dg / g**2, z)

    def support_hint(self):
        return float(self.x.min()), float(self.x.max())

    def real_evaluable(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.min(np.abs(x[..., None] - self.x), axis=-1) > 0))


class GridDensity(Measure):
    """Absolutely continuous law given by samples on a uniform grid.

    Transforms use the trapezoid rule, so errors are O(dx**2) for smooth
    densities.
    """

    def __init__(self, x, values):
        x = np.asarray(x, dtype=float)
        f = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != f.shape or x.size < 3:
            raise DomainError("grid and values must be 1-d arrays of equal length >= 3")
        dx = np.diff(x)
        if np.any(dx <= 0) or np.ptp(dx) > 1e-9 * dx.mean():
            raise DomainError("grid must be uniform and strictly increasing")
        if np.any(f < 0):
            raise DomainError("density values must be non-negative")
        self.dx = float(dx.mean())
        self.x = x
        c = np.full(x.size, self.dx)
        c[0] = c[-1] = self.dx / 2
        mass = float(np.dot(c, f))
        if mass <= 0:
            raise DomainError("density has zero mass")
        self.values = f / mass
        self._c = c * self.values
        self.positive = bool(x[0] >= 0)

    @classmethod
    def from_function(cls, density, xmin, xmax, n=4001):
        x = np.linspace(xmin, xmax, n)
        return cls(x, density(x))

    @classmethod
    def from_bounds(cls, xmin, xmax, values):
        values = np.asarray(values, dtype=float)
        return cls(np.linspace(xmin, xmax, values.size), values)

    def __repr__(self):
        return f"GridDensity(xmin={self.x[0]}, xmax={self.x[-1]}, n={self.x.size})"

    def G(self, z):
        z = _as_complex(z)
        flat = z.reshape(-1)
        out = np.empty(flat.shape, dtype=complex)
        step = max(1, 2_000_000 // self.x.size)
        for i in range(0, flat.size, step):
            chunk = flat[i:i + step]
            out[i:i + step] = (self._c / (chunk[:, None] - self.x)).sum(axis=1)
        return _out(out.reshape(z.shape), z)

    def support_hint(self):
        return float(self.x[0]), float(self.x[-1])


class Semicircle(Measure):
    """Semicircle law of mean ``mean`` and variance ``variance``."""

    def __init__(self, mean=0.0, variance=1.0):
        if not variance > 0:
            raise DomainError("semicircle variance must be positive")
        self.mean = mean
        self.variance = variance
        self.positive = float(mean) - 2.0 * math.sqrt(float(variance)) >= 0

    def __repr__(self):
        return f"Semicircle(mean={self.mean}, variance={self.variance})"

    def G(self, z):
        z = _as_complex(z)
        return _out(semicircle_branch(z - float(self.mean), float(self.variance)), z)

    def dF(self, z):
        z = _as_complex(z)
        w = z - float(self.mean)
        g = semicircle_branch(w, float(self.variance))
        return _out(-1.0 / (g * (2.0 * float(self.variance) * g - w)), z)

    def density(self, x):
        x = np.asarray(x, dtype=float) - float(self.mean)
        t = float(self.variance)
        return np.sqrt(np.clip(4 * t - x * x, 0, None)) / (2 * np.pi * t)

    def support_hint(self):
        r = 2.0 * math.sqrt(float(self.variance))
        return float(self.mean) - r, float(self.mean) + r


class CauchyStd(Measure):
    """Standard Cauchy law, density ``1/(pi (x**2 + 1))``; ``F(z) = z + i``."""

    def __repr__(self):
        return "CauchyStd()"

    def G(self, z):
        z = _as_complex(z)
        return _out(1.0 / (z + 1j), z)

    def F(self, z):
        z = _as_complex(z)
        return _out(z + 1j, z)

    def dF(self, z):
        z = _as_complex(z)
        return _out(np.ones_like(z), z)


class JacobiPeriodic(Measure):
    """Law with Jacobi parameters ``alpha = (0, b, b, ...)``, ``beta = (1, c+1, c+1, ...)``.

    These are the free Meixner laws ``mu_{b,c}`` (mean 0, variance 1).  The
    periodic tail of the continued fraction is itself a semicircle
    transform, so ``F(z) = z - G_{gamma_{b,c+1}}(z)``.
    """

    def __init__(self, b=0.0, c=0.0):
        if c < -1:
            raise DomainError("free Meixner parameter c must satisfy c >= -1")
        self.b = b
        self.c = c

    def __repr__(self):
        return f"JacobiPeriodic(b={self.b}, c={self.c})"

    def tail(self, z):
        """Continued-fraction tail ``T = 1/(z - b - (c+1) T)``."""
        z = _as_complex(z)
        s = float(self.c) + 1.0
        if s == 0.0:
            return 1.0 / (z - float(self.b))
        return semicircle_branch(z - float(self.b), s)

    def F(self, z):
        z = _as_complex(z)
        return _out(z - self.tail(z), z)

    def dF(self, z):
        z = _as_complex(z)
        w = z - float(self.b)
        s = float(self.c) + 1.0
        if s == 0.0:
            dk = -1.0 / w**2
        else:
            k = semicircle_branch(w, s)
            dk = k / (2.0 * s * k - w)
        return _out(1.0 - dk, z)

    def support_hint(self):
        s = float(self.c) + 1.0
        b = float(self.b)
        r = 2.0 * math.sqrt(max(s, 0.0))
        # atoms of the two-point law at c = -1 lie at (b +- sqrt(b^2+4))/2
        a = (abs(b) + math.sqrt(b * b + 4)) / 2
        return min(b - r, -a), max(b + r, a)


class ProceduralF(Measure):
    """Law known only through an evaluator ``z -> F(z)`` on the upper half-plane."""

    def __init__(self, F, dF=None, positive=False, label="procedural", support=None,
                 F_partial=None):
        self._F = F
        self._dF = dF
        self._F_partial = F_partial
        self.positive = positive
        self.label = label
        self._support = support

    def __repr__(self):
        return f"ProceduralF({self.label})"

    def F(self, z):
        z = _as_complex(z)
        return _out(_as_complex(self._F(z)), z)

    def dF(self, z):
        if self._dF is None:
            return Measure.dF(self, z)
        z = _as_complex(z)
        return _out(_as_complex(self._dF(z)), z)

    def F_partial(self, z):
        if self._F_partial is None:
            return Measure.F_partial(self, z)
        z = _as_complex(z)
        val, ok = self._F_partial(z)
        return _as_complex(val), np.asarray(ok, dtype=bool)

    def support_hint(self):
        return self._support


def bernoulli(a=-1, b=1, p=Fraction(1, 2)) -> Atomic:
    """Two-point law ``p delta_a + (1-p) delta_b``; default symmetric Bernoulli."""
    p = to_fraction(p)
    return Atomic([(a, p), (b, 1 - p)])


# ---------------------------------------------------------------------------
# transforms


def _G_ext(mu: Measure, z):
    """``G`` off the real axis via conjugate symmetry; real points only for atomic laws."""
    z = _as_complex(z)
    up = z.imag > 0
    down = z.imag < 0
    real = ~(up | down)
    if np.any(real) and not mu.real_evaluable(z.real[real]):
        raise DomainError("transform is not defined at real points for this measure")
    out = np.empty(z.shape, dtype=complex)
    if np.any(up):
        out[up] = _as_complex(mu.G(z[up]))
    if np.any(down):
        out[down] = np.conj(_as_complex(mu.G(np.conj(z[down]))))
    if np.any(real):
        out[real] = _as_complex(mu.G(z[real]))
    return out


def cauchy_G(mu: Measure, z):
    """Cauchy transform ``G_mu(z)`` for ``Im z > 0``."""
    z = _check_upper(z)
    return _out(_as_complex(mu.G(z)), z)


def reciprocal_F(mu: Measure, z):
    """Reciprocal Cauchy transform ``F_mu(z) = 1/G_mu(z)`` for ``Im z > 0``."""
    z = _check_upper(z)
    return _out(_as_complex(mu.F(z)), z)


def psi(mu: Measure, z):
    """Moment generating function ``psi(z) = (1/z) G(1/z) - 1``."""
    z = _as_complex(z)
    if np.any(z == 0):
        raise DomainError("psi requires z != 0")
    return _out(_G_ext(mu, 1.0 / z) / z - 1.0, z)


def eta(mu: Measure, z):
    """Boolean cumulant transform ``eta(z) = 1 - z F(1/z)``."""
    z = _as_complex(z)
    if np.any(z == 0):
        raise DomainError("eta requires z != 0")
    return _out(1.0 - z / _G_ext(mu, 1.0 / z), z)


def dilate(mu: Measure, r) -> Measure:
    """The law ``mu o D_r`` of ``X/r`` where ``X ~ mu``; ``G(z) -> r G(r z)``."""
    if not r > 0:
        raise DomainError("dilation factor must be positive")
    if isinstance(mu, Atomic):
        rr = to_fraction(r)
        return Atomic([(x / rr, w) for x, w in mu.exact_atoms])
    if isinstance(mu, GridDensity):
        return GridDensity(mu.x / float(r), mu.values * float(r))
    if isinstance(mu, Semicircle):
        return Semicircle(mu.mean / r, mu.variance / (r * r))
    rf = float(r)
    hint = mu.support_hint()
    support = None if hint is None else tuple(sorted((hint[0] / rf, hint[1] / rf)))
    return ProceduralF(
        lambda z: _as_complex(mu.F(rf * z)) / rf,
        lambda z: _as_complex(mu.dF(rf * z)),
        positive=mu.positive,
        label=f"{mu!r} o D_{r}",
        support=support,
    )


def uplus_power(mu: Measure, t) -> Measure:
    """Boolean convolution power: ``F(z) = t F_mu(z) + (1 - t) z``."""
    if not t > 0:
        raise DomainError("Boolean power requires t > 0")
    t = float(t)
    if t == 1.0:
        return mu
    return ProceduralF(
        lambda z: t * _as_complex(mu.F(z)) + (1.0 - t) * z,
        lambda z: t * _as_complex(mu.dF(z)) + (1.0 - t),
        positive=mu.positive,
        label=f"{mu!r}^uplus {t}",
    )


def boolean_convolve(mu: Measure, nu: Measure) -> Measure:
    """Boolean convolution: ``F(z) = F_mu(z) + F_nu(z) - z``."""
    return ProceduralF(
        lambda z: _as_complex(mu.F(z)) + _as_complex(nu.F(z)) - z,
        lambda z: _as_complex(mu.dF(z)) + _as_complex(nu.dF(z)) - 1.0,
        positive=mu.positive and nu.positive,
        label=f"{mu!r} uplus {nu!r}",
    )


def measure_from_spec(spec: dict) -> Measure:
    """Build a measure from its JSON description."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise DomainError("measure spec must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "atomic":
            return Atomic([(x, w) for x, w in spec["atoms"]])
        if kind == "grid":
            return GridDensity.from_bounds(spec["xmin"], spec["xmax"], spec["values"])
        if kind == "semicircle":
            return Semicircle(spec.get("mean", 0), spec.get("variance", 1))
        if kind == "cauchy":
            return CauchyStd()
        if kind == "meixner":
            return JacobiPeriodic(spec.get("b", 0), spec.get("c", 0))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed {kind!r} measure spec: {exc}") from exc
    raise DomainError(f"unknown measure type {kind!r}")
