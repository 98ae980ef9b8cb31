"""Correspondence with free Brownian motion and the complex Burgers check.

A law ``mu`` with mean 0 and variance 1 determines a probability law
``nu`` through ``G_nu(z) = z - F_mu(z)``.  Then for every ``t > 0``::

    F_{B_t(mu)}(z) = z - G_{nu boxplus gamma_t}(z)

and ``h(t, z) = F_{B_t(mu)}(z) - z`` solves ``dh/dt = h dh/dz``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .measures import Measure, _as_complex, _check_upper, _out
from .semigroup import h_field
from .subordination import _omega_or_raise, omega_brownian_array

NORMALIZATION_Y = 1e6
NORMALIZATION_TOL = 1e-4

__all__ = [
    "BurgersSample",
    "nu_from_mu",
    "mu_from_nu",
    "brownian_F",
    "theta_omega_gap",
    "burgers_residual",
    "burgers_grid",
    "write_flow_csv",
]


class _ProceduralG(Measure):
    """Law given through ``G`` directly (avoids a double reciprocal)."""

    def __init__(self, G, dG, label):
        self._G = G
        self._dG = dG
        self.label = label

    def __repr__(self):
        return f"ProceduralG({self.label})"

    def G(self, z):
        z = _as_complex(z)
        return _out(_as_complex(self._G(z)), z)

    def dF(self, z):
        z = _as_complex(z)
        g = _as_complex(self._G(z))
        return _out(-_as_complex(self._dG(z)) / g**2, z)


class _MuFromNu(Measure):
    def __init__(self, nu):
        self.nu = nu

    def __repr__(self):
        return f"mu_from_nu({self.nu!r})"

    def F(self, z):
        z = _as_complex(z)
        return _out(z - _as_complex(self.nu.G(z)), z)

    def dF(self, z):
        z = _as_complex(z)
        g = _as_complex(self.nu.G(z))
        dg = -_as_complex(self.nu.dF(z)) * g**2
        return _out(1.0 - dg, z)


def nu_from_mu(mu: Measure, check=True) -> Measure:
    """The law ``nu`` with ``G_nu(z) = z - F_mu(z)``.

    Raises
    ------
    DomainError
        If ``z - F_mu(z)`` fails the Cauchy-transform normalization
        ``iy (iy - F_mu(iy)) -> 1``, tested at ``y = 1e6``.  This rejects
        every ``mu`` that is not centered with unit variance, such as a
        point mass.
    """
    if isinstance(mu, _MuFromNu):
        return mu.nu
    if check:
        iy = 1j * NORMALIZATION_Y
        val = iy * (iy - complex(mu.F(iy)))
        if not abs(val - 1.0) <= NORMALIZATION_TOL:
            raise DomainError("z - F_mu(z) is not the Cauchy transform of a probability law "
                              "(mu must be centered with variance 1)")
    return _ProceduralG(lambda z: z - _as_complex(mu.F(z)),
                        lambda z: 1.0 - _as_complex(mu.dF(z)),
                        label=f"nu_from_mu({mu!r})")


def mu_from_nu(nu: Measure) -> Measure:
    """Inverse of :func:`nu_from_mu`: ``F_mu(z) = z - G_nu(z)``."""
    return _MuFromNu(nu)


def _theta(nu, t, z):
    res = omega_brownian_array(nu, float(t), z)
    if not np.all(res.converged):
        raise ConvergenceError("omega_brownian did not converge")
    return res.omega


def brownian_F(mu: Measure, t, z):
    """``F_{B_t(mu)}`` computed through the free Brownian motion of ``nu``."""
    z = _check_upper(z)
    nu = nu_from_mu(mu)
    theta = _theta(nu, t, z)
    return _out(z - _as_complex(nu.G(theta)), z)


def theta_omega_gap(mu: Measure, t, z) -> float:
    """Max ``|omega_{1+t}(z) - theta_t(z)|``; both fixed points coincide."""
    z = _check_upper(np.asarray(z, dtype=complex))
    w = _omega_or_raise(mu, 1.0 + float(t), z)
    theta = _theta(nu_from_mu(mu), t, z)
    return float(np.max(np.abs(w - theta)))


@dataclass(frozen=True)
class BurgersSample:
    t: float
    z: complex
    h: complex
    dh_dt: complex
    dh_dz: complex
    residual: float


def _burgers_arrays(mu, t, z, dt, dz):
    t = float(t)
    if t - dt <= 0:
        raise DomainError("time step must satisfy t - dt > 0")
    h = _as_complex(h_field(mu, t, z))
    dh_dt = (_as_complex(h_field(mu, t + dt, z)) - _as_complex(h_field(mu, t - dt, z))) / (2 * dt)
    # analyticity lets the z-derivative be taken along the real direction
    dh_dz = (_as_complex(h_field(mu, t, z + dz)) - _as_complex(h_field(mu, t, z - dz))) / (2 * dz)
    return h, dh_dt, dh_dz, np.abs(dh_dt - h * dh_dz)


def burgers_residual(mu: Measure, t, z, dt=1e-3, dz=1e-3) -> BurgersSample:
    """Central-difference residual of ``dh/dt = h dh/dz`` at one point."""
    z = complex(z)
    h, a, b, r = _burgers_arrays(mu, t, np.asarray([z]), dt, dz)
    return BurgersSample(float(t), z, complex(h[0]), complex(a[0]), complex(b[0]), float(r[0]))


def burgers_grid(mu: Measure, ts, zs, dt=1e-3, dz=1e-3):
    """:class:`BurgersSample` for every ``(t, z)`` on the grid, ordered by t then z."""
    zs = _check_upper(np.asarray(zs, dtype=complex).ravel())
    out = []
    for t in ts:
        h, a, b, r = _burgers_arrays(mu, t, zs, dt, dz)
        out.extend(BurgersSample(float(t), complex(zz), complex(hh), complex(aa), complex(bb),
                                 float(rr)) for zz, hh, aa, bb, rr in zip(zs, h, a, b, r))
    return out


def write_flow_csv(samples, stream):
    """Dump samples as ``t,Re(z),Im(z),Re(h),Im(h),residual`` with 17 significant digits."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["t", "Re(z)", "Im(z)", "Re(h)", "Im(h)", "residual"])
    for s in samples:
        w.writerow([format(v, ".17g") for v in
                    (s.t, s.z.real, s.z.imag, s.h.real, s.h.imag, s.residual)])
