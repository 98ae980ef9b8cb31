"""The semigroup ``B_t(mu) = (mu^{boxplus (1+t)})^{uplus 1/(1+t)}`` on the analytic backend.

With ``omega`` the subordination function of ``mu^{boxplus (1+t)}``::

    F_{B_t(mu)}(z) = (1 - 1/t) z + omega(z) / t

and the field ``h(t, z) = F_{B_t(mu)}(z) - z`` equals ``F_mu(omega) - omega``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .measures import Measure, ProceduralF, _as_complex, _check_upper, _out, uplus_power
from .subordination import _omega_or_raise, boxplus_power, omega_boxplus_array

__all__ = [
    "F_bt",
    "F_bt_definitional",
    "bt_measure",
    "h_field",
    "ExponentPair",
    "commutation_exponents",
    "exponents_from_primed",
    "verify_commutation",
    "semigroup_residual",
]


def _check_t(t):
    if not t >= 0:
        raise DomainError("B_t requires t >= 0")


def F_bt(mu: Measure, t, z):
    """Reciprocal Cauchy transform of ``B_t(mu)``; ``t = 0`` returns ``F_mu``."""
    _check_t(t)
    z = _check_upper(z)
    if t == 0:
        return _out(_as_complex(mu.F(z)), z)
    t = float(t)
    w = _omega_or_raise(mu, 1.0 + t, z)
    return _out((1.0 - 1.0 / t) * z + w / t, z)


def F_bt_definitional(mu: Measure, t, z):
    """``F_{B_t(mu)}`` straight from the definition.

    Takes the Boolean power ``1/(1+t)`` of ``mu^{boxplus (1+t)}``, whose
    ``F`` is evaluated as ``F_mu(omega(z))``.
    """
    _check_t(t)
    z = _check_upper(z)
    if t == 0:
        return _out(_as_complex(mu.F(z)), z)
    T = 1.0 + float(t)
    w = _omega_or_raise(mu, T, z)
    F_power = _as_complex(mu.F(w))
    return _out((1.0 - 1.0 / T) * z + F_power / T, z)


def bt_measure(mu: Measure, t) -> Measure:
    """``B_t(mu)`` as a procedural law; positivity of support is carried over."""
    _check_t(t)
    if t == 0:
        return mu
    t = float(t)
    T = 1.0 + t

    def F(z):
        return F_bt(mu, t, z)

    def dF(z):
        w = _omega_or_raise(mu, T, _as_complex(z))
        dw = 1.0 / (T + (1.0 - T) * _as_complex(mu.dF(w)))
        return (1.0 - 1.0 / t) + dw / t

    def F_partial(z):
        z = _check_upper(z)
        res = omega_boxplus_array(mu, T, z)
        return (1.0 - 1.0 / t) * z + res.omega / t, res.converged

    hint = mu.support_hint()
    if hint is not None:
        # generous box: atoms x obey (1-t)x in the hull of supp(mu) when t < 1
        R = max(abs(hint[0]), abs(hint[1]))
        R = 2.0 * R * T + (R / (1.0 - t) if t < 1 else 0.0)
        hint = (-R, R)
    return ProceduralF(F, dF, positive=mu.positive, label=f"B_{t}({mu!r})", support=hint,
                       F_partial=F_partial)


def h_field(mu: Measure, t, z, route="omega"):
    """``h(t, z) = F_{B_t(mu)}(z) - z``.

    ``route='direct'`` subtracts ``z`` from :func:`F_bt`; ``route='omega'``
    evaluates ``F_mu(omega) - omega``.  The two agree up to solver noise.
    """
    if not t > 0:
        raise DomainError("h field requires t > 0")
    z = _check_upper(z)
    if route == "direct":
        return _out(_as_complex(F_bt(mu, t, z)) - z, z)
    if route == "omega":
        w = _omega_or_raise(mu, 1.0 + float(t), z)
        return _out(_as_complex(mu.F(w)) - w, z)
    raise DomainError(f"unknown h route {route!r}")


@dataclass(frozen=True)
class ExponentPair:
    """Exponents with ``(mu^{boxplus p})^{uplus q} = (mu^{uplus q'})^{boxplus p'}``."""

    p: object
    q: object
    p_prime: object
    q_prime: object


def commutation_exponents(p, q) -> ExponentPair:
    """Compute ``q' = 1 - p + p q`` and ``p' = p q / q'``.

    Rational inputs give exact results.
    """
    if isinstance(p, int):
        p = Fraction(p)
    if isinstance(q, int):
        q = Fraction(q)
    if not p >= 1:
        raise DomainError("commutation requires p >= 1")
    if not q > (p - 1) / p:
        raise DomainError("commutation requires q > (p - 1)/p")
    qp = 1 - p + p * q
    return ExponentPair(p, q, p * q / qp, qp)


def exponents_from_primed(p_prime, q_prime) -> ExponentPair:
    """Recover ``(p, q)`` from the Boolean-first exponents ``(p', q')``.

    Inverts :func:`commutation_exponents`: ``p = 1 - q' + p' q'`` and
    ``q = p' q' / p``.
    """
    if isinstance(p_prime, int):
        p_prime = Fraction(p_prime)
    if isinstance(q_prime, int):
        q_prime = Fraction(q_prime)
    if not (p_prime >= 1 and q_prime > 0):
        raise DomainError("Boolean-first exponents need p' >= 1 and q' > 0")
    p = 1 - q_prime + p_prime * q_prime
    return commutation_exponents(p, p_prime * q_prime / p)


def verify_commutation(mu: Measure, p, q, zs) -> float:
    """Max of ``|F_lhs - F_rhs|`` over ``zs`` for the two orders of the powers."""
    e = commutation_exponents(p, q)
    zs = _check_upper(np.asarray(zs, dtype=complex))
    lhs = uplus_power(boxplus_power(mu, float(e.p)), float(e.q))
    rhs = boxplus_power(uplus_power(mu, float(e.q_prime)), float(e.p_prime))
    return float(np.max(np.abs(_as_complex(lhs.F(zs)) - _as_complex(rhs.F(zs)))))


def semigroup_residual(mu: Measure, s, t, zs) -> float:
    """Max of ``|F_{B_s(B_t(mu))} - F_{B_{s+t}(mu)}|`` over ``zs``."""
    zs = _check_upper(np.asarray(zs, dtype=complex))
    nested = bt_measure(bt_measure(mu, t), s)
    direct = bt_measure(mu, float(s) + float(t))
    return float(np.max(np.abs(_as_complex(nested.F(zs)) - _as_complex(direct.F(zs)))))
