"""Subordination fixed points for free convolution powers and free Brownian motion.

For ``T > 1`` the law ``mu^{boxplus T}`` satisfies ``F_{mu^T} = F_mu o omega``
where ``omega`` is the unique self-map of the upper half-plane solving::

    omega(z) = z/T + (1 - 1/T) F_mu(omega(z))

Equivalently ``H(omega(z)) = z`` with ``H(w) = T w + (1 - T) F_mu(w)``.
For the free Brownian motion ``nu boxplus gamma_t`` the analogous map is
``theta(z) = z - t G_nu(theta(z))``.

Both are solved by plain Picard iteration from ``w0 = z``.  The solvers
are vectorized: converged entries are frozen while the rest keep iterating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .measures import Measure, ProceduralF, _as_complex, _check_upper, _out

TOL = 1e-13
MAX_ITER = 100_000
MAX_ITER_NEAR_AXIS = 1_000_000
NEAR_AXIS = 1e-3
PROGRESS_EVERY = 1_000

__all__ = [
    "SubordinationResult",
    "picard",
    "omega_boxplus",
    "omega_boxplus_array",
    "left_inverse_H",
    "F_boxplus_power",
    "boxplus_power",
    "omega_brownian",
    "omega_brownian_array",
]


@dataclass(frozen=True)
class SubordinationResult:
    omega: complex
    iterations: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class _ArrayResult:
    omega: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    converged: np.ndarray


def picard(step, z, tol=TOL, max_iter=None, damping=None):
    """Iterate ``w <- step(w, z)`` from ``w = z`` elementwise.

    Entries stop once ``|w_{k+1} - w_k| <= tol (1 + |z|)``.  The cap is
    ``MAX_ITER``, raised to ``MAX_ITER_NEAR_AXIS`` for entries with
    ``Im z < NEAR_AXIS``.  Every ``PROGRESS_EVERY`` steps entries whose
    smallest step norm has not improved on the previous window are
    dropped as stalled.  ``damping`` in
    ``(0, 1]`` averages each step with the current iterate.
    """
    z = _as_complex(z).ravel()
    n = z.size
    w = z.copy()
    iters = np.zeros(n, dtype=np.int64)
    res = np.full(n, np.inf)
    done = np.zeros(n, dtype=bool)
    if max_iter is None:
        cap = np.where(z.imag < NEAR_AXIS, MAX_ITER_NEAR_AXIS, MAX_ITER)
    else:
        cap = np.full(n, int(max_iter))
    thresh = tol * (1.0 + np.abs(z))
    prev_min = np.full(n, np.inf)
    win_min = np.full(n, np.inf)
    active = np.arange(n)
    k = 0
    while active.size:
        wa, za = w[active], z[active]
        new = _as_complex(step(wa, za))
        if damping is not None:
            new = (1.0 - damping) * wa + damping * new
        r = np.abs(new - wa)
        bad = ~np.isfinite(new) | ~(new.imag > 0)
        w[active] = np.where(bad, wa, new)
        res[active] = r
        k += 1
        iters[active] = k
        fin = (r <= thresh[active]) & ~bad
        done[active[fin]] = True
        stop = bad | (k >= cap[active])
        win_min[active] = np.minimum(win_min[active], r)
        if k % PROGRESS_EVERY == 0:
            # step norms may oscillate; compare the best step of each window
            stop |= win_min[active] >= prev_min[active]
            prev_min[active] = win_min[active]
            win_min[active] = np.inf
        active = active[~(fin | stop)]
    return _ArrayResult(w, iters, res, done)


def _scalar(result: _ArrayResult, what):
    r = SubordinationResult(complex(result.omega.ravel()[0]), int(result.iterations.ravel()[0]),
                            float(result.residual.ravel()[0]), bool(result.converged.ravel()[0]))
    if not r.converged:
        raise ConvergenceError(f"{what} did not converge", last_iterate=r.omega,
                               residual=r.residual, iterations=r.iterations)
    return r


def _check_T(T):
    if not T > 1:
        raise DomainError("free power exponent must satisfy T > 1")


def omega_boxplus_array(mu: Measure, T, z, tol=TOL, max_iter=None) -> _ArrayResult:
    """Vectorized :func:`omega_boxplus`; returns arrays without raising."""
    _check_T(T)
    z = _check_upper(z)
    a, b = 1.0 / T, 1.0 - 1.0 / T
    res = picard(lambda w, zz: a * zz + b * _as_complex(mu.F(w)), z, tol, max_iter)
    shape = z.shape
    return _ArrayResult(res.omega.reshape(shape), res.iterations.reshape(shape),
                        res.residual.reshape(shape), res.converged.reshape(shape))


def omega_boxplus(mu: Measure, T, z, tol=TOL, max_iter=None) -> SubordinationResult:
    """Subordination function of ``mu^{boxplus T}`` with respect to ``mu`` at one point.

    Raises
    ------
    ConvergenceError
        If the Picard iteration stalls or hits its cap; the exception
        carries the last iterate.
    """
    if np.ndim(z) != 0:
        raise DomainError("omega_boxplus takes a single point; use omega_boxplus_array")
    return _scalar(omega_boxplus_array(mu, T, complex(z), tol, max_iter), "omega_boxplus")


def left_inverse_H(mu: Measure, T, w):
    """``H(w) = T w + (1 - T) F_mu(w)``, the left inverse of ``omega``."""
    w = _as_complex(w)
    return _out(T * w + (1.0 - T) * _as_complex(mu.F(w)), w)


def _omega_or_raise(mu, T, z, tol=TOL):
    res = omega_boxplus_array(mu, T, z, tol)
    if not np.all(res.converged):
        bad = np.flatnonzero(~res.converged.ravel())[0]
        raise ConvergenceError("omega_boxplus did not converge",
                               last_iterate=complex(res.omega.ravel()[bad]),
                               residual=float(res.residual.ravel()[bad]),
                               iterations=int(res.iterations.ravel()[bad]))
    return res.omega


def F_boxplus_power(mu: Measure, T, z, tol=TOL):
    """``F`` of ``mu^{boxplus T}``: ``(T omega(z) - z) / (T - 1)``; ``T = 1`` returns ``F_mu``."""
    z = _check_upper(z)
    if T == 1:
        return _out(_as_complex(mu.F(z)), z)
    w = _omega_or_raise(mu, T, z, tol)
    return _out((T * w - z) / (T - 1.0), z)


def boxplus_power(mu: Measure, T) -> Measure:
    """``mu^{boxplus T}`` for ``T >= 1`` as a procedural law.

    The derivative comes from implicit differentiation of ``H(omega) = z``.
    """
    if T == 1:
        return mu
    _check_T(T)

    def F(z):
        return F_boxplus_power(mu, T, z)

    def dF(z):
        w = _omega_or_raise(mu, T, _as_complex(z))
        dw = 1.0 / (T + (1.0 - T) * _as_complex(mu.dF(w)))
        return (T * dw - 1.0) / (T - 1.0)

    def F_partial(z):
        z = _check_upper(z)
        res = omega_boxplus_array(mu, T, z)
        return (T * res.omega - z) / (T - 1.0), res.converged

    hint = mu.support_hint()
    if hint is not None:
        # free powers of a law on [a, b] with mean m stay within m*T +- T*(b-a)
        a, b = hint
        mid = 0.5 * (a + b)
        hint = (T * mid - T * (b - a), T * mid + T * (b - a))
    return ProceduralF(F, dF, positive=mu.positive, label=f"{mu!r}^boxplus {T}", support=hint,
                       F_partial=F_partial)


def omega_brownian_array(nu: Measure, t, z, tol=TOL, max_iter=None) -> _ArrayResult:
    """Vectorized :func:`omega_brownian`.

    Entries that fail under plain iteration are retried with half-step
    damping; entries that still fail are reported unconverged.
    """
    if not t > 0:
        raise DomainError("Brownian time must satisfy t > 0")
    z = _check_upper(z)
    shape = z.shape

    def step(w, zz):
        return zz - t * _as_complex(nu.G(w))

    res = picard(step, z, tol, max_iter)
    if not np.all(res.converged):
        idx = np.flatnonzero(~res.converged)
        retry = picard(step, z.ravel()[idx], tol, max_iter, damping=0.5)
        res.omega[idx] = retry.omega
        res.iterations[idx] += retry.iterations
        res.residual[idx] = retry.residual
        res.converged[idx] = retry.converged
    return _ArrayResult(res.omega.reshape(shape), res.iterations.reshape(shape),
                        res.residual.reshape(shape), res.converged.reshape(shape))


def omega_brownian(nu: Measure, t, z, tol=TOL, max_iter=None) -> SubordinationResult:
    """Fixed point of ``w -> z - t G_nu(w)``; then ``G_{nu boxplus gamma_t}(z) = G_nu(omega)``."""
    if np.ndim(z) != 0:
        raise DomainError("omega_brownian takes a single point; use omega_brownian_array")
    return _scalar(omega_brownian_array(nu, t, complex(z), tol, max_iter), "omega_brownian")
