"""Densities by Stieltjes inversion, atom detection for ``B_t(mu)``, support scans.

The density of a law is ``f(x) = -lim_{eps -> 0} Im G(x + i eps) / pi``.
Values at three heights are combined by two levels of Richardson
extrapolation, which removes the ``O(eps)`` and ``O(eps**2)`` terms of
the smoothed density.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, ConvergenceError, DomainError
from .measures import Measure, _as_complex
from .semigroup import bt_measure

EPS_SCHEDULE = (1e-3, 5e-4, 2.5e-4)
CLIP_TOL = 1e-8
NEAR_ATOM = 0.01
MAX_MISSING = 0.05
ATOM_HEIGHTS = tuple(10.0**-k for k in range(2, 9))
ATOM_TOL = 1e-6
MASS_FLOOR = 1e-8
# support scans need sharp edges; singular edges leak mass at the profile heights
SCAN_EPS = (1e-5, 5e-6, 2.5e-6)

__all__ = [
    "DensityProfile",
    "AtomReport",
    "SupportScan",
    "stieltjes_density",
    "atom_scan",
    "atom_bound",
    "support_infimum",
    "in_positive_half",
    "density_convergence",
    "write_density_csv",
]


@dataclass(frozen=True)
class DensityProfile:
    x: np.ndarray
    density: np.ndarray
    epsilon_used: float
    atoms: tuple = ()
    total_mass_estimate: float = float("nan")
    missing: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @property
    def continuous_mass(self) -> float:
        ok = ~self.missing
        return float(np.trapezoid(self.density[ok], self.x[ok]))


@dataclass(frozen=True)
class AtomReport:
    x: float
    F_limit: complex
    F_prime_limit: complex
    mass: float
    passed: bool


@dataclass(frozen=True)
class SupportScan:
    infimum: float
    mass_below: float
    threshold: float


def _G_points(mu, z):
    """``G`` on an array plus a mask of points where the solver failed."""
    try:
        F, ok = mu.F_partial(z)
    except ConvergenceError:
        # a nested solver raised; fall back to one point at a time
        F = np.full(z.shape, np.nan + 0j)
        ok = np.zeros(z.shape, dtype=bool)
        for i, zi in enumerate(z):
            try:
                F[i] = complex(mu.F(zi))
                ok[i] = True
            except ConvergenceError:
                pass
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.where(ok, 1.0 / F, np.nan + 0j)
    return G, ~ok


def stieltjes_density(mu: Measure, grid, eps_schedule=EPS_SCHEDULE, atoms=()) -> DensityProfile:
    """Recover the absolutely continuous density of ``mu`` on ``grid``.

    Parameters
    ----------
    mu : Measure
    grid : array_like
        Strictly increasing evaluation points.
    eps_schedule : sequence of float
        Heights ``eps, eps/2, eps/4`` above the axis.
    atoms : sequence of (location, mass)
        Known atoms; their Poisson kernels are removed before
        extrapolation and their masses enter the total.

    Notes
    -----
    Where ``eps |G| > 0.01`` after removing known atoms the point sits
    next to an unresolved atom and the smallest-height value is used raw.
    A negative extrapolant falls back to one level of extrapolation, then
    to the raw value.  Raw values below ``-1e-8`` are an error.
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
        raise DomainError("grid must be strictly increasing with at least 2 points")
    eps = [float(e) for e in eps_schedule]
    if len(eps) != 3 or not (eps[0] > eps[1] > eps[2] > 0):
        raise DomainError("eps schedule must hold three decreasing positive heights")
    vals, near = [], np.zeros(x.size, dtype=bool)
    missing = np.zeros(x.size, dtype=bool)
    for e in eps:
        g, miss = _G_points(mu, x + 1j * e)
        missing |= miss
        for a, m in atoms:
            g = g - m / (x + 1j * e - a)
        near |= e * np.abs(np.nan_to_num(g)) > NEAR_ATOM
        vals.append(-g.imag / math.pi)
    if missing.mean() > MAX_MISSING:
        raise ConvergenceError(f"{missing.sum()} of {x.size} grid points failed to converge")
    f1, f2, f3 = vals
    r1a, r1b = 2 * f2 - f1, 2 * f3 - f2
    r2 = (4 * r1b - r1a) / 3
    f = np.where(r2 >= 0, r2, np.where(r1b >= 0, r1b, f3))
    f = np.where(near, f3, f)
    f = np.where(missing, 0.0, f)
    if np.any(f < -CLIP_TOL):
        bad = int(np.flatnonzero(f < -CLIP_TOL)[0])
        raise ConvergenceError(f"negative density {f[bad]:.3g} at x={x[bad]:.17g}")
    f = np.clip(f, 0.0, None)
    ok = ~missing
    mass = float(np.trapezoid(f[ok], x[ok])) + float(sum(m for _, m in atoms))
    return DensityProfile(x, f, eps[-1], tuple((float(a), float(m)) for a, m in atoms), mass,
                          missing)


# ---------------------------------------------------------------------------
# atoms of B_t(mu)


def atom_bound(t) -> int:
    """Maximal atom count of ``B_t(mu)``: ``floor(1/t)`` for ``t <= 1``, else 1."""
    if not t > 0:
        raise DomainError("atom bound needs t > 0")
    return int(math.floor(1.0 / t + 1e-12)) if t <= 1 else 1


def _g(mu, t, x, y):
    u = (1.0 - t) * np.asarray(x, dtype=float) + 1j * y
    return _as_complex(mu.F(u)) + t * np.asarray(x, dtype=float)


def _refine(mu, t, x, y=1e-10, steps=40):
    for _ in range(steps):
        u = (1.0 - t) * x + 1j * y
        g = complex(mu.F(u)) + t * x
        dg = (1.0 - t) * complex(mu.dF(u)) + t
        if dg == 0 or not np.isfinite(dg):
            break
        step = -(np.conj(dg) * g).real / abs(dg) ** 2
        x += step
        if abs(step) <= 1e-15 * (1.0 + abs(x)):
            break
    return x


def _default_range(mu, t):
    hint = mu.support_hint()
    if hint is None:
        return (-10.0, 10.0)
    R = max(abs(hint[0]), abs(hint[1])) + 1e-6
    if t < 1:
        return (hint[0] / (1.0 - t) - 1e-3, hint[1] / (1.0 - t) + 1e-3)
    return (-R, R)


def _candidates(mu, t, scan_range, n=4001, y=1e-6):
    lo, hi = scan_range
    xs = np.linspace(lo, hi, n)
    a = np.abs(_g(mu, t, xs, y))
    idx = [i for i in range(1, n - 1) if a[i] <= a[i - 1] and a[i] <= a[i + 1]]
    if a[0] < a[1]:
        idx.insert(0, 0)
    if a[-1] < a[-2]:
        idx.append(n - 1)
    found = []
    for i in idx:
        # too far from a root for the refinement to matter
        if a[i] > 0.5 * (1.0 + abs(xs[i])):
            continue
        xr = _refine(mu, t, float(xs[i]))
        if np.isfinite(xr) and all(abs(xr - f) > 1e-6 for f in found):
            found.append(xr)
    return sorted(found)


def _limit(values, heights):
    # linear in y near the axis: extrapolate from the two lowest heights
    y1, y0 = heights[-1], heights[-2]
    v1, v0 = values[-1], values[-2]
    return (y0 * v1 - y1 * v0) / (y0 - y1)


def atom_scan(mu: Measure, t, candidates=None, heights=ATOM_HEIGHTS, tol=ATOM_TOL,
              scan_range=None):
    """Detect atoms of ``B_t(mu)`` through the boundary behaviour of ``F_mu``.

    A point ``x`` is an atom when ``F_mu((1-t)x + iy) -> -t x`` and
    ``F_mu'`` has a finite limit ``d``; the mass then is
    ``(1 + t - d t) / (d (1 - t) + t)``.  Reports with mass below ``1e-8``
    are kept but not marked ``passed``.

    Parameters
    ----------
    candidates : sequence of float, optional
        Points to test.  By default they come from the local minima of
        ``|F_mu((1-t)x + 1e-6 i) + t x|`` over ``scan_range``, refined by
        Gauss-Newton.

    Raises
    ------
    ConsistencyError
        If more atoms pass than ``atom_bound(t)`` allows.
    """
    if not t > 0:
        raise DomainError("atom scan needs t > 0")
    t = float(t)
    if candidates is None:
        candidates = _candidates(mu, t, scan_range or _default_range(mu, t))
    heights = tuple(sorted(heights, reverse=True))
    reports = []
    for x in candidates:
        x = float(x)
        u = (1.0 - t) * x + 1j * np.asarray(heights)
        Fv = _as_complex(mu.F(u))
        dFv = _as_complex(mu.dF(u))
        F_lim, d_lim = _limit(Fv, heights), _limit(dFv, heights)
        finite = np.isfinite(d_lim) and abs(d_lim) < 1e8 and abs(dFv[-1] - dFv[-2]) < 1e-3 * (1 + abs(d_lim))
        match = abs(F_lim + t * x) <= tol
        mass = float("nan")
        if finite:
            mass = ((1.0 + t - d_lim * t) / (d_lim * (1.0 - t) + t)).real
        passed = bool(match and finite and MASS_FLOOR < mass <= 1.0 + 1e-9)
        reports.append(AtomReport(x, complex(F_lim), complex(d_lim), mass, passed))
    n_atoms = sum(r.passed for r in reports)
    if n_atoms > atom_bound(t):
        raise ConsistencyError(f"{n_atoms} atoms found, bound is {atom_bound(t)} at t={t}")
    return reports


# ---------------------------------------------------------------------------
# support scans


def _scan_grid(mu, n):
    hint = mu.support_hint()
    if hint is None:
        raise DomainError("no support hint available; pass an explicit grid")
    lo, hi = hint
    pad = 0.05 * (hi - lo) + 1e-3
    return np.linspace(lo - pad, hi + pad, n)


def support_infimum(mu: Measure, threshold=-1e-3, grid=None, n=2001, floor=1e-6,
                    atoms=(), eps_schedule=SCAN_EPS) -> SupportScan:
    """Left end of the support and the mass lying below ``threshold``.

    The infimum is the first grid point where the recovered density
    exceeds ``floor`` (or the leftmost known atom, if lower).  The
    heights in ``eps_schedule`` are lower than for profiles so that a
    singular edge does not smear density past the threshold.
    """
    x = _scan_grid(mu, n) if grid is None else np.asarray(grid, dtype=float)
    prof = stieltjes_density(mu, x, eps_schedule, atoms=atoms)
    above = np.flatnonzero(prof.density > floor)
    inf = float(x[above[0]]) if above.size else math.inf
    if atoms:
        inf = min(inf, min(a for a, _ in atoms))
    sel = x < threshold
    below = float(np.trapezoid(prof.density[sel], x[sel])) if sel.sum() > 1 else 0.0
    if sel.any() and not sel.all():
        # trapezoid piece between the last grid point below and the threshold
        k = int(np.flatnonzero(sel)[-1])
        below += prof.density[k] * (threshold - x[k])
    below += sum(m for a, m in atoms if a < threshold)
    return SupportScan(inf, below, float(threshold))


def in_positive_half(mu: Measure, grid=None, n=2001) -> bool:
    """Membership in laws on ``[0, inf)``: at most ``1e-6`` of mass below ``-1e-3``."""
    return support_infimum(mu, -1e-3, grid, n).mass_below <= 1e-6


def density_convergence(mu: Measure, ts, grid, f0) -> list:
    """``sup_grid |f_t - f_0|`` for the density ``f_t`` of ``B_t(mu)``, per ``t``."""
    grid = np.asarray(grid, dtype=float)
    ref = np.asarray(f0(grid) if callable(f0) else f0, dtype=float)
    out = []
    for t in ts:
        prof = stieltjes_density(bt_measure(mu, t), grid)
        out.append(float(np.max(np.abs(prof.density - ref))))
    return out


def write_density_csv(profile: DensityProfile, stream):
    """``x,density`` rows with 17 significant digits, atoms as ``# atom,x,mass`` comments."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["x", "density"])
    for xi, fi, miss in zip(profile.x, profile.density, profile.missing):
        w.writerow([format(float(xi), ".17g"), "nan" if miss else format(float(fi), ".17g")])
    for a, m in profile.atoms:
        stream.write(f"# atom,{a:.17g},{m:.17g}\n")
