"""Command-line interface.

Exit codes: 0 success, 1 domain error or malformed input, 2 solver
non-convergence, 3 verification failure.  Data files use 17 significant
digits and ``\\n`` line endings so identical runs give identical bytes.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import series as S
from .brownian import burgers_grid, write_flow_csv
from .density import EPS_SCHEDULE, atom_scan, stieltjes_density, write_density_csv
from .divisibility import T_MAX, cauchy_phi, phi_estimate
from .errors import ConsistencyError, ConvergenceError, DomainError
from .measures import CauchyStd, Measure, measure_from_spec, to_fraction, uplus_power
from .semigroup import bt_measure
from .subordination import boxplus_power
from .verify import SUITES, format_table, run_suite

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 1, 2, 3
GRID_MIN, GRID_MAX = 3, 10**6
DEFAULT_BURGERS_TS = (0.25, 0.5, 1.0, 2.0)

COMMANDS = ("density", "bt", "moments", "phi", "convolve", "burgers", "verify")

__all__ = ["RunConfig", "build_parser", "config_from_args", "load_measure_spec", "run", "main"]


@dataclass
class RunConfig:
    """Validated command configuration."""

    command: str
    measure: str | None = None
    other: str | None = None
    t: float | None = None
    density: bool = False
    xmin: float | None = None
    xmax: float | None = None
    n: int = 401
    eps: tuple = EPS_SCHEDULE
    order: int = 8
    kind: str = "moments"
    op: str = "boxplus"
    t_max: Fraction = T_MAX
    ts: tuple = DEFAULT_BURGERS_TS
    nz: int = 20
    delta: float = 1e-3
    suite: str = "all"
    output: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if not GRID_MIN <= self.n <= GRID_MAX:
            raise DomainError(f"grid size must lie in [{GRID_MIN}, {GRID_MAX}]")
        if self.t is not None and not self.t >= 0:
            raise DomainError("t must be >= 0")
        if self.fmt not in ("csv", "json"):
            raise DomainError("format must be csv or json")
        if self.xmin is not None and self.xmax is not None and not self.xmin < self.xmax:
            raise DomainError("xmin must be below xmax")


def load_measure_spec(text: str) -> dict:
    """Parse inline JSON, or read it from a file when ``text`` is not an object literal.

    Raises
    ------
    DomainError
        On unreadable files or malformed JSON; the message carries line and column.
    """
    source = "inline spec"
    if not text.lstrip().startswith("{"):
        path = Path(text)
        try:
            text = path.read_text()
        except OSError as exc:
            raise DomainError(f"cannot read measure spec {path}: {exc.strerror}") from exc
        source = str(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON in {source}: {exc.msg} at line {exc.lineno} "
                          f"column {exc.colno}") from exc


def _measure(text: str | None) -> Measure:
    if text is None:
        raise DomainError("--measure is required")
    return measure_from_spec(load_measure_spec(text))


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise DomainError(f"expected comma-separated numbers, got {text!r}") from exc


def _fraction(value) -> Fraction:
    try:
        return to_fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"expected a rational number, got {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freesemigroup",
                                description="Free and Boolean convolution semigroup toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=True):
        sp.add_argument("--measure", help="measure spec: inline JSON or path to a JSON file")
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        if grid:
            sp.add_argument("--xmin", type=float)
            sp.add_argument("--xmax", type=float)
            sp.add_argument("--n", type=int, default=401, help="grid size")
            sp.add_argument("--eps", help="comma-separated epsilon schedule")

    sp = sub.add_parser("density", help="density of a measure on a grid (CSV)")
    common(sp)

    sp = sub.add_parser("bt", help="apply B_t: density (CSV) or exact moments (JSON)")
    common(sp)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--density", action="store_true", help="emit the density instead of moments")
    sp.add_argument("--order", type=int, default=8)

    sp = sub.add_parser("moments", help="exact moments or cumulants (JSON)")
    common(sp, grid=False)
    sp.add_argument("--order", type=int, default=8)
    sp.add_argument("--kind", choices=("moments", "free", "boolean"), default="moments")

    sp = sub.add_parser("phi", help="divisibility indicator estimate (JSON)")
    common(sp, grid=False)
    sp.add_argument("--order", type=int, default=4)
    sp.add_argument("--t-max", default=str(T_MAX))

    sp = sub.add_parser("convolve", help="free/Boolean powers or free multiplicative convolution")
    common(sp)
    sp.add_argument("--op", choices=("boxplus", "uplus", "boxtimes"), default="boxplus")
    sp.add_argument("--power", type=float, dest="t", help="exponent for boxplus/uplus powers")
    sp.add_argument("--with", dest="other", help="second measure spec for boxtimes")
    sp.add_argument("--density", action="store_true", help="emit the density of the power")
    sp.add_argument("--order", type=int, default=8)

    sp = sub.add_parser("burgers", help="flow field h = F_{B_t} - z with Burgers residuals (CSV)")
    common(sp, grid=False)
    sp.add_argument("--ts", default=",".join(str(t) for t in DEFAULT_BURGERS_TS))
    sp.add_argument("--nz", type=int, default=20, help="number of z sample points")
    sp.add_argument("--delta", type=float, default=1e-3, help="finite-difference step")

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("suite", nargs="?", default="all", choices=("all",) + tuple(SUITES))
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    opts = vars(args)
    command = opts["command"]
    fmt = opts.get("fmt")
    if fmt is None:
        fmt = "csv" if command in ("density", "burgers") or opts.get("density") else "json"
    return RunConfig(
        command=command,
        measure=opts.get("measure"),
        other=opts.get("other"),
        t=opts.get("t"),
        density=bool(opts.get("density")),
        xmin=opts.get("xmin"),
        xmax=opts.get("xmax"),
        n=opts.get("n", 401),
        eps=_floats(opts["eps"]) if opts.get("eps") else EPS_SCHEDULE,
        order=opts.get("order", 8),
        kind=opts.get("kind", "moments"),
        op=opts.get("op", "boxplus"),
        t_max=_fraction(opts.get("t_max", T_MAX)),
        ts=_floats(opts["ts"]) if opts.get("ts") else DEFAULT_BURGERS_TS,
        nz=opts.get("nz", 20),
        delta=opts.get("delta", 1e-3),
        suite=opts.get("suite", "all"),
        output=opts.get("output"),
        fmt=fmt,
    )


# ---------------------------------------------------------------------------
# commands


def _grid(cfg: RunConfig, mu: Measure) -> np.ndarray:
    lo, hi = cfg.xmin, cfg.xmax
    if lo is None or hi is None:
        hint = mu.support_hint()
        if hint is None:
            hint = (-10.0, 10.0)
        pad = 0.05 * (hint[1] - hint[0]) + 1e-3
        lo = hint[0] - pad if lo is None else lo
        hi = hint[1] + pad if hi is None else hi
    return np.linspace(lo, hi, cfg.n)


def _emit_profile(cfg: RunConfig, profile) -> str:
    if cfg.fmt == "json":
        return json.dumps({
            "x": [float(v) for v in profile.x],
            "density": [None if m else float(f) for f, m in zip(profile.density, profile.missing)],
            "atoms": [[float(a), float(w)] for a, w in profile.atoms],
        }) + "\n"
    buf = io.StringIO()
    write_density_csv(profile, buf)
    return buf.getvalue()


def _atoms_of_bt(mu: Measure, t: float):
    if not 0 < t < 1:
        return ()
    return tuple((r.x, r.mass) for r in atom_scan(mu, t) if r.passed)


def _cmd_density(cfg: RunConfig) -> str:
    mu = _measure(cfg.measure)
    return _emit_profile(cfg, stieltjes_density(mu, _grid(cfg, mu), cfg.eps))


def _moments_payload(ms: S.MomentSeries) -> dict:
    """Moments ``m_1 .. m_N`` as ``"num/den"`` strings; floats mark approximate input."""
    return {"order": ms.order, "approximate": ms.approximate, "moments": ms.to_json()}


def _cmd_bt(cfg: RunConfig) -> str:
    spec = load_measure_spec(cfg.measure) if cfg.measure else None
    mu = _measure(cfg.measure)
    t = cfg.t
    if cfg.density:
        atoms = _atoms_of_bt(mu, t)
        law = bt_measure(mu, t)
        return _emit_profile(cfg, stieltjes_density(law, _grid(cfg, law), cfg.eps, atoms=atoms))
    ms = S.bt_series(S.moments_of(mu, cfg.order), to_fraction(t))
    return json.dumps({"measure": spec, "t": format(t, ".17g"), **_moments_payload(ms)}) + "\n"


def _cmd_moments(cfg: RunConfig) -> str:
    spec = load_measure_spec(cfg.measure) if cfg.measure else None
    mu = _measure(cfg.measure)
    ms = S.moments_of(mu, cfg.order)
    if cfg.kind == "moments":
        return json.dumps({"measure": spec, **_moments_payload(ms)}) + "\n"
    cs = S.free_cumulants(ms) if cfg.kind == "free" else S.boolean_cumulants(ms)
    return json.dumps({"measure": spec, "kind": cs.kind, "cumulants": cs.to_json()}) + "\n"


def _cmd_phi(cfg: RunConfig) -> str:
    spec = load_measure_spec(cfg.measure) if cfg.measure else None
    mu = _measure(cfg.measure)
    if isinstance(mu, CauchyStd):
        cert = cauchy_phi()
        if not cert.passed:
            raise ConvergenceError("Cauchy certificate residuals exceed tolerance")
        out = {"measure": spec, "N": None, "phi_hat": "inf", "exact": True, "trace": [],
               "residuals": {str(k): v for k, v in cert.residuals.items()}}
        return json.dumps(out) + "\n"
    est = phi_estimate(S.moments_of(mu, cfg.order), cfg.order, t_max=cfg.t_max)
    return json.dumps({"measure": spec, **est.to_json()}) + "\n"


def _cmd_convolve(cfg: RunConfig) -> str:
    mu = _measure(cfg.measure)
    if cfg.op == "boxtimes":
        if cfg.other is None:
            raise DomainError("boxtimes needs --with")
        if cfg.density:
            raise DomainError("--density is only available for boxplus/uplus powers")
        nu = _measure(cfg.other)
        if not (mu.positive and nu.positive):
            raise DomainError("free multiplicative convolution needs laws on [0, inf)")
        ms = S.boxtimes_series(S.moments_of(mu, cfg.order), S.moments_of(nu, cfg.order))
        return json.dumps({"op": "boxtimes", **_moments_payload(ms)}) + "\n"
    if cfg.t is None:
        raise DomainError(f"{cfg.op} needs --power")
    t = cfg.t
    if cfg.density:
        if cfg.op == "boxplus":
            if t < 1:
                raise DomainError("analytic free powers need exponent >= 1")
            law = boxplus_power(mu, t)
        else:
            law = uplus_power(mu, t)
        return _emit_profile(cfg, stieltjes_density(law, _grid(cfg, law), cfg.eps))
    m = S.moments_of(mu, cfg.order)
    power = S.boxplus_power_series if cfg.op == "boxplus" else S.uplus_power_series
    ms = power(m, to_fraction(t))
    return json.dumps({"op": cfg.op, "power": format(t, ".17g"), **_moments_payload(ms)}) + "\n"


def _burgers_points(n: int) -> np.ndarray:
    rng = np.random.default_rng(20)
    return rng.uniform(-3.0, 3.0, n) + 1j * rng.uniform(0.5, 3.0, n)


def _cmd_burgers(cfg: RunConfig) -> str:
    mu = _measure(cfg.measure)
    if any(t - cfg.delta <= 0 for t in cfg.ts):
        raise DomainError("every t must exceed the finite-difference step")
    samples = burgers_grid(mu, cfg.ts, _burgers_points(cfg.nz), dt=cfg.delta, dz=cfg.delta)
    if cfg.fmt == "json":
        rows = [[s.t, s.z.real, s.z.imag, s.h.real, s.h.imag, s.residual] for s in samples]
        return json.dumps({"columns": ["t", "Re(z)", "Im(z)", "Re(h)", "Im(h)", "residual"],
                           "rows": rows}) + "\n"
    buf = io.StringIO()
    write_flow_csv(samples, buf)
    return buf.getvalue()


def _cmd_verify(cfg: RunConfig):
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    results = [run_suite(n) for n in names]
    text = "\n".join(format_table(r) for r in results) + "\n"
    ok = all(r.passed for r in results)
    text += f"overall {'PASS' if ok else 'FAIL'}\n"
    return text, ok


_HANDLERS = {"density": _cmd_density, "bt": _cmd_bt, "moments": _cmd_moments, "phi": _cmd_phi,
             "convolve": _cmd_convolve, "burgers": _cmd_burgers}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    ok = True
    if cfg.command == "verify":
        text, ok = _cmd_verify(cfg)
    else:
        text = _HANDLERS[cfg.command](cfg)
    if cfg.output:
        with open(cfg.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


def main(argv=None, stdout=None, stderr=None) -> int:
    stderr = sys.stderr if stderr is None else stderr
    args = build_parser().parse_args(argv)
    try:
        return run(config_from_args(args), stdout)
    except DomainError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, ConsistencyError) as exc:
        print(f"solver error: {exc}", file=stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
