"""Command-line front end: file-based inputs and outputs, JSON reports."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DomainError, PoleError, PreconditionError, ResolutionError

CONFIG_ENV = "SL2HARMONIC_CONFIG"
FAST_SUITE = (1, 2, 3, 4, 12)


@dataclass
class RunConfig:
    m: int = 0
    alpha: float = 0.0
    r_max: float = 30.0
    panel: float = 0.5
    order: int = 16
    lambda_tol: float = 1e-15
    alpha_m: float | None = None
    seed: int = 7
    threads: int | None = None
    out: str | None = None
    plot_data: str | None = None

    def validate(self) -> "RunConfig":
        if self.r_max < 10:
            raise DomainError("r_max must be at least 10")
        if self.panel <= 0 or self.order < 2:
            raise DomainError("panel width must be positive and order at least 2")
        if self.alpha < 0:
            raise DomainError("alpha must be nonnegative")
        if not 0 < self.lambda_tol < 1:
            raise DomainError("lambda_tol must lie in (0, 1)")
        if self.threads is not None and self.threads < 1:
            raise DomainError("threads must be positive")
        return self

    def grid(self):
        from .transform import radial_grid
        return radial_grid(r_max=self.r_max, h=self.panel, order=self.order)

    def cutoffs(self, m: int | None = None):
        from .kernels import SpectralCutoffs
        return SpectralCutoffs(self.alpha, self.m if m is None else m, self.alpha_m)


def load_config(args) -> RunConfig:
    """Defaults, then the JSON file (``--config`` or the environment), then flags."""
    values = {}
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return RunConfig(**values).validate()


# --- parsing helpers ------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) != 2:
        raise DomainError(f"expected RE,IM but got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"expected a:b:n but got {text!r}")
    a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise DomainError("grid needs at least one point")
    return np.linspace(a, b, n)


def _fmt(x) -> str:
    return repr(float(x))


def _write_rows(path, header, rows) -> None:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    if path:
        Path(path).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _complex_rows(x, vals):
    return [[_fmt(a), _fmt(v.real), _fmt(v.imag)] for a, v in zip(x, np.atleast_1d(vals))]


def _plot_data(cfg: RunConfig, xname: str, x, vals) -> None:
    """Tidy CSV: one row per (series, x) pair."""
    if not cfg.plot_data:
        return
    vals = np.atleast_1d(vals)
    rows = []
    for name, part in (("re", vals.real), ("im", vals.imag), ("abs", np.abs(vals))):
        rows += [[name, _fmt(a), _fmt(b)] for a, b in zip(x, part)]
    _write_rows(cfg.plot_data, ["series", xname, "value"], rows)


def _emit_json(cfg: RunConfig, record: dict) -> None:
    text = json.dumps(record, indent=1, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


# --- subcommands ----------------------------------------------------------------------

def cmd_eval(args, cfg: RunConfig) -> int:
    from .special import c_function, c_inv_poles, residue_stated
    from .spherical import phi, phi_big

    m = cfg.m
    if args.kind in ("phi", "Phi"):
        if args.s is None or args.r_grid is None:
            raise DomainError("--s and --r-grid are required")
        s = parse_complex(args.s)
        r = parse_range(args.r_grid)
        vals = phi(m, s, r) if args.kind == "phi" else phi_big(m, s, r)
        _write_rows(cfg.out, ["r", "re", "im"], _complex_rows(r, vals))
        _plot_data(cfg, "r", r, vals)
    elif args.kind == "c":
        if args.s is None:
            raise DomainError("--s is required")
        s = parse_complex(args.s)
        c = complex(c_function(m, s))
        inv_sq = abs(c) ** -2 if c != 0 else float("inf")
        _write_rows(cfg.out, ["s_re", "s_im", "c_re", "c_im", "abs_c_inv_sq"],
                    [[_fmt(s.real), _fmt(s.imag), _fmt(c.real), _fmt(c.imag), _fmt(inv_sq)]])
    elif args.kind == "cinv-poles":
        rows = [[str(p.location), _fmt(p.location), str(p.residue), _fmt(p.residue),
                 str(residue_stated(m, p.j))] for p in c_inv_poles(m)]
        _write_rows(cfg.out, ["pole", "pole_float", "residue", "residue_float",
                              "residue_closed_form"], rows)
    else:
        raise DomainError(f"unknown kind {args.kind!r}")
    return 0


def cmd_transform(args, cfg: RunConfig) -> int:
    from .transform import forward_transform, load_profile

    f, _ = load_profile(args.inp)
    lam = parse_range(args.axis)
    vals = forward_transform(f, 1j * lam)
    _write_rows(cfg.out, ["lambda", "re", "im"], _complex_rows(lam, vals))
    _plot_data(cfg, "lambda", lam, vals)
    return 0


def _symbol_from_args(args, cfg: RunConfig):
    from .transform import heat_symbol, load_symbol, resolvent_symbol

    chosen = [x is not None for x in (args.symbol, args.heat, args.resolvent)]
    if sum(chosen) != 1:
        raise DomainError("give exactly one of --symbol, --heat, --resolvent")
    if args.symbol:
        return load_symbol(args.symbol)
    if args.heat is not None:
        return heat_symbol(cfg.m, args.heat)
    return resolvent_symbol(cfg.m, parse_complex(args.resolvent), cfg.cutoffs().beta_m)


def cmd_invert(args, cfg: RunConfig) -> int:
    from .transform import invert_axis, invert_contour

    psi = _symbol_from_args(args, cfg)
    r = parse_range(args.r_grid)
    if args.route == "axis":
        vals = invert_axis(psi, r, tol=cfg.lambda_tol)
    else:
        vals = invert_contour(psi, r, args.delta, alpha=cfg.alpha)
    _write_rows(cfg.out, ["r", "re", "im"], _complex_rows(r, vals))
    _plot_data(cfg, "r", r, vals)
    return 0


def _need_out(cfg: RunConfig) -> str:
    if not cfg.out:
        raise DomainError("--out is required for profile outputs")
    return cfg.out


def cmd_heat(args, cfg: RunConfig) -> int:
    from .kernels import heat_kernel
    from .transform import save_profile

    h = heat_kernel(cfg.m, args.t, cfg.cutoffs(), cfg.grid())
    save_profile(_need_out(cfg), h, {"kind": "heat", "t": args.t})
    _plot_data(cfg, "r", h.r, h.values)
    return 0


def cmd_resolvent(args, cfg: RunConfig) -> int:
    from .kernels import resolvent_kernel
    from .transform import radial_grid, save_profile

    z = parse_complex(args.z)
    grid = radial_grid(r_max=cfg.r_max, h=cfg.panel, order=cfg.order, freq=2 * abs(z.imag))
    prof = resolvent_kernel(cfg.m, z, cfg.cutoffs(), grid, method=args.method)
    save_profile(_need_out(cfg), prof, {"kind": "resolvent", "z": [z.real, z.imag]})
    _plot_data(cfg, "r", prof.r, prof.values)
    return 0


def cmd_plancherel(args, cfg: RunConfig) -> int:
    from .transform import load_profile, plancherel_check

    f, _ = load_profile(args.inp)
    lhs, rhs = plancherel_check(f)
    _emit_json(cfg, {"m": f.m, "spatial": lhs, "spectral": rhs, "ratio": lhs / rhs})
    return 0


def cmd_intertwine(args, cfg: RunConfig) -> int:
    from .acceptance import bump
    from .convolution import BiTypeProfile, intertwine, load_bitype
    from .transform import load_profile, profile_from_function, radial_grid, save_profile

    if args.demo:
        grid = radial_grid(r_max=10.0)
        f = profile_from_function(0, bump(1.0), grid=grid)
        g = BiTypeProfile(0, 2, grid[0], grid[1], np.sinh(grid[0]) * bump(1.2)(grid[0]))
    else:
        if not (args.inp and args.g):
            raise DomainError("give --in and --g, or --demo")
        f, _ = load_profile(args.inp)
        g = load_bitype(args.g)
    res = intertwine(f, g)
    record = {"n": g.n, "m": g.m, "residual": res.residual, "support_leak": res.support_leak}
    if args.f_prime:
        save_profile(args.f_prime, res.f_prime, {"kind": "intertwined"})
    _emit_json(cfg, record)
    return 0


def _suite(spec: str) -> list[int]:
    from .acceptance import N_CHECKS

    if spec == "all":
        return list(range(1, N_CHECKS + 1))
    if spec == "fast":
        return list(FAST_SUITE)
    try:
        ids = [int(x) for x in spec.split(",")]
    except ValueError:
        raise DomainError(f"unknown suite {spec!r}") from None
    if any(not 1 <= i <= N_CHECKS for i in ids):
        raise DomainError(f"criteria are numbered 1..{N_CHECKS}")
    return ids


def cmd_verify(args, cfg: RunConfig) -> int:
    from .acceptance import run_check

    card, failures = [], 0
    for idx in _suite(args.suite):
        try:
            res = run_check(idx, seed=cfg.seed)
            entry = res.scorecard()
            print(res.line(), file=sys.stderr)
        except Exception as exc:  # a crashing check is a failed check
            entry = {"check": str(idx), "target": "runs", "measured": None, "pass": False,
                     "error": f"{type(exc).__name__}: {exc}"}
            print(f"[FAIL] {idx}: {entry['error']}", file=sys.stderr)
        failures += not entry["pass"]
        card.append(entry)
    _emit_json(cfg, {"seed": cfg.seed, "suite": args.suite, "checks": card,
                     "failures": failures})
    return min(failures, 125)


# --- parser ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help=f"JSON run config (default: ${CONFIG_ENV})")
    p.add_argument("--m", type=int, help="K-type")
    p.add_argument("--alpha", type=float, help="weight exponent")
    p.add_argument("--alpha-m", dest="alpha_m", type=float, help="override of alpha_m")
    p.add_argument("--r-max", dest="r_max", type=float, help="radial grid extent")
    p.add_argument("--panel", type=float, help="radial panel width")
    p.add_argument("--order", type=int, help="Gauss-Legendre order per panel")
    p.add_argument("--lambda-tol", dest="lambda_tol", type=float, help="spectral cutoff tolerance")
    p.add_argument("--seed", type=int, help="seed for randomized suites")
    p.add_argument("--threads", type=int, help="bound on BLAS/OpenMP threads")
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--plot-data", dest="plot_data", help="tidy CSV of plottable series")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sl2harmonic",
                                 description="m-spherical harmonic analysis on SL(2, R)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="phi, Phi, c_m or the poles of 1/c_m")
    _common(p)
    p.add_argument("--kind", required=True, choices=["phi", "Phi", "c", "cinv-poles"])
    p.add_argument("--s", help="spectral parameter RE,IM")
    p.add_argument("--r-grid", dest="r_grid", help="a:b:n")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("transform", help="forward transform of a profile on the imaginary axis")
    _common(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--axis", required=True, help="lambda grid a:b:n")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("invert", help="inverse transform of a symbol")
    _common(p)
    p.add_argument("--symbol", help="tabulated symbol CSV")
    p.add_argument("--heat", type=float, help="heat symbol with this t")
    p.add_argument("--resolvent", help="resolvent symbol at z = RE,IM")
    p.add_argument("--route", choices=["axis", "contour"], default="axis")
    p.add_argument("--delta", type=float, help="contour abscissa")
    p.add_argument("--r-grid", dest="r_grid", required=True, help="a:b:n")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("heat", help="materialize the heat kernel h_t")
    _common(p)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("resolvent", help="materialize the resolvent kernel r_z")
    _common(p)
    p.add_argument("--z", required=True, help="RE,IM")
    p.add_argument("--method", choices=["auto", "contour", "laplace"], default="auto")
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("plancherel", help="spatial vs spectral L^2 norm of a profile")
    _common(p)
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_plancherel)

    p = sub.add_parser("intertwine", help="f' with f * g = g * f'")
    _common(p)
    p.add_argument("--in", dest="inp", help="profile of f (type n)")
    p.add_argument("--g", help="(n, m) profile of g")
    p.add_argument("--demo", action="store_true", help="use the built-in (0, 2) bump pair")
    p.add_argument("--f-prime", dest="f_prime", help="where to save f'")
    p.set_defaults(func=cmd_intertwine)

    p = sub.add_parser("verify", help="run acceptance checks and emit a scorecard")
    _common(p)
    p.add_argument("--suite", default="all", help="all, fast, or a list like 1,4,12")
    p.set_defaults(func=cmd_verify)
    return ap


_HANDLED = (DomainError, PoleError, PreconditionError, ResolutionError, ValueError, OSError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        with threadpool_limits(limits=cfg.threads):
            return args.func(args, cfg)
    except _HANDLED as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        if isinstance(exc, PoleError) and exc.location is not None:
            loc = exc.location
            record["location"] = str(loc) if isinstance(loc, Fraction) else repr(loc)
        sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
