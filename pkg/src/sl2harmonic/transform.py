"""The m-spherical transform of radial profiles and its two inversion formulas.

Normalisation: for a type-m function f with radial part F,

    f^(s) = KAPPA * int_0^inf F(r) phi_{m,s}(a_r) 2 sinh(2r) dr,

with KAPPA = 4 pi. This is the unique constant for which the inversion
constants 1/(8 pi^2) and 1/(8 pi) below invert the transform.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, PreconditionError
from .special import (as_complex, c_inverse, discrete_spectrum, in_discrete,
                      plancherel_density)
from .spherical import _hc_series, phi, phi_big

KAPPA = 4.0 * np.pi
KAPPA_VERSION = "4pi"
AXIS_CONST = 1.0 / (8.0 * np.pi ** 2)
CONTOUR_CONST = 1.0 / (4.0 * np.pi ** 2)
DISCRETE_CONST = 1.0 / (8.0 * np.pi)
GL_ORDER = 16
_CHUNK = 1_500_000


# --- quadrature -------------------------------------------------------------

def gl_panels(edges, order: int = GL_ORDER):
    """Composite Gauss-Legendre nodes and weights over consecutive edges."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    nodes = (lo + hi) / 2 + half * x[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def radial_grid(r_max: float = 30.0, h: float = 0.5, order: int = GL_ORDER,
                freq: float = 0.0, fine_to: float = 8.0):
    """Graded panels: geometric towards r = 0, width ``h`` beyond 1/2.

    ``freq`` > 0 narrows the panels below ``fine_to`` to one period of
    e^{i freq r} each.
    """
    if r_max < 1:
        raise DomainError("r_max must be at least 1")
    edges = [0.0, *np.geomspace(1e-6, 0.25, 9), 0.5]
    pos = 0.5
    while pos < r_max - 1e-12:
        step = h
        if freq > 0 and pos < fine_to:
            step = min(h, 2 * np.pi / freq)
        pos = min(pos + step, r_max)
        edges.append(pos)
    return gl_panels(np.array(edges), order)


def _width_classes(r, base=0.5):
    # panel width in lambda resolving e^{2 i lambda r}: one period per panel
    r = np.asarray(r, dtype=float)
    key = np.where(r > np.pi / base, np.ceil(np.log2(np.maximum(r, 1e-300))), -np.inf)
    for k in np.unique(key):
        sel = key == k
        rmax = r[sel].max()
        yield sel, min(base, np.pi / max(rmax, 1e-300)), rmax


def _lambda_edges(lam_max: float, width: float, rmax: float, fine: float = 50.0) -> np.ndarray:
    """Panel edges on [0, lam_max]: width ``width`` up to ``fine``, then growing
    geometrically but never past two periods of e^{2 i lambda rmax}."""
    top = min(lam_max, fine)
    edges = list(np.linspace(0.0, top, int(np.ceil(top / width)) + 1))
    cap = max(width, 2 * np.pi / max(rmax, 1e-300))
    x = top
    while x < lam_max:
        x = min(x + min(max(width, 0.1 * x), cap), lam_max)
        edges.append(x)
    return np.array(edges)


def _cutoff(log_w, tol: float = 1e-15, lam_max: float = 1e4, lam_min: float = 1.0):
    """Smallest probe lambda beyond which exp(log_w) < tol * its peak."""
    lam = np.unique(np.concatenate([np.linspace(0, 50, 501), np.geomspace(50, lam_max, 200)]))
    lw = np.real(log_w(lam))
    lw = np.where(np.isnan(lw), -np.inf, lw)
    peak = lw.max()
    if not np.isfinite(peak):
        return lam_min
    above = np.flatnonzero(lw > peak + np.log(tol))
    if above.size == 0:
        return lam_min
    last = above[-1]
    if last == lam.size - 1:
        return lam_max
    return max(lam_min, float(lam[last + 1]))


# --- profiles -----------------------------------------------------------------

@dataclass(frozen=True)
class Tail:
    """F(r) ~ coeff * e^{rate r} beyond the grid."""

    rate: float
    coeff: complex = 0.0


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial part F(r) = f(a_r) of a type-m function, sampled on quadrature nodes."""

    m: int
    r: np.ndarray
    w: np.ndarray
    values: np.ndarray
    alpha: float = 0.0
    tail: Tail | None = None
    evaluator: Callable | None = None

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0) or r[0] < 0:
            raise DomainError("grid must be strictly increasing and nonnegative")
        # Gauss-Legendre nodes stop short of the last edge; the weights sum to the span
        if max(r[-1], float(np.sum(self.w))) < 10 - 1e-9:
            raise DomainError("grid must cover [0, 10]")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.w.shape != r.shape or self.values.shape != r.shape:
            raise DomainError("grid, weights and values must have equal length")

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def __call__(self, r):
        """F at arbitrary radii: the evaluator if present, else a cubic spline."""
        if self.evaluator is not None:
            return self.evaluator(r)
        return self.interpolate(r)

    def interpolate(self, r):
        r = np.asarray(r, dtype=float)
        spl_re, spl_im = _splines(self)
        out = spl_re(r) + 1j * spl_im(r)
        beyond = r > self.r_max
        if self.tail is not None and self.tail.coeff != 0:
            out = np.where(beyond, self.tail.coeff * np.exp(self.tail.rate * r), out)
        else:
            out = np.where(beyond, 0.0, out)
        return out

    def with_values(self, values, **kw) -> "RadialProfile":
        return replace(self, values=np.asarray(values, dtype=complex), evaluator=None, **kw)

    def scaled(self, c) -> "RadialProfile":
        tail = self.tail and Tail(self.tail.rate, c * self.tail.coeff)
        ev = self.evaluator
        return replace(self, values=c * self.values, tail=tail,
                       evaluator=None if ev is None else (lambda r: c * ev(r)))

    def __sub__(self, other: "RadialProfile") -> "RadialProfile":
        if self.r.shape != other.r.shape or not np.allclose(self.r, other.r):
            raise DomainError("profiles live on different grids")
        return self.with_values(self.values - other.values, tail=None)


_SPLINE_CACHE: dict = {}


def _splines(p: RadialProfile):
    key = id(p)
    hit = _SPLINE_CACHE.get(key)
    if hit is not None and hit[0] is p:
        return hit[1]
    spl = (CubicSpline(p.r, p.values.real), CubicSpline(p.r, p.values.imag))
    if len(_SPLINE_CACHE) > 64:
        _SPLINE_CACHE.clear()
    _SPLINE_CACHE[key] = (p, spl)
    return spl


def profile_from_function(m: int, func, alpha: float = 0.0, grid=None, tail=None) -> RadialProfile:
    r, w = grid if grid is not None else radial_grid()
    return RadialProfile(m, r, w, func(r), alpha=alpha, tail=tail, evaluator=func)


# --- strip and symbols ----------------------------------------------------------

@dataclass(frozen=True)
class Strip:
    """Closed strip |Re s| <= delta / 2."""

    delta: float | Fraction

    def __post_init__(self):
        if self.delta < 0:
            raise DomainError("strip width must be nonnegative")

    def __contains__(self, s) -> bool:
        if isinstance(s, (Fraction, int)):
            return 2 * abs(Fraction(s)) <= self.delta
        return 2 * abs(complex(s).real) <= float(self.delta)


def _key(p) -> Fraction:
    return Fraction(p).limit_denominator(64)


@dataclass(frozen=True, eq=False)
class SphericalSymbol:
    """An even function psi(s) together with its values on D_m.

    ``domain``: psi is holomorphic on |Re s| < domain.
    ``log_func``: optional log psi, used where psi itself would overflow.
    """

    m: int
    kind: str
    func: Callable
    discrete_values: dict = field(default_factory=dict)
    log_func: Callable | None = None
    domain: float = np.inf
    params: dict = field(default_factory=dict)

    def __call__(self, s):
        out = self.func(as_complex(s))
        return out if np.ndim(out) else complex(out)

    def log(self, s):
        s = as_complex(s)
        if self.log_func is not None:
            return self.log_func(s)
        with np.errstate(divide="ignore"):
            return np.log(self.func(s))

    def discrete(self, p) -> complex:
        try:
            return complex(self.discrete_values[_key(p)])
        except KeyError:
            raise PreconditionError(f"symbol has no value at the discrete point {p}") from None

    def __mul__(self, other: "SphericalSymbol") -> "SphericalSymbol":
        if self.m != other.m:
            raise DomainError("symbols of different types")
        disc = {k: self.discrete_values[k] * other.discrete_values[k]
                for k in self.discrete_values if k in other.discrete_values}
        lf = None
        if self.log_func is not None or other.log_func is not None:
            lf = lambda s: self.log(s) + other.log(s)  # noqa: E731
        return SphericalSymbol(self.m, "product", lambda s: self.func(s) * other.func(s), disc,
                               lf, min(self.domain, other.domain),
                               {"factors": (self.kind, other.kind)})

    def scaled(self, c) -> "SphericalSymbol":
        lf = None if self.log_func is None else (lambda s: np.log(c) + self.log_func(s))
        return SphericalSymbol(self.m, self.kind, lambda s: c * self.func(s),
                               {k: c * v for k, v in self.discrete_values.items()}, lf,
                               self.domain, dict(self.params, scale=c))

    def power(self, k: int) -> "SphericalSymbol":
        lf = None if self.log_func is None else (lambda s: k * self.log_func(s))
        return SphericalSymbol(self.m, self.kind, lambda s: self.func(s) ** k,
                               {key: v ** k for key, v in self.discrete_values.items()}, lf,
                               self.domain, dict(self.params, power=k))

    def minus_identity(self, other: "SphericalSymbol") -> "SphericalSymbol":
        """(self - 1) * other."""
        disc = {k: (self.discrete_values[k] - 1) * other.discrete_values[k]
                for k in other.discrete_values if k in self.discrete_values}
        return SphericalSymbol(self.m, "product", lambda s: (self.func(s) - 1) * other.func(s),
                               disc, None, min(self.domain, other.domain))

    def evenness_residual(self, s) -> float:
        s = as_complex(s)
        return float(np.max(np.abs(self.func(s) - self.func(-s))))

    def cauchy_riemann_residual(self, s, h: float = 1e-4) -> float:
        """max |d psi/dx + i d psi/dy| / max(1, |psi|) by centred differences."""
        s = as_complex(s)
        dx = (self.func(s + h) - self.func(s - h)) / (2 * h)
        dy = (self.func(s + 1j * h) - self.func(s - 1j * h)) / (2 * h)
        scale = np.maximum(1.0, np.abs(self.func(s)))
        return float(np.max(np.abs(dx + 1j * dy) / scale))


def _with_discrete(m, func):
    return {_key(p): complex(func(complex(p))) for p in discrete_spectrum(m)}


def heat_symbol(m: int, t: float) -> SphericalSymbol:
    """exp(t (s^2 - 1/4))."""
    if t <= 0:
        raise DomainError("heat time must be positive")
    f = lambda s: np.exp(t * (s * s - 0.25))  # noqa: E731
    lf = lambda s: t * (s * s - 0.25)  # noqa: E731
    return SphericalSymbol(int(m), "heat", f, _with_discrete(m, f), lf, np.inf, {"t": float(t)})


def resolvent_symbol(m: int, z: complex, beta: float | None = None) -> SphericalSymbol:
    """(z^2 - s^2)^{-1}; ``beta`` enforces z outside the strip |Re s| <= beta."""
    z = complex(z)
    if beta is not None and abs(z.real) <= beta:
        raise DomainError(f"z = {z} lies in the forbidden strip |Re z| <= {beta}")
    if in_discrete(m, z) or z == 0:
        raise DomainError("z may not be 0 or a discrete point")
    f = lambda s: 1.0 / (z * z - s * s)  # noqa: E731
    return SphericalSymbol(int(m), "resolvent", f, _with_discrete(m, f), None, abs(z.real),
                           {"z": z})


def rational_symbol(m: int, numer, denom) -> SphericalSymbol:
    """P(s^2) / Q(s^2) for coefficient lists in decreasing degree."""
    numer, denom = np.asarray(numer, dtype=complex), np.asarray(denom, dtype=complex)
    roots = np.sqrt(np.roots(denom)) if denom.size > 1 else np.array([])
    dom = float(np.min(np.abs(roots.real))) if roots.size else np.inf
    f = lambda s: np.polyval(numer, s * s) / np.polyval(denom, s * s)  # noqa: E731
    return SphericalSymbol(int(m), "rational", f, _with_discrete(m, f), None, dom,
                           {"numer": numer.tolist(), "denom": denom.tolist()})


def tabulated_symbol(m: int, lam, values, discrete_values: dict) -> SphericalSymbol:
    """Axis samples psi(i lambda), lambda >= 0, with explicit values on D_m."""
    lam = np.asarray(lam, dtype=float)
    values = np.asarray(values, dtype=complex)
    if np.any(np.diff(lam) <= 0) or lam[0] < 0:
        raise DomainError("lambda samples must be increasing and nonnegative")
    disc = {_key(k): complex(v) for k, v in discrete_values.items()}
    missing = [p for p in discrete_spectrum(m) if _key(p) not in disc]
    if missing:
        # only the positive points are usually supplied; use evenness
        for p in missing:
            if _key(-p) in disc:
                disc[_key(p)] = disc[_key(-p)]
        missing = [p for p in discrete_spectrum(m) if _key(p) not in disc]
    if missing:
        raise PreconditionError(f"missing discrete values at {[str(p) for p in missing]}")
    spl_re, spl_im = CubicSpline(lam, values.real), CubicSpline(lam, values.imag)

    def f(s):
        if np.any(np.abs(s.real) > 1e-12):
            raise DomainError("tabulated symbols are known on the imaginary axis only")
        x = np.abs(s.imag)
        out = spl_re(x) + 1j * spl_im(x)
        return np.where(x > lam[-1], 0.0, out)

    return SphericalSymbol(int(m), "tabulated", f, disc, None, 0.0, {"lambda_max": float(lam[-1])})


def profile_symbol(f: RadialProfile) -> SphericalSymbol:
    """The transform of a profile as a lazily evaluated symbol."""
    fn = lambda s: forward_transform(f, s, check=False)  # noqa: E731
    disc = {_key(p): forward_transform(f, complex(p), check=False) for p in discrete_spectrum(f.m)}
    return SphericalSymbol(f.m, "transform", fn, disc, None, np.inf)


def _support_transform(f: RadialProfile, m: int, s, support: float) -> np.ndarray:
    # panels resolve oscillation at frequency |Im s| and growth at rate 2|Re s|
    s = np.atleast_1d(as_complex(s)).ravel()
    out = np.empty(s.shape, dtype=complex)
    level = np.ceil(np.log2(np.abs(s.imag) + 2 * np.abs(s.real) + 2))
    for lv in np.unique(level):
        sel = level == lv
        width = min(0.25, np.pi / 2 ** lv)
        nodes, weights = gl_panels(np.linspace(0, support, int(np.ceil(support / width)) + 1))
        wts = f(nodes) * 2 * np.sinh(2 * nodes) * weights
        out[sel] = phi(m, s[sel][:, None], nodes[None, :]) @ wts
    return KAPPA * out


def compact_transform_symbol(f: RadialProfile, m: int | None = None, tol: float = 1e-8,
                             lam_cap: float = 400.0) -> SphericalSymbol:
    """Transform of a compactly supported profile, optionally read as a type-m symbol.

    Integrates over the support with panels matched to |Im s| and records the axis
    cutoff where |psi(i lambda)| (1 + lambda) falls below ``tol`` of its peak.
    """
    support = _support(f)
    fn = lambda s: _support_transform(f, f.m, s, support)  # noqa: E731
    target = f.m if m is None else int(m)
    disc = {_key(p): complex(fn(complex(p))[0]) for p in discrete_spectrum(target)}
    peak, lam, quiet = 0.0, 0.0, 0
    while lam < lam_cap and quiet < 2:
        x = np.linspace(lam, lam + 1, 9)
        mag = float(np.max(np.abs(fn(1j * x)) * (1 + x)))
        peak = max(peak, mag)
        quiet = quiet + 1 if mag < tol * peak else 0
        lam += 1
    if quiet < 2:
        raise PreconditionError("transform does not decay on the imaginary axis (sampling noise?)")
    return SphericalSymbol(target, "transform", lambda s: fn(s).reshape(np.shape(s)), disc, None,
                           np.inf, {"lambda_max": lam, "support": support})


# --- forward transform ------------------------------------------------------------

def _admissible(m, alpha, s):
    s = np.atleast_1d(s)
    inside = np.abs(s.real) <= (alpha + 1) / 2 + 1e-12
    return inside | np.array([in_discrete(m, v) for v in s])


def _tail_integral(f: RadialProfile, s, kernel):
    # int_R^inf coeff e^{rate r} kernel(s, r) 2 sinh 2r dr, truncated where negligible
    t = f.tail
    if t is None or t.coeff == 0:
        return np.zeros(np.shape(s), dtype=complex)
    growth = t.rate + 2 + 2 * np.max(np.abs(np.real(s))) - 1
    length = min(80.0, 40.0 / max(-growth, 0.5))
    nodes, weights = gl_panels(np.linspace(f.r_max, f.r_max + length, 9), 16)
    vals = t.coeff * np.exp(t.rate * nodes) * 2 * np.sinh(2 * nodes) * weights
    return kernel(s, nodes) @ vals


def forward_transform(f: RadialProfile, s, check: bool = True):
    """f^(s) = KAPPA int F(r) phi_{m,s}(a_r) 2 sinh 2r dr (plus the tail)."""
    s_arr = np.atleast_1d(as_complex(s)).ravel()
    if check:
        ok = _admissible(f.m, f.alpha, s_arr)
        if not ok.all():
            raise DomainError(f"s = {s_arr[~ok][0]} is outside S_(alpha+1) and D_m")
    if f.tail is not None and f.tail.coeff != 0:
        need = f.tail.rate + 2 + 2 * np.abs(s_arr.real) - 1
        if np.any(need >= 0):
            raise PreconditionError("profile tail is not integrable against phi_{m,s}")
    weights = f.w * f.values * 2 * np.sinh(2 * f.r)
    out = np.empty(s_arr.shape, dtype=complex)
    step = max(1, _CHUNK // f.r.size)
    for i in range(0, s_arr.size, step):
        ss = s_arr[i:i + step]
        out[i:i + step] = phi(f.m, ss[:, None], f.r[None, :]) @ weights
    kern = lambda ss, rr: phi(f.m, ss[:, None], rr[None, :])  # noqa: E731
    out = KAPPA * (out + _tail_integral(f, s_arr, kern))
    if np.ndim(s) == 0 and not isinstance(s, np.ndarray):
        return complex(out[0])
    return out.reshape(np.shape(as_complex(s)))


# --- inversion ----------------------------------------------------------------------

def _check_axis_integrable(psi: SphericalSymbol):
    if "lambda_max" in psi.params:
        return
    p = [abs(complex(psi(1j * lam))) * lam ** 2 for lam in (1e3, 1e4)]
    if p[0] > 0 and p[1] > 0.5 * p[0]:
        raise PreconditionError("int |psi(i lambda)| |c_m(i lambda)|^-2 d lambda appears to diverge")


def _axis_cutoff(psi: SphericalSymbol, tol):
    # symbols with a measured support on the axis carry their own cutoff
    if "lambda_max" in psi.params:
        return psi.params["lambda_max"]
    return _cutoff(lambda lam: np.real(psi.log(1j * lam)) + np.log1p(lam), tol)


def _discrete_part(psi, r, delta=None):
    total = np.zeros(np.shape(r), dtype=complex)
    for p in discrete_spectrum(psi.m):
        if delta is not None and abs(p) <= delta:
            continue
        total += abs(float(p)) * psi.discrete(p) * phi(psi.m, float(p), r)
    return DISCRETE_CONST * total


def invert_axis(psi: SphericalSymbol, r, tol: float = 1e-15, continuous_only: bool = False):
    """(1/8pi^2) int psi(i l) phi_{m,il} |c_m(il)|^-2 dl + (1/8pi) sum_{D_m} |s| psi(s) phi_{m,s}."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < 0):
        raise DomainError("radius must be nonnegative")
    _check_axis_integrable(psi)
    lam_max = _axis_cutoff(psi, tol)
    out = np.zeros(r_arr.shape, dtype=complex)
    for sel, width, rmax in _width_classes(r_arr):
        lam, wl = gl_panels(_lambda_edges(lam_max, width, rmax))
        weight = psi(1j * lam) * plancherel_density(psi.m, lam) * wl
        rs = r_arr[sel]
        step = max(1, _CHUNK // lam.size)
        vals = np.empty(rs.shape, dtype=complex)
        for i in range(0, rs.size, step):
            vals[i:i + step] = weight @ phi(psi.m, 1j * lam[:, None], rs[None, i:i + step])
        # the integrand is even in lambda
        out[sel] = 2 * AXIS_CONST * vals
    if not continuous_only:
        out = out + _discrete_part(psi, r_arr)
    return out if np.ndim(r) else complex(out[0])


def default_delta(m: int, alpha: float = 0.0) -> float:
    delta = (alpha + 1) / 2 + 0.26
    while in_discrete(m, delta, tol=1e-9):
        delta += 0.01
    return delta


def invert_contour(psi: SphericalSymbol, r, delta: float | None = None, alpha: float = 0.0,
                   tol: float = 1e-15):
    """(1/4pi^2) int psi(d+il) c_m(d+il)^-1 Phi_{m,-d-il} dl + (1/8pi) sum_{|s|>d} |s| psi(s) phi_{m,s}."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise DomainError("the shifted contour needs r > 0")
    if delta is None:
        delta = default_delta(psi.m, alpha)
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    if in_discrete(psi.m, delta, tol=1e-9):
        raise DomainError(f"contour Re s = {delta} passes through a pole of 1/c_{psi.m}")
    if psi.domain <= delta:
        raise PreconditionError(f"symbol is not holomorphic on the strip |Re s| <= {delta}")
    lam_max = _cutoff(lambda lam: np.real(psi.log(delta + 1j * lam)) + 0.5 * np.log1p(lam), tol)
    out = np.zeros(r_arr.shape, dtype=complex)
    # distance from the contour to the nearest pole of 1/c_m
    gap = min([abs(delta - float(p)) for p in discrete_spectrum(psi.m).positive] + [1.0])
    for sel, width, rmax in _width_classes(r_arr):
        half = _lambda_edges(lam_max, width, rmax)
        edges = np.concatenate([-half[:0:-1], half])
        if gap < 0.5:
            graded = np.geomspace(gap / 8, 0.5, 12)
            edges = np.unique(np.concatenate([edges[np.abs(edges) > 0.5], -graded, [0.0], graded]))
        lam, wl = gl_panels(edges)
        s = delta + 1j * lam
        cinv = c_inverse(psi.m, s)
        logpsi = psi.log(s)[:, None]
        rs = r_arr[sel]
        step = max(1, _CHUNK // lam.size)
        vals = np.empty(rs.shape, dtype=complex)
        for i in range(0, rs.size, step):
            rr = rs[None, i:i + step]
            big = rr >= 0.5
            # Phi_{m,-s}(a_r) = e^{(-2s-1) r} (1 + nu); merged with log psi against overflow
            integrand = np.empty((lam.size, rr.shape[1]), dtype=complex)
            if big.any():
                rb = rr[:, big[0]]
                with np.errstate(under="ignore"):
                    integrand[:, big[0]] = np.exp(logpsi + (-2 * s[:, None] - 1) * rb) \
                        * _hc_series(psi.m, -s[:, None], rb)
            if (~big).any():
                rsm = rr[:, ~big[0]]
                integrand[:, ~big[0]] = np.exp(logpsi) * phi_big(psi.m, -s[:, None], rsm)
            vals[i:i + step] = (cinv * wl) @ integrand
        out[sel] = CONTOUR_CONST * vals
    out = out + _discrete_part(psi, r_arr, delta)
    return out if np.ndim(r) else complex(out[0])


# --- Plancherel, norms, Paley-Wiener ------------------------------------------------

def _spectral_axis_integral(f: RadialProfile, tol=1e-14, width=0.5, lam_cap=400.0):
    """(1/8pi^2) int_R |f^(il)|^2 |c(il)|^-2 dl, extended panel by panel."""
    total = 0.0
    lo = 0.0
    quiet = 0
    while lo < lam_cap:
        lam, wl = gl_panels(np.array([lo, lo + width]))
        vals = forward_transform(f, 1j * lam, check=False)
        dens = np.abs(vals) ** 2 * plancherel_density(f.m, lam)
        part = float(np.sum(dens * wl))
        total += part
        lo += width
        quiet = quiet + 1 if part <= tol * total else 0
        if quiet >= 2:
            return 2 * AXIS_CONST * total
    raise PreconditionError("spectral side of the Plancherel identity does not converge")


def plancherel_check(f: RadialProfile):
    """(spatial ||f||_2^2, spectral side)."""
    if f.tail is not None and f.tail.coeff != 0 and 2 * f.tail.rate + 2 >= 0:
        raise PreconditionError("profile is not square integrable")
    lhs = KAPPA * float(np.sum(f.w * np.abs(f.values) ** 2 * 2 * np.sinh(2 * f.r)))
    if f.tail is not None and f.tail.coeff != 0:
        g = 2 * f.tail.rate
        lhs += KAPPA * abs(f.tail.coeff) ** 2 * (
            np.exp((g + 2) * f.r_max) / -(g + 2) - np.exp((g - 2) * f.r_max) / -(g - 2))
    rhs = _spectral_axis_integral(f)
    for p in discrete_spectrum(f.m):
        rhs += DISCRETE_CONST * abs(float(p)) * abs(forward_transform(f, float(p))) ** 2
    return lhs, float(rhs)


def l1_weighted_norm(f: RadialProfile, alpha: float | None = None) -> float:
    """KAPPA int |F(r)| e^{alpha r} 2 sinh 2r dr, with the analytic tail."""
    alpha = f.alpha if alpha is None else alpha
    total = KAPPA * float(np.sum(f.w * np.abs(f.values) * np.exp(alpha * f.r) * 2 * np.sinh(2 * f.r)))
    if f.tail is not None and f.tail.coeff != 0:
        g = f.tail.rate + alpha
        if g + 2 >= 0:
            raise PreconditionError(f"tail rate {f.tail.rate} is not integrable against the weight")
        total += KAPPA * abs(f.tail.coeff) * (
            np.exp((g + 2) * f.r_max) / -(g + 2) - np.exp((g - 2) * f.r_max) / -(g - 2))
    return total


@dataclass(frozen=True)
class PaleyWienerReport:
    support: float
    fitted_type: float
    type_bound: float
    axis_slope: float
    type_ok: bool
    decay_ok: bool


def _support(f: RadialProfile, thresh=1e-10) -> float:
    mag = np.abs(f.values)
    if f.tail is not None and f.tail.coeff != 0:
        raise PreconditionError("profile has a nonzero exponential tail")
    live = np.flatnonzero(mag > thresh * mag.max())
    top = float(f.r[live[-1]])
    if top > 0.9 * f.r_max:
        raise PreconditionError("profile does not look compactly supported")
    nxt = f.r[min(live[-1] + 1, f.r.size - 1)]
    return float(nxt)


def paley_wiener_report(f: RadialProfile, sigma=(10.0, 60.0), lam=(4.0, 20.0), n_decay: int = 6,
                        tol: float = 0.1) -> PaleyWienerReport:
    """Exponential type along Re s and polynomial decay along the axis.

    The type is the slope T in log|f^(sigma)| ~ c0 + T sigma + c1 log sigma + c2 / sigma.
    """
    support = _support(f)
    sub = lambda z: _support_transform(f, f.m, z, support)  # noqa: E731
    # keep e^{2 support sigma} inside double range
    hi = min(sigma[1], 300.0 / support)
    sig = np.linspace(min(sigma[0], hi / 6), hi, 41)
    vals = np.abs(sub(sig.astype(complex)))
    design = np.column_stack([np.ones_like(sig), sig, np.log(sig), 1 / sig])
    coef = np.linalg.lstsq(design, np.log(vals), rcond=None)[0]
    fitted = float(coef[1])
    grid = np.linspace(lam[0], lam[1] * 1.5, 600)
    axis = np.abs(sub(1j * grid))
    # upper envelope over windows of one oscillation period pi / support
    win = max(1, int(np.ceil(np.pi / support / (grid[1] - grid[0]))))
    env = np.array([axis[i:i + win].max() for i in range(grid.size - win)])
    g2 = grid[:env.size]
    keep = g2 <= lam[1]
    slope = float(np.polyfit(np.log(g2[keep]), np.log(env[keep]), 1)[0])
    bound = 2 * support
    return PaleyWienerReport(support, fitted, bound, slope,
                             fitted <= bound * (1 + tol), slope < -n_decay)


# --- serialisation --------------------------------------------------------------------

def save_profile(path, f: RadialProfile, extra: dict | None = None) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["r", "re", "im"])
        for r, v in zip(f.r, f.values):
            wr.writerow([repr(float(r)), repr(float(v.real)), repr(float(v.imag))])
    meta = {"m": f.m, "alpha": f.alpha, "kappa_version": KAPPA_VERSION,
            "tail_rate": None if f.tail is None else f.tail.rate,
            "tail_coeff": None if f.tail is None else [complex(f.tail.coeff).real,
                                                       complex(f.tail.coeff).imag],
            "weights": [float(x) for x in f.w]}
    meta.update(extra or {})
    path.with_suffix(".json").write_text(json.dumps(meta, indent=1))


def load_profile(path) -> tuple[RadialProfile, dict]:
    path = Path(path)
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    meta = json.loads(path.with_suffix(".json").read_text())
    if meta.get("kappa_version", KAPPA_VERSION) != KAPPA_VERSION:
        raise PreconditionError("profile was written with a different normalisation")
    tail = None
    if meta.get("tail_rate") is not None:
        tail = Tail(meta["tail_rate"], complex(*meta["tail_coeff"]))
    prof = RadialProfile(int(meta["m"]), rows[:, 0], np.asarray(meta["weights"]),
                         rows[:, 1] + 1j * rows[:, 2], float(meta["alpha"]), tail)
    return prof, meta


def save_symbol(path, psi: SphericalSymbol, lam) -> None:
    path = Path(path)
    lam = np.asarray(lam, dtype=float)
    vals = psi(1j * lam)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["lambda", "re", "im"])
        for x, v in zip(lam, np.atleast_1d(vals)):
            wr.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    disc = {str(k): [complex(v).real, complex(v).imag] for k, v in psi.discrete_values.items()}
    path.with_suffix(".json").write_text(json.dumps({"m": psi.m, "kind": psi.kind,
                                                     "discrete": disc}, indent=1))


def load_symbol(path) -> SphericalSymbol:
    path = Path(path)
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    meta = json.loads(path.with_suffix(".json").read_text())
    disc = {Fraction(k): complex(*v) for k, v in meta["discrete"].items()}
    return tabulated_symbol(int(meta["m"]), rows[:, 0], rows[:, 1] + 1j * rows[:, 2], disc)
