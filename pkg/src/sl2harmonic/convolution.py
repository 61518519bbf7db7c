"""Direct convolution on G for K-equivariant functions, K-projections, intertwining.

Haar measure in Cartan coordinates x = k_theta a_r k_psi, theta in [0, 2pi),
psi in [0, pi):  dx = (KAPPA / 2pi^2) 2 sinh(2r) dr dtheta dpsi, so that radial
integrals carry the same constant KAPPA as the spherical transform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, PreconditionError, ResolutionError
from .group import cartan_arrays
from .transform import (KAPPA, RadialProfile, compact_transform_symbol, gl_panels, invert_axis,
                        load_profile, radial_grid, save_profile)

HAAR_ANGULAR = KAPPA / (2 * np.pi ** 2)
SUPPORT_THRESHOLD = 1e-10


@dataclass(frozen=True, eq=False)
class BiTypeProfile:
    """g(k_theta a_r k_phi) = e^{-i n theta - i m phi} G(r), G sampled on a grid."""

    n: int
    m: int
    r: np.ndarray
    w: np.ndarray
    values: np.ndarray
    alpha: float = 0.0
    evaluator: Callable | None = None

    def __post_init__(self):
        if (self.n - self.m) % 2:
            raise DomainError("left and right K-types must have equal parity")
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or np.any(np.diff(r) <= 0) or r[0] < 0:
            raise DomainError("grid must be strictly increasing and nonnegative")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @classmethod
    def from_radial(cls, f: RadialProfile) -> "BiTypeProfile":
        # the sampled grid, not an exact evaluator, drives the quadrature oracle
        return cls(f.m, f.m, f.r, f.w, f.values, f.alpha)

    def as_radial(self) -> RadialProfile:
        if self.n != self.m:
            raise DomainError("only (m, m) profiles are radial profiles of type m")
        return RadialProfile(self.m, self.r, self.w, self.values, self.alpha, None, self.evaluator)

    def __call__(self, r):
        if self.evaluator is not None:
            return self.evaluator(r)
        r = np.asarray(r, dtype=float)
        spl = self.__dict__.get("_spline")
        if spl is None:
            spl = CubicSpline(self.r, self.values)
            object.__setattr__(self, "_spline", spl)
        return np.where(r > self.r[-1], 0.0, spl(np.minimum(r, self.r[-1])))

    def on_group(self, theta, r, psi):
        return np.exp(-1j * (self.n * theta + self.m * psi)) * self(r)


def _as_bitype(f) -> BiTypeProfile:
    return BiTypeProfile.from_radial(f) if isinstance(f, RadialProfile) else f


def support_radius(f, thresh: float = SUPPORT_THRESHOLD) -> float:
    """Smallest grid radius beyond which |F| < thresh * max |F|."""
    mag = np.abs(f.values)
    live = np.flatnonzero(mag > thresh * mag.max())
    return float(f.r[min(live[-1] + 1, f.r.size - 1)])


def convolve_at(f, g, rho, n_theta: int = 64, r_panels: int = 12, order: int = 16):
    """(f * g)(a_rho) = int_G f(y) g(y^{-1} a_rho) dy by product quadrature.

    Gauss-Legendre in r over the support of f, trapezoid in both angles.
    """
    f, g = _as_bitype(f), _as_bitype(g)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    deg = abs(f.n) + abs(f.m) + abs(g.n) + abs(g.m)
    n_psi = 2 * deg + 4
    if n_theta < 2 * deg + 4:
        raise ResolutionError(f"n_theta = {n_theta} cannot resolve K-types of total degree {deg}")
    r_sup = support_radius(f)
    rr, wr = gl_panels(np.linspace(0, r_sup, r_panels + 1), order)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    ps = np.pi * np.arange(n_psi) / n_psi
    R, T, P = np.meshgrid(rr, th, ps, indexing="ij")
    weight = (wr * 2 * np.sinh(2 * rr))[:, None, None] * (2 * np.pi / n_theta) * (np.pi / n_psi)
    f_vals = f.on_group(T, R, P)
    # y^{-1} = k_{-psi} a_{-r} k_{-theta}
    cp, sp = np.cos(P), np.sin(P)
    ct, st = np.cos(T), np.sin(T)
    er, emr = np.exp(-R), np.exp(R)
    # k(-psi) = [[cp, -sp], [sp, cp]], a(-r) = diag(e^-r, e^r), k(-theta) likewise
    m00, m01 = cp * er, -sp * emr
    m10, m11 = sp * er, cp * emr
    y00 = m00 * ct + m01 * st
    y01 = -m00 * st + m01 * ct
    y10 = m10 * ct + m11 * st
    y11 = -m10 * st + m11 * ct
    out = np.empty(rho.shape, dtype=complex)
    for i, p in enumerate(rho):
        ep, emp = np.exp(p), np.exp(-p)
        th2, r2, ps2 = cartan_arrays(y00 * ep, y01 * emp, y10 * ep, y11 * emp)
        g_vals = g.on_group(th2, r2, ps2)
        out[i] = HAAR_ANGULAR * np.sum(weight * f_vals * g_vals)
    return out


def convolve(f, g, rho=None, **kw) -> BiTypeProfile:
    """f * g sampled at ``rho`` (default: a coarse grid on [0, supp f + supp g])."""
    f, g = _as_bitype(f), _as_bitype(g)
    if rho is None:
        top = support_radius(f) + support_radius(g)
        rho, w = gl_panels(np.linspace(0, top, 9), 8)
    else:
        rho = np.asarray(rho, dtype=float)
        w = np.zeros_like(rho)
    vals = convolve_at(f, g, rho, **kw)
    return BiTypeProfile(f.n, g.m, rho, w, vals, f.alpha)


def k_project(func, n: int, m: int, r, n_theta: int = 64, n_psi: int = 64) -> BiTypeProfile:
    """The (n, m) K-Fourier component of ``func`` (a function of (N, 2, 2) matrices).

    Uses the double cover theta, psi in [0, 2pi) so every (n, m) is reached.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    ps = 2 * np.pi * np.arange(n_psi) / n_psi
    T, P = np.meshgrid(th, ps, indexing="ij")
    vals = np.empty(r.shape, dtype=complex)
    phase = np.exp(1j * (n * T + m * P))
    for i, rr in enumerate(r):
        mats = _kak(T.ravel(), rr, P.ravel())
        vals[i] = np.mean(phase.ravel() * func(mats))
    if (n - m) % 2:
        # the component vanishes identically; return it with the parity of (n, n)
        return BiTypeProfile(n, n, r, np.zeros_like(r), vals)
    return BiTypeProfile(n, m, r, np.zeros_like(r), vals)


def _kak(theta, r, psi):
    theta, psi = np.asarray(theta, dtype=float), np.asarray(psi, dtype=float)
    r = np.broadcast_to(np.asarray(r, dtype=float), theta.shape)
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(psi), np.sin(psi)
    er, emr = np.exp(r), np.exp(-r)
    out = np.empty(theta.shape + (2, 2))
    # k_theta a_r k_psi with k = [[c, s], [-s, c]]
    out[..., 0, 0] = ct * er * cp - st * emr * sp
    out[..., 0, 1] = ct * er * sp + st * emr * cp
    out[..., 1, 0] = -st * er * cp - ct * emr * sp
    out[..., 1, 1] = -st * er * sp + ct * emr * cp
    return out


def k_expand(func, max_type: int, r, **kw) -> dict:
    """All components with |n|, |m| <= max_type."""
    out = {}
    for n in range(-max_type, max_type + 1):
        for m in range(-max_type, max_type + 1):
            if (n - m) % 2 == 0:
                out[(n, m)] = k_project(func, n, m, r, **kw)
    return out


def fejer_sum(components: dict, max_type: int, theta, r_index: int, psi):
    """Fejer-weighted sum of K-components at (theta, r_i, psi)."""
    total = 0.0
    for (n, m), prof in components.items():
        if abs(n) >= max_type or abs(m) >= max_type:
            continue
        fw = (1 - abs(n) / max_type) * (1 - abs(m) / max_type)
        total = total + fw * np.exp(-1j * (n * theta + m * psi)) * prof.values[r_index]
    return total


def save_bitype(path, g: BiTypeProfile) -> None:
    """CSV of samples plus a JSON sidecar carrying both type indices."""
    carrier = RadialProfile(g.m, g.r, g.w, g.values, g.alpha) if g.r.size > 1 and max(
        g.r[-1], g.w.sum()) >= 10 - 1e-9 else None
    if carrier is None:
        # short probe grids: pad with zeros out to r = 10
        r = np.concatenate([g.r, [max(10.0, g.r[-1] + 1.0)]])
        carrier = RadialProfile(g.m, r, np.append(g.w, 0.0), np.append(g.values, 0.0), g.alpha)
    save_profile(path, carrier, {"n": g.n, "padded": carrier.r.size - g.r.size})


def load_bitype(path) -> BiTypeProfile:
    prof, meta = load_profile(path)
    keep = prof.r.size - int(meta.get("padded", 0))
    return BiTypeProfile(int(meta.get("n", prof.m)), prof.m, prof.r[:keep], prof.w[:keep],
                         prof.values[:keep], prof.alpha)


# --- intertwining --------------------------------------------------------------------

@dataclass(frozen=True)
class IntertwineResult:
    f_prime: RadialProfile
    residual: float
    support_leak: float


def intertwine(f: RadialProfile, g: BiTypeProfile, probe=None, tol: float = 1e-8,
               n_theta: int = 64) -> IntertwineResult:
    """f' of type m with f * g = g * f', via the shared symbol of f and f'."""
    n, m = g.n, g.m
    if f.m != n:
        raise DomainError("f must have the left type of g")
    if (m - n) % 2:
        raise DomainError("m - n must be even")
    for prof in (f, g):
        mag = np.abs(prof.values)
        if np.any(mag[prof.r > 0.95 * prof.r[-1]] > SUPPORT_THRESHOLD * mag.max()):
            raise PreconditionError("intertwining needs compactly supported profiles")
    r_f = support_radius(f)
    # same symbol, read on the m side
    psi = compact_transform_symbol(f, m, tol)
    grid_r, grid_w = radial_grid(r_max=10.0)
    live = grid_r <= r_f + 2.0
    vals = np.zeros(grid_r.shape, dtype=complex)
    vals[live] = invert_axis(psi, grid_r[live])
    band = (grid_r > r_f + 0.25) & live
    leak = float(np.max(np.abs(vals[band])) / np.max(np.abs(vals))) if band.any() else 0.0
    f_prime = RadialProfile(m, grid_r, grid_w, vals, f.alpha)
    if probe is None:
        probe = np.linspace(0.1, r_f + support_radius(g), 6)
    lhs = convolve_at(f, g, probe, n_theta=n_theta)
    rhs = convolve_at(g, f_prime, probe, n_theta=n_theta)
    residual = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
    return IntertwineResult(f_prime, residual, leak)
