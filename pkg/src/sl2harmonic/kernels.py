"""Heat and resolvent kernels, multiplier synthesis and the contour generator formula."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, PreconditionError
from .special import c_function, c_inverse, discrete_spectrum, in_discrete, plancherel_density
from .spherical import _hc_series, phi, phi_big
from .transform import (AXIS_CONST, CONTOUR_CONST, DISCRETE_CONST, KAPPA, RadialProfile,
                        SphericalSymbol, default_delta, gl_panels, heat_symbol, invert_axis,
                        invert_contour, l1_weighted_norm, profile_symbol, radial_grid,
                        resolvent_symbol)

SPLIT_RADIUS = 1.0


@dataclass(frozen=True)
class SpectralCutoffs:
    """alpha_m > max{alpha^2 + 2 alpha, m^2 - 2|m|} / 4 and the derived beta_m < gamma_m."""

    alpha: float
    m: int
    alpha_m: float | None = None
    beta_m: float = field(init=False)
    gamma_m: float = field(init=False)

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError("weight exponent must be nonnegative")
        floor = 0.25 * max(self.alpha ** 2 + 2 * self.alpha, self.m ** 2 - 2 * abs(self.m))
        am = floor + 1.0 if self.alpha_m is None else float(self.alpha_m)
        if am <= floor:
            raise DomainError(f"alpha_m must exceed {floor}")
        object.__setattr__(self, "alpha_m", am)
        object.__setattr__(self, "beta_m", float(np.sqrt(am + 0.25)))
        object.__setattr__(self, "gamma_m", float(np.sqrt(am + 1.25)))

    @property
    def floor(self) -> float:
        return 0.25 * max(self.alpha ** 2 + 2 * self.alpha, self.m ** 2 - 2 * abs(self.m))


def _cut(m, alpha, cut):
    return SpectralCutoffs(alpha, m) if cut is None else cut


# --- synthesis from a symbol ------------------------------------------------------

def _heat_contour_delta(m, t, r):
    # saddle of e^{t d^2 - 2 d r}, kept off the poles of 1/c_m
    return _off_pole(m, max(r / t, 0.3))


def heat_values(m: int, t: float, r) -> np.ndarray:
    """h_t(a_r): axis inversion for r <= 1, saddle-point contour beyond."""
    psi = heat_symbol(m, t)
    r_in = np.atleast_1d(np.asarray(r, dtype=float))
    r = r_in.ravel()
    out = np.empty(r.shape, dtype=complex)
    near = r <= SPLIT_RADIUS
    if near.any():
        out[near] = invert_axis(psi, r[near])
    far = np.flatnonzero(~near)
    # group radii sharing (nearly) the same saddle contour
    bins = np.round(np.log(r[far]) * 8) if far.size else far
    for b in np.unique(bins):
        idx = far[bins == b]
        d = _heat_contour_delta(m, t, float(np.median(r[idx])))
        out[idx] = invert_contour(psi, r[idx], d)
    return out.reshape(r_in.shape)


def heat_kernel(m: int, t: float, cut: SpectralCutoffs | None = None, grid=None) -> RadialProfile:
    """The heat kernel h_t as a radial profile (Gaussian decay, no tail)."""
    if t <= 0:
        raise DomainError("t must be positive")
    cut = _cut(m, 0.0, cut)
    r, w = radial_grid() if grid is None else grid
    return RadialProfile(m, r, w, heat_values(m, t, r), alpha=cut.alpha, tail=None,
                         evaluator=lambda x: heat_values(m, t, x))


def heat_pde_check(m: int, t: float, dt: float, r) -> float:
    """max_r |(h_{t+dt} - h_{t-dt}) / 2dt - h'_t| with h'_t synthesised from (s^2 - 1/4) e^{t(s^2-1/4)}."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    fd = (heat_values(m, t + dt, r) - heat_values(m, t - dt, r)) / (2 * dt)
    psi = heat_symbol(m, t)
    deriv = SphericalSymbol(m, "heat-derivative", lambda s: (s * s - 0.25) * psi.func(s),
                            {k: (float(k) ** 2 - 0.25) * v for k, v in psi.discrete_values.items()})
    spec = invert_axis(deriv, r)
    return float(np.max(np.abs(fd - spec)))


def _resolvent_closed(m, z, r):
    # r_z(a_r) = Phi_{m,-z}(a_r) / (4 pi z c_m(z)), from closing the contour at s = z
    return phi_big(m, -z, r) / (4 * np.pi * z * c_function(m, z))


def _off_pole(m, d, gap=0.15):
    for p in discrete_spectrum(m).positive:
        if abs(d - float(p)) < gap:
            d = float(p) + gap
    return d


def _heat_family(m, ts, r):
    """h_t(a_r) for many t at one radius, sharing the spectral integrand."""
    t0 = ts.min()
    if r <= SPLIT_RADIUS:
        lam_max = np.sqrt(37.0 / t0) + 1.0
        width = min(0.5, np.pi / max(r, 1e-300))
        lam, wl = gl_panels(np.linspace(0, lam_max, int(np.ceil(lam_max / width)) + 1))
        v = wl * plancherel_density(m, lam) * phi(m, 1j * lam, r)
        out = 2 * AXIS_CONST * (np.exp(-np.outer(ts, lam * lam + 0.25)) @ v)
        skip = 0.0
    else:
        d = _off_pole(m, default_delta(m))
        lam_max = np.sqrt(37.0 / t0 + d * d) + 1.0
        width = min(0.5, np.pi / r)
        lam, wl = gl_panels(np.linspace(-lam_max, lam_max, 2 * int(np.ceil(lam_max / width)) + 1))
        s = d + 1j * lam
        v = wl * c_inverse(m, s) * phi_big(m, -s, r)
        out = CONTOUR_CONST * (np.exp(np.outer(ts, s * s - 0.25)) @ v)
        skip = d
    for p in discrete_spectrum(m):
        if abs(p) > skip:
            out = out + DISCRETE_CONST * abs(float(p)) * np.exp(ts * (float(p) ** 2 - 0.25)) \
                * phi(m, float(p), r)
    return out


def heat_laplace_values(m: int, lam: float, r, alpha_m: float, order: int = 8):
    """l_lambda(a_r) = int_0^inf e^{-lambda t} h_t(a_r) dt on a geometric t grid.

    The grid starts at r^2 / 60, below which h_t(a_r) < e^{-60}.
    """
    rate = lam - alpha_m
    if rate <= 0:
        raise DomainError("Laplace parameter must exceed alpha_m")
    t_end = 40.0 / rate
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty(r.shape, dtype=complex)
    for i, rr in enumerate(r):
        t0 = max(1e-4, rr * rr / 60.0)
        edges = np.concatenate([[0.0] if t0 == 1e-4 else [], np.geomspace(t0, t_end, 48)])
        ts, wt = gl_panels(edges, order)
        out[i] = (wt * np.exp(-lam * ts)) @ _heat_family(m, ts, rr)
    return out


def resolvent_kernel(m: int, z: complex, cut: SpectralCutoffs | None = None, grid=None,
                     method: str = "auto") -> RadialProfile:
    """r_z with symbol (z^2 - s^2)^{-1}, for z outside the open strip |Re z| < gamma_m.

    "contour" (the default) evaluates the shifted-contour inversion in closed
    form by its residue at s = z; "laplace" integrates the heat semigroup
    and needs real z. The Laplace route resolves h_t for t down to ~1e-6 at
    radii below 0.08 and costs about a minute per such node.
    """
    cut = _cut(m, 0.0, cut)
    z = complex(z)
    if abs(z.real) < cut.gamma_m:
        raise DomainError(f"z = {z} lies inside the strip |Re z| < gamma_m = {cut.gamma_m:.6g}")
    if z.real < 0:
        z = -z
    if grid is None:
        grid = radial_grid(freq=2 * abs(z.imag))
    r, w = grid
    if method in ("auto", "contour"):
        ev = lambda x: _resolvent_closed(m, z, np.asarray(x, dtype=float))  # noqa: E731
    elif method == "laplace":
        if abs(z.imag) > 0:
            raise DomainError("the Laplace route needs real z")
        lam = z.real ** 2 - 0.25
        ev = lambda x: heat_laplace_values(m, lam, x, cut.alpha_m)  # noqa: E731
    else:
        raise ValueError(f"unknown method {method!r}")
    rr = np.maximum(r, 1e-300)
    return RadialProfile(m, r, w, ev(rr), alpha=cut.alpha, tail=None, evaluator=ev)


# --- multipliers ----------------------------------------------------------------------

def strip_sup(psi: SphericalSymbol, delta: float, n_re: int = 9, y_max: float = 200.0,
              n_im: int = 400) -> float:
    """M_delta(psi) = sup over |Re s| <= delta/2 of (1+|s|)^3 |psi(s)|, by sampling.

    Raises when the weighted modulus is still growing at the edge of the sample.
    """
    x = np.linspace(0, delta / 2, n_re)
    y = np.concatenate([np.linspace(0, 20, n_im // 2), np.geomspace(20, y_max, n_im // 2)])
    s = x[:, None] + 1j * y[None, :]
    vals = (1 + np.abs(s)) ** 3 * np.abs(psi(s))
    if not np.all(np.isfinite(vals)):
        raise PreconditionError("symbol is unbounded on the strip")
    edge = vals[:, -n_im // 8:].max()
    if edge > 0.5 * vals.max() and edge > 1e-12:
        raise PreconditionError("(1+|s|)^3 |psi(s)| does not decay on the strip: M_delta infinite")
    return float(vals.max())


def _check_holomorphic(psi, delta, rng=None, tol=1e-6):
    rng = np.random.default_rng(0) if rng is None else rng
    pts = rng.uniform(-0.45 * delta, 0.45 * delta, 8) + 1j * rng.uniform(-5, 5, 8)
    if psi.evenness_residual(pts) > 1e-8 * max(1.0, float(np.max(np.abs(psi(pts))))):
        raise PreconditionError("symbol is not even")
    if psi.cauchy_riemann_residual(pts) > tol:
        raise PreconditionError("symbol fails the Cauchy-Riemann check on the strip")


def _contour_t(m, alpha, delta):
    lo, hi = (alpha + 1) / 2, delta / 2
    t = lo + 0.5 * (hi - lo)
    while in_discrete(m, t, tol=1e-9):
        t += 0.01 * (hi - lo)
    return t


def _certificate_constants(m: int, alpha: float, t: float) -> dict:
    """Explicit majorants turning sup bounds on psi into an L^1(omega) bound.

    With M = M_delta(psi):
      |f(a_r)| <= A M + (1/8pi) sum |s psi(s)| |phi_s(a_r)|           (r <= 1)
      |f(a_r)| <= B M e^{-(2t+1) r} + (1/8pi) sum_{|s|>t} |s psi(s)| K_s e^{-(2|s|+1) r}   (r > 1)
    """
    lam, wl = gl_panels(np.linspace(0, 400, 801))
    a_const = 2 / (8 * np.pi ** 2) * np.sum(wl * plancherel_density(m, lam) / (1 + lam) ** 3)
    lam2, wl2 = gl_panels(np.linspace(-400, 400, 1601))
    s = t + 1j * lam2
    rr = np.linspace(1.0, 8.0, 29)
    nu_sup = np.max(np.abs(_hc_series(m, -s[:, None], rr[None, :])), axis=1)
    b_const = 1 / (4 * np.pi ** 2) * np.sum(wl2 * np.abs(c_inverse(m, s)) * nu_sup
                                           / (1 + np.abs(s)) ** 3)
    rn, wn = gl_panels(np.linspace(0, 1, 9))
    vol1 = KAPPA * np.sum(wn * np.exp(alpha * rn) * 2 * np.sinh(2 * rn))
    far = KAPPA * _exp_moment(-(2 * t + 1) + alpha)
    disc = {}
    for p in discrete_spectrum(m):
        ph = np.abs(phi(m, float(p), rn))
        near = KAPPA * np.sum(wn * ph * np.exp(alpha * rn) * 2 * np.sinh(2 * rn))
        if abs(p) > t:
            rg = np.linspace(1, 12, 45)
            k_s = np.max(np.abs(phi(m, float(p), rg)) * np.exp((2 * abs(float(p)) + 1) * rg))
            tail = k_s * KAPPA * _exp_moment(-(2 * abs(float(p)) + 1) + alpha)
        else:
            tail = 0.0
        disc[p] = (near + tail) / (8 * np.pi)
    return {"A": float(a_const), "B": float(b_const), "vol1": float(vol1), "far": float(far),
            "discrete": disc}


_constants_cached = lru_cache(maxsize=64)(_certificate_constants)


def certificate_constants(m: int, alpha: float, t: float) -> dict:
    """Cached explicit majorants; see ``_certificate_constants``."""
    k = _constants_cached(int(m), float(alpha), float(t))
    return dict(k, discrete=dict(k["discrete"]))


def _exp_moment(g):
    # int_1^inf e^{g r} 2 sinh 2r dr
    if g + 2 >= 0:
        raise PreconditionError("contour abscissa too small for the weight")
    return float(np.exp(g + 2) / -(g + 2) - np.exp(g - 2) / -(g - 2))


def synthesize_values(psi: SphericalSymbol, r, t: float, tol: float = 1e-10) -> np.ndarray:
    r_in = np.atleast_1d(np.asarray(r, dtype=float))
    r = r_in.ravel()
    out = np.empty(r.shape, dtype=complex)
    near = r <= SPLIT_RADIUS
    if near.any():
        out[near] = invert_axis(psi, r[near], tol=tol)
    if (~near).any():
        out[~near] = invert_contour(psi, r[~near], t, tol=tol)
    return out


def multiplier_synthesize(psi: SphericalSymbol, delta: float, cut: SpectralCutoffs | None = None,
                          grid=None, t: float | None = None, tol: float = 1e-10):
    """The unique f in L^1(G, omega)_m with f^ = psi, and its norm certificate.

    ``tol`` is the relative spectral truncation; slowly decaying symbols cost
    roughly tol^{-1/3} quadrature nodes.
    """
    cut = _cut(psi.m, 0.0, cut)
    alpha = cut.alpha
    if delta <= alpha + 1:
        raise DomainError("delta must exceed alpha + 1")
    if psi.domain < delta / 2:
        raise PreconditionError("symbol is not holomorphic on the strip")
    _check_holomorphic(psi, delta)
    m_delta = strip_sup(psi, delta)
    t = _contour_t(psi.m, alpha, delta) if t is None else t
    if not (alpha + 1) / 2 < t < delta / 2 or in_discrete(psi.m, t, tol=1e-9):
        raise DomainError("contour abscissa must lie in ((alpha+1)/2, delta/2) minus D_m")
    r, w = radial_grid() if grid is None else grid
    vals = synthesize_values(psi, r, t, tol)
    f = RadialProfile(psi.m, r, w, vals, alpha=alpha, tail=None,
                      evaluator=lambda x: synthesize_values(psi, x, t, tol))
    k = certificate_constants(psi.m, alpha, t)
    dsum = 0.0
    for p in discrete_spectrum(psi.m):
        if abs(p) > delta / 2:
            dsum += abs(float(p) * psi.discrete(p)) / (2 * abs(float(p)) - alpha - 1)
    bound = m_delta * (k["A"] * k["vol1"] + k["B"] * k["far"])
    bound += sum(abs(float(p)) * abs(psi.discrete(p)) * k["discrete"][p] for p in discrete_spectrum(psi.m))
    # C_m: the factor by which the explicit bound exceeds M_delta + discrete sum
    c_m = bound / (m_delta + dsum) if m_delta + dsum > 0 else 0.0
    cert = {"m": psi.m, "alpha": alpha, "delta": delta, "t": t, "M_delta": m_delta,
            "discrete_sum": dsum, "C_m": c_m, "certificate": bound,
            "computed_norm": l1_weighted_norm(f)}
    return f, cert


def approx_identity_symbol(m: int, zeta: float, n: int) -> SphericalSymbol:
    """(zeta^2 / (zeta^2 - s^2))^N, the symbol of (zeta^2 r_zeta)^{*N}."""
    if n == 0:
        return SphericalSymbol(m, "identity", lambda s: np.ones_like(s),
                               {k: 1.0 for k in resolvent_symbol(m, zeta).discrete_values})
    return resolvent_symbol(m, zeta).power(n).scaled(zeta ** (2 * n))


def approx_identity_gap(f, zeta: float, n: int, cut: SpectralCutoffs | None = None,
                        grid=None) -> float:
    """||(zeta^2 r_zeta)^{*N} * f - f||_{L^1(omega)}, built in symbol space."""
    psi_f = f if isinstance(f, SphericalSymbol) else profile_symbol(f)
    cut = _cut(psi_f.m, 0.0, cut)
    if abs(zeta) <= cut.gamma_m:
        raise DomainError("zeta must lie outside [-gamma_m, gamma_m]")
    if n == 0:
        return 0.0
    gap = approx_identity_symbol(psi_f.m, abs(zeta), n).minus_identity(psi_f)
    delta = min(2 * cut.gamma_m, 2 * abs(zeta) - 0.1)
    prof, _ = multiplier_synthesize(gap, delta, cut, grid)
    return l1_weighted_norm(prof)


def generator_reconstruct(h: SphericalSymbol, cut: SpectralCutoffs | None = None, y_max: float = 60.0,
                          grid=None, tol: float = 1e-13) -> RadialProfile:
    """h = (1/pi) int_{-Y}^{Y} z h^(z) r_z dy along z = gamma_m + i y.

    Nodes whose certified contribution |z h^(z)| (1+|z|)^4 is below ``tol``
    times the peak are skipped.
    """
    cut = _cut(h.m, 0.0, cut)
    g = cut.gamma_m
    if h.domain <= g:
        raise PreconditionError("symbol must be holomorphic across Re s = gamma_m")
    probe = np.array([10.0, 20.0, 40.0, 80.0])
    decay = np.abs(h(g + 1j * probe)) * (1 + probe) ** 8
    if decay[-1] > 2 * decay[0] and decay[-1] > 1e-10:
        raise PreconditionError("symbol decays slower than (1+|Im z|)^-8 on the contour")
    r, w = radial_grid() if grid is None else grid
    width = min(0.5, np.pi / min(r[-1], 40.0 / (2 * g + 1)))
    ys, wy = gl_panels(np.linspace(-y_max, y_max, 2 * int(np.ceil(y_max / width)) + 1))
    z = g + 1j * ys
    hz = h(z)
    bound = np.abs(z * hz) * (1 + np.abs(z)) ** 4
    keep = bound > tol * bound.max()
    z, hz, wy = z[keep], hz[keep], wy[keep]
    rr = np.maximum(r, 1e-300)
    out = np.zeros(r.shape, dtype=complex)
    step = max(1, 1_000_000 // r.size)
    for i in range(0, z.size, step):
        zz = z[i:i + step, None]
        kern = phi_big(h.m, -zz, rr[None, :]) / (4 * np.pi * zz * c_function(h.m, zz))
        out += (wy[i:i + step] * (zz[:, 0] * hz[i:i + step])) @ kern
    return RadialProfile(h.m, r, w, out / np.pi, alpha=cut.alpha)
