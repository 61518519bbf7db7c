"""Spherical functions phi_{m,s}(a_r) and the asymptotic solutions Phi_{m,s}.

phi is entire in s and even in both m and s. Three evaluation routes:

* a terminating polynomial in tanh^2 r when s lies in the discrete set D_m;
* the tanh^2 r power series when it converges without cancellation;
* otherwise ``c_m(s) Phi_{m,s} + c_m(-s) Phi_{m,-s}``, with Phi summed as a
  power series in q = e^{-2r} whose coefficients come from the radial
  equation ``u'' + 2 coth(2r) u' + (1 - 4 s^2 + m^2 sech^2 r) u = 0``.

Where 2s is close to an integer the connection formula degenerates; phi is
then recovered as the mean of its values on a small circle around s.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .errors import DomainError, PoleError
from .special import (_near_one, _nonpos_int, _series, as_complex, c_function, hyp2f1_complement,
                      in_discrete)

# |Im s| tanh r above this: tanh^2 series loses > ~3 digits to cancellation
_CANCEL = 3.0
_X_MAX = 0.9
_CIRCLE_N = 32


def _hc_series(m, s, r, tol=1e-17, max_terms=400000):
    """Sum_{n>=0} g_n q^n for Phi_{m,s}(a_r) = e^{(2s-1)r} * sum.

    Vectorised over broadcast (s, r); r > 0 and 2s not a positive integer.
    """
    s, r = np.broadcast_arrays(np.asarray(s, dtype=complex), np.asarray(r, dtype=float))
    shape = s.shape
    s = s.ravel().copy()
    q = np.exp(-2.0 * r.ravel())
    m2 = float(m) ** 2
    total = np.ones(s.shape, dtype=complex)
    # h_k = g_k q^k for the last four k
    h1 = np.ones_like(total)
    h2 = np.zeros_like(total)
    h3 = np.zeros_like(total)
    h4 = np.zeros_like(total)
    idx = np.arange(s.size)
    small = np.zeros(s.size, dtype=int)
    q2, q3, q4 = q * q, q ** 3, q ** 4
    for n in range(1, max_terms):
        if idx.size == 0:
            break
        ss = s[idx]
        a1 = m2 + 2 * n * n - 4 * n * ss - 4 * n + 4 * ss + 2
        a2 = -2 * n + 2 * ss + 3
        a3 = -m2 - 2 * n * n + 4 * n * ss + 8 * n - 8 * ss - 8
        a4 = (n - 3) * (2 * ss + 3 - n)
        hn = -(a1 * h1 * q[idx] + a2 * h2 * q2[idx] + a3 * h3 * q3[idx] + a4 * h4 * q4[idx]) \
            / (n * (n - 2 * ss))
        total[idx] += hn
        h4, h3, h2, h1 = h3, h2, h1, hn
        tiny = np.abs(hn) <= tol * np.abs(total[idx])
        small[idx] = np.where(tiny, small[idx] + 1, 0)
        keep = small[idx] < 6
        if not keep.all():
            idx = idx[keep]
            h1, h2, h3, h4 = h1[keep], h2[keep], h3[keep], h4[keep]
    else:
        raise DomainError("Harish-Chandra series failed to converge (r too small)")
    return total.reshape(shape)


def _phi_big_q(m, s, r):
    s, r = np.broadcast_arrays(np.asarray(s, dtype=complex), np.asarray(r, dtype=float))
    return np.exp((2 * s - 1) * r) * _hc_series(m, s, r)


def _check_phi_big_args(s, r):
    if np.any(np.asarray(r) <= 0):
        raise DomainError("Phi_{m,s}(a_r) needs r > 0")
    two_s = 2 * s
    rr = np.round(two_s.real)
    pole = (np.abs(two_s.imag) < 1e-12) & (np.abs(two_s.real - rr) < 1e-12) & (rr >= 1)
    if np.any(pole):
        loc = complex(np.asarray(s)[pole].ravel()[0]) if np.ndim(s) else complex(s)
        raise PoleError(f"Phi_{{m,s}} undefined: 1 - 2s at a pole (s = {loc})", loc)


def phi_big(m: int, s, r, method: str = "auto"):
    """Phi_{m,s}(a_r) = (2 cosh r)^{2s-1} 2F1((1-m)/2-s, (1+m)/2-s; 1-2s; sech^2 r).

    ``method``: "q" (expansion in e^{-2r}), "series" (the displayed 2F1)
    or "auto" (series only where r is small and |s| tanh r is moderate).
    """
    s_arr = as_complex(s)
    r_arr = np.asarray(r, dtype=float)
    _check_phi_big_args(s_arr, r_arr)
    s_b, r_b = np.broadcast_arrays(s_arr, r_arr)
    out = np.empty(s_b.shape, dtype=complex)
    if method == "q":
        use_series = np.zeros(s_b.shape, dtype=bool)
    elif method == "series":
        use_series = np.ones(s_b.shape, dtype=bool)
    else:
        use_series = (r_b < 0.5) & (np.abs(s_b) * np.tanh(r_b) <= _CANCEL)
    if (~use_series).any():
        out[~use_series] = _phi_big_q(m, s_b[~use_series], r_b[~use_series])
    a_ = (1 - m) / 2 - s_b
    b_ = (1 + m) / 2 - s_b
    degenerate = _nonpos_int(a_, 1e-9) | _nonpos_int(b_, 1e-9)
    vec = use_series & ~degenerate
    if vec.any():
        out[vec] = _phi_big_log(m, s_b[vec], r_b[vec])
    for i in np.flatnonzero((use_series & degenerate).ravel()):
        ss, rr = complex(s_b.ravel()[i]), float(r_b.ravel()[i])
        # 1 - sech^2 r = tanh^2 r, passed exactly for tiny r
        out.ravel()[i] = (2 * np.cosh(rr)) ** (2 * ss - 1) * hyp2f1_complement(
            (1 - m) / 2 - ss, (1 + m) / 2 - ss, 1 - 2 * ss, np.tanh(rr) ** 2)
    return out if out.ndim else complex(out)


def _phi_big_log(m, s, r, tol=1e-17, max_terms=100000):
    """Displayed form near r = 0, vectorised.

    Here c - a - b = 0, so 2F1(a, b; a+b; 1-w) with w = tanh^2 r is
    Gamma(a+b)/(Gamma(a)Gamma(b)) sum_n (a)_n (b)_n/(n!)^2 w^n
    [2 psi(n+1) - psi(a+n) - psi(b+n) - log w].
    """
    a = (1 - m) / 2 - s
    b = (1 + m) / 2 - s
    w = np.tanh(r) ** 2
    lw = np.log(w)
    pref = np.exp(sps.loggamma(a + b) - sps.loggamma(a) - sps.loggamma(b))
    coef = np.ones(s.shape, dtype=complex)
    pa, pb = sps.digamma(a), sps.digamma(b)
    p1 = sps.digamma(1.0)
    total = coef * (2 * p1 - pa - pb - lw)
    for n in range(max_terms):
        coef = coef * (a + n) * (b + n) / (n + 1.0) ** 2 * w
        pa = pa + 1.0 / (a + n)
        pb = pb + 1.0 / (b + n)
        p1 = p1 + 1.0 / (n + 1.0)
        piece = coef * (2 * p1 - pa - pb - lw)
        total = total + piece
        if n > 2 and np.all(np.abs(piece) <= tol * np.abs(total)):
            break
    else:
        raise DomainError("logarithmic series for Phi failed to converge")
    return (2 * np.cosh(r)) ** (2 * s - 1) * pref * total


def nu_remainder(m: int, s, r):
    """nu_m(s, r) = Phi_{m,s}(a_r) e^{(1-2s) r} - 1, summed without cancellation."""
    s_arr = as_complex(s)
    r_arr = np.asarray(r, dtype=float)
    _check_phi_big_args(s_arr, r_arr)
    out = _hc_series(m, s_arr, r_arr) - 1.0
    return out if out.ndim else complex(out)


def _in_discrete_arr(m, s, tol=1e-12):
    k = abs(m) - 1 - 2 * np.abs(s.real)
    kr = np.round(k)
    return ((np.abs(s.imag) <= tol) & (np.abs(s.real) > tol) & (np.abs(k - kr) <= tol)
            & (kr >= 0) & (kr % 2 == 0))


def _near_half_integer(s, rho):
    two_s = 2 * s
    return np.abs(two_s - np.round(two_s.real)) < rho


def _connection(m, s, r):
    s = np.asarray(s, dtype=complex)
    return c_function(m, s) * _phi_big_q(m, s, r) + c_function(m, -s) * _phi_big_q(m, -s, r)


def _phi_connection(m, s, r):
    """phi via the connection formula, circle-averaged near 2s in Z."""
    out = np.empty(s.shape, dtype=complex)
    rho = np.minimum(0.2, 0.5 / (1.0 + r))
    degen = _near_half_integer(s, rho)
    if (~degen).any():
        out[~degen] = _connection(m, s[~degen], r[~degen])
    if degen.any():
        ang = np.exp(2j * np.pi * (np.arange(_CIRCLE_N) + 0.5) / _CIRCLE_N)
        sd = s[degen][:, None] + rho[degen][:, None] * ang[None, :]
        rd = np.broadcast_to(r[degen][:, None], sd.shape)
        out[degen] = _connection(m, sd, rd).mean(axis=1)
    return out


def _phi_tanh(m, s, r):
    # second form, with Re s >= 0 by evenness
    x = np.tanh(r) ** 2
    a_ = (1 + m) / 2 + s
    b_ = (1 - m) / 2 + s
    return np.cosh(r) ** (-1 - 2 * s) * _series(a_, b_, 1.0, x)


def _phi_sinh(m, s, r):
    x = -np.sinh(r) ** 2
    return np.cosh(r) ** (-m) * _series((1 - m) / 2 - s, (1 - m) / 2 + s, 1.0, x)


def phi(m: int, s, r, method: str = "auto"):
    """phi_{m,s}(a_r), vectorised over broadcast (s, r).

    ``method`` "auto" routes per point; "tanh", "sinh" and "connection"
    force one form (used for cross-checks).
    """
    m = abs(int(m))
    s_arr = as_complex(s)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("phi needs r >= 0")
    s_b, r_b = np.broadcast_arrays(s_arr, r_arr)
    shape = s_b.shape
    s_f = s_b.ravel().copy()
    r_f = r_b.ravel()
    s_f = np.where(s_f.real < 0, -s_f, s_f)
    if method == "tanh":
        out = _phi_tanh(m, s_f, r_f)
    elif method == "sinh":
        if np.any(np.sinh(r_f) ** 2 >= 1):
            raise DomainError("the -sinh^2 form needs sinh^2 r < 1")
        out = _phi_sinh(m, s_f, r_f)
    elif method == "connection":
        out = _phi_connection(m, s_f, r_f)
    elif method == "auto":
        out = np.empty(s_f.shape, dtype=complex)
        zero = r_f == 0
        out[zero] = 1.0
        disc = _in_discrete_arr(m, s_f) & ~zero
        if disc.any():
            out[disc] = _phi_tanh(m, s_f[disc], r_f[disc])
        th = np.tanh(r_f)
        easy = ~zero & ~disc & (th * th <= _X_MAX) & (np.abs(s_f.imag) * th <= _CANCEL)
        if easy.any():
            out[easy] = _phi_tanh(m, s_f[easy], r_f[easy])
        rest = ~(zero | disc | easy)
        if rest.any():
            out[rest] = _phi_connection(m, s_f[rest], r_f[rest])
    else:
        raise ValueError(f"unknown method {method!r}")
    out = out.reshape(shape)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class DecayProfile:
    """Predicted large-r behaviour |phi_{m,s}(a_r)| <~ (1+r)^power e^{rate r}."""

    regime: str
    rate: float
    power: int = 0


def decay_profile(m: int, s) -> DecayProfile:
    s = complex(as_complex(s))
    if s == 0:
        return DecayProfile("zero", -1.0, 1)
    if in_discrete(m, s):
        return DecayProfile("discrete", -2 * abs(s.real) - 1.0)
    return DecayProfile("generic", 2 * abs(s.real) - 1.0)


def phi_near_one(m, s, r):
    """phi from the tanh^2 form with the 1 - x connection (cross-check route)."""
    m = abs(int(m))
    s = complex(s)
    x = np.tanh(np.asarray(r, dtype=float)) ** 2
    return np.cosh(r) ** (-1 - 2 * s) * _near_one((1 + m) / 2 + s, (1 - m) / 2 + s, 1.0, 1.0 - x)
