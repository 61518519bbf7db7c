"""Special functions: log-Gamma, Gauss 2F1 on (-1, 1), the c-function.

``c_m(s) = 2^(1-2s) Gamma(2s) / (Gamma((1+2s+m)/2) Gamma((1+2s-m)/2))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np
from scipy import special as sps

from .errors import DomainError, PoleError

LOG2 = np.log(2.0)
_INT_TOL = 1e-12


# --- spectral parameter ---------------------------------------------------

@dataclass(frozen=True)
class SpectralParam:
    s: complex

    @property
    def eigenvalue(self) -> complex:
        """Casimir eigenvalue s^2 - 1/4."""
        return self.s * self.s - 0.25

    def in_strip(self, delta) -> bool:
        """Membership in the closed strip |Re s| <= delta / 2.

        Exact when ``delta`` and ``Re s`` are rationals (``Fraction``).
        """
        re = self.s.real if isinstance(self.s, complex) else self.s
        if isinstance(delta, Fraction) and isinstance(re, Fraction):
            return abs(re) <= delta / 2
        return abs(float(re)) <= float(delta) / 2


def as_complex(s):
    if isinstance(s, SpectralParam):
        s = s.s
    return np.asarray(s, dtype=complex)


@dataclass(frozen=True)
class DiscreteSpectrum:
    m: int
    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for p in self.points:
            if p == 0 or (abs(self.m) - 1 - 2 * abs(p)) % 2 or abs(self.m) - 1 - 2 * abs(p) < 0:
                raise DomainError(f"{p} is not in D_{self.m}")
        if sorted(self.points) != sorted(-p for p in self.points):
            raise DomainError("discrete spectrum must be symmetric")

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    @property
    def positive(self) -> tuple:
        return tuple(p for p in self.points if p > 0)


def discrete_spectrum(m: int) -> DiscreteSpectrum:
    """All real s != 0 with |m| - 1 - 2|s| a nonnegative even integer."""
    am = abs(int(m))
    pos = []
    j = 0
    while Fraction(am - 1, 2) - j > 0:
        pos.append(Fraction(am - 1, 2) - j)
        j += 1
    pts = tuple(sorted([-p for p in pos] + pos))
    return DiscreteSpectrum(int(m), pts)


def in_discrete(m: int, s, tol: float = 1e-12) -> bool:
    s = complex(s)
    if abs(s.imag) > tol or abs(s.real) <= tol:
        return False
    k = abs(m) - 1 - 2 * abs(s.real)
    kr = round(k)
    return abs(k - kr) <= tol and kr >= 0 and kr % 2 == 0


# --- Gamma ------------------------------------------------------------------

def _nonpos_int(z, tol=_INT_TOL):
    z = np.asarray(z, dtype=complex)
    rr = np.round(z.real)
    return (np.abs(z.imag) <= tol) & (np.abs(z.real - rr) <= tol) & (rr <= 0)


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z."""
    z = np.asarray(z, dtype=complex)
    bad = _nonpos_int(z)
    if np.any(bad):
        loc = int(np.round(z[bad].real.ravel()[0])) if z.ndim else int(round(z.real.item()))
        raise PoleError(f"Gamma has a pole at {loc}", loc)
    out = sps.loggamma(z)
    return out if out.ndim else complex(out)


def _lg(z):
    # unchecked log-gamma; callers mask the poles
    return sps.loggamma(z)


# --- Gauss hypergeometric ---------------------------------------------------

def _series(a, b, c, x, tol=1e-17, max_terms=200000):
    """Broadcast power series sum of 2F1; no pole checks."""
    a, b, c, x = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, x)))
    term = np.ones(a.shape, dtype=complex)
    total = term.copy()
    done = np.zeros(a.shape, dtype=bool)
    absx = np.abs(x)
    for nn in range(max_terms):
        ratio = (a + nn) * (b + nn) / ((c + nn) * (nn + 1.0)) * x
        term = np.where(done, 0.0, term * ratio)
        total = total + term
        rho = np.maximum(np.abs(ratio), absx)
        with np.errstate(invalid="ignore"):
            tail = np.abs(term) * np.where(rho < 1, rho / (1 - rho + 1e-300), np.inf)
        done |= (term == 0) | ((nn >= 1) & (tail <= tol * np.abs(total)))
        if done.all():
            break
    else:
        raise DomainError("hypergeometric series failed to converge")
    return total


def _terminates(p):
    """Degree of termination when p is a nonpositive integer, else None."""
    p = complex(p)
    if abs(p.imag) <= _INT_TOL and abs(p.real - round(p.real)) <= _INT_TOL and round(p.real) <= 0:
        return -int(round(p.real))
    return None


def _poly(a, b, c, x, deg):
    term = np.ones_like(np.asarray(x, dtype=complex))
    total = term.copy()
    for nn in range(deg):
        term = term * (a + nn) * (b + nn) / ((c + nn) * (nn + 1.0)) * x
        total = total + term
    return total


def _rgamma_ratio(num, den):
    """prod Gamma(num) / prod Gamma(den); zero if a denominator is at a pole."""
    for d in den:
        if _nonpos_int(d):
            return 0.0
    lg = sum(_lg(complex(v)) for v in num) - sum(_lg(complex(v)) for v in den)
    return np.exp(lg)


def _near_one_general(a, b, c, w):
    d = c - a - b
    t1 = _rgamma_ratio([c, d], [c - a, c - b])
    t2 = _rgamma_ratio([c, -d], [a, b])
    out = 0.0
    if t1 != 0:
        out = out + t1 * _series(a, b, 1 - d, w)
    if t2 != 0:
        out = out + t2 * w ** d * _series(c - a, c - b, 1 + d, w)
    return out


def _near_one_log(a, b, kk, w):
    """2F1(a, b; a+b+kk; 1-w) for integer kk >= 0 via the logarithmic connection."""
    w = np.asarray(w, dtype=float)
    lw = np.log(w)
    c = a + b + kk
    out = np.zeros(w.shape, dtype=complex)
    if kk > 0:
        pref = _rgamma_ratio([kk, c], [a + kk, b + kk])
        term = np.ones_like(out)
        fin = term.copy()
        for nn in range(kk - 1):
            term = term * (a + nn) * (b + nn) / ((nn + 1.0) * (1 - kk + nn)) * w
            fin = fin + term
        out = out + pref * fin
    pref = _rgamma_ratio([c], [a, b])
    if pref == 0:
        return out
    ap, bp = a + kk, b + kk
    coef = np.ones_like(out) / factorial(kk)
    total = np.zeros_like(out)
    nn = 0
    while True:
        bracket = lw - sps.digamma(nn + 1.0) - sps.digamma(nn + kk + 1.0) \
            + sps.digamma(ap + nn) + sps.digamma(bp + nn)
        piece = coef * bracket
        total = total + piece
        if nn > 2 and np.all(np.abs(piece) <= 1e-17 * np.abs(total)):
            break
        coef = coef * (ap + nn) * (bp + nn) / ((nn + 1.0) * (nn + kk + 1.0)) * w
        nn += 1
        if nn > 200000:
            raise DomainError("log-case connection series failed to converge")
    return out - (-w) ** kk * pref * total


def _near_one(a, b, c, w):
    """2F1(a, b; c; 1 - w) for small w > 0, given w itself."""
    d = complex(c - a - b)
    kk = round(d.real)
    dist = abs(d - kk)
    if dist <= _INT_TOL:
        if kk >= 0:
            return _near_one_log(a, b, kk, w)
        w = np.asarray(w, dtype=float)
        return w ** kk * _near_one_log(c - a, c - b, -kk, w)
    if dist < 1e-3:
        # analytic in b: average over a small circle away from the degeneracy
        npts, rad = 32, 0.02
        ang = np.exp(2j * np.pi * (np.arange(npts) + 0.5) / npts)
        return sum(_near_one_general(a, b + rad * e, c, w) for e in ang) / npts
    return _near_one_general(a, b, c, w)


def hyp2f1_complement(a, b, c, w):
    """2F1(a, b; c; 1 - w) for 0 < w < 1, accurate when w is tiny."""
    w_arr = np.asarray(w, dtype=float)
    if np.any((w_arr <= 0) | (w_arr >= 1)):
        raise DomainError("hyp2f1_complement requires 0 < w < 1")
    a, b, c = complex(a), complex(b), complex(c)
    if np.all(w_arr >= 0.1):
        return hyp2f1(a, b, c, 1.0 - w_arr)
    deg = [d for d in (_terminates(a), _terminates(b)) if d is not None]
    if deg or _terminates(c) is not None:
        return hyp2f1(a, b, c, 1.0 - w_arr)
    out = _near_one(a, b, c, np.atleast_1d(w_arr))
    return out.reshape(w_arr.shape) if w_arr.ndim else complex(out[0])


def hyp2f1(a, b, c, x):
    """Gauss 2F1(a, b; c; x) for complex parameters and real x in (-1, 1).

    Power series for |x| <= 0.9; for x > 0.9 the 1 - x connection formulas
    (logarithmic when c - a - b is an integer); for x < -0.9 the Pfaff
    transformation to x / (x - 1).
    """
    a, b, c = complex(a), complex(b), complex(c)
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.abs(x_arr) >= 1):
        raise DomainError("hyp2f1 requires |x| < 1")
    deg = [d for d in (_terminates(a), _terminates(b)) if d is not None]
    deg = min(deg) if deg else None
    cpole = _terminates(c)
    if cpole is not None and (deg is None or deg > cpole):
        raise PoleError(f"2F1 third parameter at pole {c}", -cpole)
    if deg is not None:
        out = _poly(a, b, c, x_arr, deg)
        return out if out.ndim else complex(out)
    out = np.empty(x_arr.shape, dtype=complex)
    small = np.abs(x_arr) <= 0.9
    hi = x_arr > 0.9
    lo = x_arr < -0.9
    if small.any():
        out[small] = _series(a, b, c, x_arr[small])
    if hi.any():
        out[hi] = _near_one(a, b, c, 1.0 - x_arr[hi])
    if lo.any():
        xl = x_arr[lo]
        out[lo] = (1 - xl) ** (-a) * _series(a, c - b, c, xl / (xl - 1))
    return out if out.ndim else complex(out)


# --- c-function ---------------------------------------------------------------

def c_function(m: int, s):
    """Harish-Chandra function c_m(s), vectorised over s.

    Raises ``PoleError`` at poles of Gamma(2s) not cancelled by the
    denominator; returns 0 at zeros (denominator poles).
    """
    s = as_complex(s)
    am = abs(int(m))
    z1 = (1 + 2 * s + am) / 2
    z2 = (1 + 2 * s - am) / 2
    pn = _nonpos_int(2 * s)
    p1 = _nonpos_int(z1)
    p2 = _nonpos_int(z2)
    bad = pn & ~(p1 | p2)
    if np.any(bad):
        loc = complex(s[bad].ravel()[0]) if s.ndim else complex(s)
        raise PoleError(f"c_{m} has a pole at s = {loc}", loc)
    with np.errstate(all="ignore"):
        val = np.exp((1 - 2 * s) * LOG2 + _lg(2 * s) - _lg(z1) - _lg(z2))
    out = np.where(p1 | p2, 0.0, val)
    # numerator and exactly one denominator factor singular: finite limit
    single = pn & (p1 ^ p2)
    if np.any(single):
        flat_s = np.atleast_1d(s).ravel()
        flat = np.atleast_1d(out).astype(complex).ravel().copy()
        for i in np.flatnonzero(np.atleast_1d(single)):
            flat[i] = _c_limit(am, flat_s[i])
        out = flat.reshape(np.shape(s))
    return out if out.ndim else complex(out)


def _c_limit(am, s0):
    # Gamma(2s) ~ (-1)^k / (2 k! eps) and 1/Gamma(-j + eps) ~ (-1)^j j! eps
    k_ = int(round(-2 * s0.real))
    z1 = (1 + 2 * s0 + am) / 2
    z2 = (1 + 2 * s0 - am) / 2
    if _nonpos_int(z1):
        j_, other = int(round(-z1.real)), z2
    else:
        j_, other = int(round(-z2.real)), z1
    val = (-1) ** (k_ + j_) * factorial(j_) / (2.0 * factorial(k_))
    return val * 2.0 ** (1 + k_) * sps.rgamma(complex(other))


def c_inverse(m: int, s):
    """1 / c_m(s); raises ``PoleError`` at its poles."""
    s = as_complex(s)
    am = abs(int(m))
    z1 = (1 + 2 * s + am) / 2
    z2 = (1 + 2 * s - am) / 2
    p1 = _nonpos_int(z1)
    p2 = _nonpos_int(z2)
    pn = _nonpos_int(2 * s)
    pole = (p1 | p2) & ~pn | (p1 & p2)
    if np.any(pole):
        loc = complex(s[pole].ravel()[0]) if s.ndim else complex(s)
        raise PoleError(f"1/c_{m} has a pole at s = {loc}", loc)
    with np.errstate(all="ignore"):
        val = np.exp((2 * s - 1) * LOG2 - _lg(2 * s) + _lg(z1) + _lg(z2))
    out = np.where(pn, 0.0, val)
    single = pn & (p1 ^ p2)
    if np.any(single):
        out = np.where(single, 1.0 / c_function(m, np.where(single, s, 1.0)), out)
    return out if out.ndim else complex(out)


def plancherel_density(m: int, lam):
    """|c_m(i lambda)|^-2: pi lambda tanh(pi lambda) (m even) or coth (m odd)."""
    lam = np.asarray(lam, dtype=float)
    x = np.pi * lam
    if int(m) % 2 == 0:
        out = x * np.tanh(x)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(np.abs(x) < 1e-8, 1.0 + x * x / 3.0, x / np.tanh(x))
    return out if out.ndim else float(out)


def residue_exact(m: int, j: int) -> Fraction:
    """Residue of 1/c_m at s_j = (|m|-1)/2 - j, from the Gamma factors."""
    am = abs(int(m))
    num = factorial(am - j - 1)
    den = factorial(j) * factorial(am - 2 * j - 2)
    return (-1) ** j * Fraction(num, den) * Fraction(2) ** (am - 2 - 2 * j)


def residue_stated(m: int, j: int) -> Fraction:
    """(-1)^j C(|m|-j, j) 2^(|m|-2-2j); agrees with ``residue_exact`` only for |m| <= 2."""
    from math import comb

    am = abs(int(m))
    return (-1) ** j * comb(am - j, j) * Fraction(2) ** (am - 2 - 2 * j)


@dataclass(frozen=True)
class Pole:
    location: Fraction
    residue: Fraction | None
    j: int | None = None


def c_inv_poles(m: int, n_negative: int = 0) -> list[Pole]:
    """Poles of 1/c_m.

    Positive poles s_j = (|m|-1)/2 - j > 0 come with exact residues. The
    first ``n_negative`` poles of the negative family 2s in -|m|-1-2N are
    listed by location only.
    """
    am = abs(int(m))
    out = []
    j = 0
    while Fraction(am - 1, 2) - j > 0:
        out.append(Pole(Fraction(am - 1, 2) - j, residue_exact(am, j), j))
        j += 1
    for i in range(n_negative):
        out.append(Pole(Fraction(-am - 1 - 2 * i, 2), None, None))
    return out
