"""The 2x2 matrix model of SL(2, R).

Conventions::

    k_theta = [[cos, sin], [-sin, cos]]
    a_r     = diag(e^r, e^-r)
    n_t     = [[1, 0], [t, 1]]

Cartan coordinates ``g = k_theta a_r k_psi`` use the canonical section
theta in [0, 2pi), psi in [0, pi), r >= 0, with psi = 0 when r = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * np.pi
DET_RENORM_TOL = 1e-9


def k(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def a(r):
    return np.array([[np.exp(r), 0.0], [0.0, np.exp(-r)]])


def n(t):
    return np.array([[1.0, 0.0], [t, 1.0]])


@dataclass(frozen=True)
class GroupElement:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(np.isfinite(v) for v in vals):
            raise DomainError("matrix entries must be finite")
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > 1e-12:
            if det <= 0 or abs(det - 1.0) > DET_RENORM_TOL:
                raise DomainError(f"not unimodular: det = {det!r}")
            f = 1.0 / np.sqrt(det)
            for name, v in zip("abcd", vals):
                object.__setattr__(self, name, float(v * f))

    @classmethod
    def from_matrix(cls, mat) -> "GroupElement":
        mat = np.asarray(mat, dtype=float)
        return cls(mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)


@dataclass(frozen=True)
class CartanCoords:
    theta: float
    r: float
    psi: float

    def matrix(self) -> np.ndarray:
        return k(self.theta) @ a(self.r) @ k(self.psi)


@dataclass(frozen=True)
class IwasawaCoords:
    t: float
    rr: float
    theta: float

    def matrix(self) -> np.ndarray:
        return n(self.t) @ a(self.rr) @ k(self.theta)


@dataclass(frozen=True)
class Weight:
    alpha: float = 0.0

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError("weight exponent must be nonnegative")

    def __call__(self, g: GroupElement) -> float:
        return weight_eval(self, g)


def _check(g) -> np.ndarray:
    if isinstance(g, GroupElement):
        return g.matrix
    return GroupElement.from_matrix(g).matrix


def cartan_arrays(a_, b_, c_, d_):
    """Vectorised Cartan decomposition of matrices given entrywise.

    Returns ``(theta, r, psi)`` arrays. No determinant check.
    """
    p = 0.5 * (a_ + d_)
    q = 0.5 * (b_ - c_)
    u = 0.5 * (a_ - d_)
    v = 0.5 * (b_ + c_)
    # g = cosh r k_{theta+psi} + sinh r H k_{psi-theta}
    sh = np.hypot(u, v)
    r = np.arcsinh(sh)
    total = np.arctan2(q, p)
    diff = np.where(sh > 0, np.arctan2(v, u), -total)
    psi = np.mod(0.5 * (total + diff), np.pi)
    theta = np.mod(total - psi, TWO_PI)
    # snap values that rounded up to the period
    theta = np.where(theta >= TWO_PI, 0.0, theta)
    return theta, r, psi


def cartan_decompose(g) -> CartanCoords:
    m = _check(g)
    theta, r, psi = cartan_arrays(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    return CartanCoords(float(theta), float(r), float(psi))


def iwasawa_decompose(g) -> IwasawaCoords:
    m = _check(g)
    er = np.hypot(m[0, 0], m[0, 1])
    theta = float(np.mod(np.arctan2(m[0, 1], m[0, 0]), TWO_PI))
    t = (m[1, 0] * np.cos(theta) + m[1, 1] * np.sin(theta)) / er
    return IwasawaCoords(float(t), float(np.log(er)), theta)


def op_norm(g) -> float:
    """Operator norm on euclidean R^2, equal to e^r."""
    return float(np.exp(cartan_decompose(g).r))


def haar_density(r):
    """Radial Haar density 2 sinh(2r) in Cartan coordinates."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be nonnegative")
    out = 2.0 * np.sinh(2.0 * r)
    return out if out.ndim else float(out)


def weight_eval(w: Weight, g) -> float:
    return float(np.exp(w.alpha * cartan_decompose(g).r))


def random_elements(rng: np.random.Generator, size: int, scale: float = 2.0):
    """Random elements built from Iwasawa triples, as a (size, 2, 2) array."""
    t = rng.normal(scale=scale, size=size)
    rr = rng.normal(scale=scale / 2, size=size)
    th = rng.uniform(0, TWO_PI, size=size)
    c, s = np.cos(th), np.sin(th)
    er, emr = np.exp(rr), np.exp(-rr)
    # n_t a_rr k_th
    out = np.empty((size, 2, 2))
    out[:, 0, 0] = er * c
    out[:, 0, 1] = er * s
    out[:, 1, 0] = t * er * c - emr * s
    out[:, 1, 1] = t * er * s + emr * c
    return out
